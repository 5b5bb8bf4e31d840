"""Detection scoring: binary mask -> convex regions, greedy IoU matching, P/R/H."""
from __future__ import annotations

import json
import math
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .geom import DEGENERATE_AREA, GeometryError, Polygon, polygon_iou, signed_area

log = logging.getLogger(__name__)

EIGHT = np.ones((3, 3), dtype=bool)


def convex_hull(points: np.ndarray) -> list[tuple[float, float]]:
    """Monotone-chain hull, returned with positive signed area (clockwise on screen)."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float).tolist())))
    if len(pts) < 3:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if signed_area(hull) < 0:
        hull.reverse()
    return hull


def mask_to_regions(canvas, min_area: float = 16, link_radius: int = 0) -> list[Polygon]:
    """Convex hulls (over pixel corners) of 8-connected foreground components
    with more than ``min_area`` pixels.

    ``link_radius`` > 0 dilates the mask before labelling so nearby glyphs of
    one word merge; hull and area still use the original pixels.
    """
    px = np.asarray(getattr(canvas, "pixels", canvas)) > 0
    if px.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {px.shape}")
    grouping = ndimage.binary_dilation(px, EIGHT, iterations=link_radius) if link_radius > 0 else px
    labels, n = ndimage.label(grouping, structure=EIGHT)
    labels = np.where(px, labels, 0)
    regions = []
    for k in range(1, n + 1):
        ys, xs = np.nonzero(labels == k)
        if len(ys) <= min_area:
            continue
        corners = np.concatenate([np.stack([xs + dx, ys + dy], axis=1) for dx in (0, 1) for dy in (0, 1)])
        hull = convex_hull(corners)
        if len(hull) >= 3 and abs(signed_area(hull)) > DEGENERATE_AREA:
            regions.append(Polygon(tuple(hull)))
    return regions


@dataclass
class DetResult:
    matches: list[tuple[int, int, float]]
    precision: float
    recall: float
    hmean: float
    num_preds: int = 0
    num_gts: int = 0


def prh(n_match: int, n_pred: int, n_gt: int) -> tuple[float, float, float]:
    p = n_match / n_pred if n_pred else 0.0
    r = n_match / n_gt if n_gt else 0.0
    h = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, h


def _valid(polys: Sequence[Polygon], what: str) -> list[int]:
    keep = []
    for i, p in enumerate(polys):
        if abs(signed_area(p.points)) <= DEGENERATE_AREA:
            log.warning("%s %d is degenerate and was skipped", what, i)
        else:
            keep.append(i)
    return keep


def iou_matrix(preds: Sequence[Polygon], gts: Sequence[Polygon]) -> np.ndarray:
    out = np.zeros((len(preds), len(gts)))
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            out[i, j] = polygon_iou(p, g)
    return out


def score(preds: Sequence[Polygon], gts: Sequence[Polygon], iou_thresh: float = 0.5) -> DetResult:
    """Greedy one-to-one matching in descending IoU among pairs with IoU >= ``iou_thresh``.

    Degenerate polygons are dropped (with a warning) before counting.
    """
    pi, gi = _valid(preds, "prediction"), _valid(gts, "ground truth")
    try:
        ious = iou_matrix([preds[i] for i in pi], [gts[j] for j in gi])
    except GeometryError as exc:
        raise GeometryError(f"cannot score: {exc}") from None
    cand = [(ious[a, b], a, b) for a in range(len(pi)) for b in range(len(gi)) if ious[a, b] >= iou_thresh]
    cand.sort(key=lambda t: (-t[0], t[1], t[2]))
    used_p, used_g, matches = set(), set(), []
    for iou, a, b in cand:
        if a in used_p or b in used_g:
            continue
        used_p.add(a)
        used_g.add(b)
        matches.append((pi[a], gi[b], float(iou)))
    p, r, h = prh(len(matches), len(pi), len(gi))
    return DetResult(matches, p, r, h, len(pi), len(gi))


@dataclass
class DatasetScore:
    precision: float
    recall: float
    hmean: float
    num_images: int
    per_image: list[DetResult] = field(default_factory=list)

    def report(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "hmean": self.hmean,
                "num_images": self.num_images}

    def to_json(self) -> str:
        return json.dumps(self.report(), sort_keys=True)


def score_dataset(pairs: Iterable[tuple[Sequence[Polygon], Sequence[Polygon]]],
                  iou_thresh: float = 0.5) -> DatasetScore:
    """Pool matches, predictions and ground truths over all images, then compute P/R/H."""
    results = [score(p, g, iou_thresh) for p, g in pairs]
    m = sum(len(r.matches) for r in results)
    p, r, h = prh(m, sum(r.num_preds for r in results), sum(r.num_gts for r in results))
    return DatasetScore(p, r, h, len(results), results)


def gt_polygons(ann) -> list[Polygon]:
    """Evaluation regions of an annotation's non-ignored instances."""
    from .geom import bezier_point
    from .geom import BezierPair
    out = []
    for inst in ann.instances:
        if inst.ignore:
            continue
        shape = inst.shape
        if isinstance(shape, BezierPair):
            ts = np.linspace(0, 1, 9)
            top = [bezier_point(shape.top, float(t)) for t in ts]
            bot = [bezier_point(shape.bottom, float(t)) for t in ts[::-1]]
            out.append(Polygon(tuple(top + bot)))
        else:
            out.append(Polygon(tuple(shape.points)))
    return out


# -- attention heatmaps ----------------------------------------------------------------------

def slot_cells(inst, grid: int, image_size: int) -> np.ndarray:
    """(grid, grid) bool mask of attention cells whose centre lies inside one of the
    instance's character slots. A slot too small to cover any centre claims the
    cell it overlaps most, so every non-empty instance owns at least one cell."""
    import shapely
    from shapely.geometry import Polygon as ShapelyPolygon, box

    from .glyph import instance_slots

    stride = image_size / grid
    centres = (np.arange(grid) + 0.5) * stride
    cx, cy = np.meshgrid(centres, centres)
    out = np.zeros((grid, grid), dtype=bool)
    for slot in instance_slots(inst):
        poly = ShapelyPolygon(slot.box.as_array())
        if not poly.is_valid or poly.area <= 0:
            continue
        hit = shapely.contains_xy(poly, cx, cy)
        if not hit.any():
            x0, y0, x1, y1 = poly.bounds
            best, arg = 0.0, None
            for i in range(max(0, int(y0 // stride)), min(grid, int(y1 // stride) + 1)):
                for j in range(max(0, int(x0 // stride)), min(grid, int(x1 // stride) + 1)):
                    a = poly.intersection(box(j * stride, i * stride, (j + 1) * stride, (i + 1) * stride)).area
                    if a > best:
                        best, arg = a, (i, j)
            if arg is not None:
                hit[arg] = True
        out |= hit
    return out


@dataclass
class Localization:
    instance: int
    own: float     # heatmap mass on the instance's own slots
    other: float   # heatmap mass on the other instances' slots

    @property
    def localized(self) -> bool:
        return self.own > self.other


def attention_localization(heat: np.ndarray, ann, prompt_instances: Sequence[int | None],
                           image_size: int) -> list[Localization]:
    """Compare each prompted instance's heatmap mass on its own slots with its mass
    on every other instance's slots.

    ``heat`` is (M, grid*grid) as reported by the model; ``prompt_instances[m]``
    is the annotation index behind prompt row ``m`` (None for noise prompts).
    """
    q = heat.shape[1]
    grid = int(round(math.sqrt(q)))
    if grid * grid != q:
        raise ValueError(f"heatmap of length {q} is not a square grid")
    cells = [slot_cells(inst, grid, image_size).reshape(-1) for inst in ann.instances]
    out = []
    for m, k in enumerate(prompt_instances):
        if k is None:
            continue
        others = np.zeros(q, dtype=bool)
        for j, c in enumerate(cells):
            if j != k:
                others |= c
        own = cells[k] & ~others
        out.append(Localization(k, float(heat[m][own].sum()), float(heat[m][others & ~cells[k]].sum())))
    return out
