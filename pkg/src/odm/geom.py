"""Geometry for text regions: quads, cubic Bezier pairs, character slots, IoU.

Coordinates are image pixels with y pointing down. A quad is ordered
top-left, top-right, bottom-right, bottom-left; under that ordering its
shoelace area is positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import shapely

Point2 = Tuple[float, float]

DEGENERATE_AREA = 1e-9


class GeometryError(ValueError):
    """Degenerate or otherwise unusable geometry."""


def _pt(p) -> Point2:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite point ({x}, {y})")
    return (x, y)


def signed_area(pts: Sequence[Point2]) -> float:
    """Shoelace area; positive for TL, TR, BR, BL order in image coordinates."""
    a = np.asarray(pts, dtype=np.float64)
    x, y = a[:, 0], a[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class Quad:
    points: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        if len(self.points) != 4:
            raise GeometryError(f"quad needs 4 points, got {len(self.points)}")
        object.__setattr__(self, "points", tuple(_pt(p) for p in self.points))

    @property
    def area(self) -> float:
        return signed_area(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)


@dataclass(frozen=True)
class Polygon:
    points: tuple[Point2, ...]

    def __post_init__(self):
        if len(self.points) < 3:
            raise GeometryError(f"polygon needs at least 3 points, got {len(self.points)}")
        object.__setattr__(self, "points", tuple(_pt(p) for p in self.points))

    @property
    def area(self) -> float:
        return abs(signed_area(self.points))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)


@dataclass(frozen=True)
class CubicBezier:
    control: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        if len(self.control) != 4:
            raise GeometryError(f"cubic Bezier needs 4 control points, got {len(self.control)}")
        object.__setattr__(self, "control", tuple(_pt(p) for p in self.control))


@dataclass(frozen=True)
class BezierPair:
    """Upper and lower boundary of a curved text region, both running left to right."""
    top: CubicBezier
    bottom: CubicBezier

    @classmethod
    def from_points(cls, pts: Sequence[Point2]) -> "BezierPair":
        if len(pts) != 8:
            raise GeometryError(f"Bezier pair needs 8 control points, got {len(pts)}")
        return cls(CubicBezier(tuple(pts[:4])), CubicBezier(tuple(pts[4:])))

    @property
    def points(self) -> tuple[Point2, ...]:
        return self.top.control + self.bottom.control


@dataclass(frozen=True)
class CharSlot:
    box: Quad
    angle: float


def bezier_point(curve: CubicBezier, t: float) -> Point2:
    """Evaluate the cubic in Bernstein form at ``t`` in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise GeometryError(f"Bezier parameter {t} outside [0, 1]")
    if t == 0.0:
        return curve.control[0]
    if t == 1.0:
        return curve.control[3]
    s = 1.0 - t
    w = (s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t)
    x = sum(wi * p[0] for wi, p in zip(w, curve.control))
    y = sum(wi * p[1] for wi, p in zip(w, curve.control))
    return (x, y)


def _lerp(a: Point2, b: Point2, t: float) -> Point2:
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def _angle(a: Point2, b: Point2) -> float:
    ang = math.atan2(b[1] - a[1], b[0] - a[0])
    return math.pi if ang == -math.pi else ang


def char_slots_quad(quad: Quad, n_chars: int) -> list[CharSlot]:
    """Split a quad into ``n_chars`` slots by equal steps along its top and bottom edges."""
    if n_chars < 1:
        raise GeometryError("n_chars must be >= 1")
    if abs(quad.area) < DEGENERATE_AREA:
        raise GeometryError(f"degenerate quad (area {quad.area:g})")
    tl, tr, br, bl = quad.points
    angle = _angle(tl, tr)
    slots = []
    for i in range(n_chars):
        t0, t1 = i / n_chars, (i + 1) / n_chars
        box = Quad((_lerp(tl, tr, t0), _lerp(tl, tr, t1), _lerp(bl, br, t1), _lerp(bl, br, t0)))
        slots.append(CharSlot(box, angle))
    return slots


def char_slots_bezier(pair: BezierPair, n_chars: int) -> list[CharSlot]:
    """Slots along a curved region.

    Slot corners sit on the two curves at parameters i/n and (i+1)/n. The
    angle of slot i points from its top-left corner to the top-left corner of
    slot i+1; the last slot keeps its predecessor's angle, and a lone slot
    uses its own top chord.
    """
    if n_chars < 1:
        raise GeometryError("n_chars must be >= 1")
    ts = [i / n_chars for i in range(n_chars + 1)]
    top = [bezier_point(pair.top, t) for t in ts]
    bot = [bezier_point(pair.bottom, t) for t in ts]
    outline = top + bot[::-1]
    if abs(signed_area(outline)) < DEGENERATE_AREA:
        raise GeometryError("degenerate Bezier pair (zero enclosed area)")
    angles = [_angle(top[i], top[i + 1]) for i in range(n_chars)]
    if n_chars > 1:
        angles[-1] = angles[-2]
    return [CharSlot(Quad((top[i], top[i + 1], bot[i + 1], bot[i])), angles[i])
            for i in range(n_chars)]


def fit_bezier(points: Sequence[Point2]) -> CubicBezier:
    """Least-squares cubic through a polyline with chord-length parameters.

    The end control points are pinned to the polyline ends.
    """
    p = np.asarray(points, dtype=np.float64)
    if len(p) < 2:
        raise GeometryError("need at least 2 points to fit a curve")
    if len(p) < 4:
        # too few samples to constrain the inner controls; use the straight chord
        a, b = p[0], p[-1]
        return CubicBezier(tuple(tuple(a + (b - a) * k / 3.0) for k in range(4)))
    seg = np.linalg.norm(np.diff(p, axis=0), axis=1)
    total = seg.sum()
    if total <= 0:
        raise GeometryError("polyline has zero length")
    t = np.concatenate([[0.0], np.cumsum(seg) / total])
    s = 1.0 - t
    b0, b1, b2, b3 = s ** 3, 3 * s * s * t, 3 * s * t * t, t ** 3
    rhs = p - np.outer(b0, p[0]) - np.outer(b3, p[-1])
    inner, *_ = np.linalg.lstsq(np.stack([b1, b2], axis=1), rhs, rcond=None)
    ctrl = [p[0], inner[0], inner[1], p[-1]]
    return CubicBezier(tuple((float(c[0]), float(c[1])) for c in ctrl))


def polygon_to_bezier(points: Sequence[Point2]) -> BezierPair:
    """Curved-text polygon (top edge left->right, then bottom edge right->left) to a Bezier pair."""
    if len(points) < 4 or len(points) % 2:
        raise GeometryError(f"curved polygon needs an even number (>=4) of points, got {len(points)}")
    half = len(points) // 2
    top = list(points[:half])
    bottom = list(points[half:])[::-1]
    return BezierPair(fit_bezier(top), fit_bezier(bottom))


def _shapely(poly: Polygon | Quad) -> shapely.Polygon:
    return shapely.Polygon(poly.points)


def polygon_iou(a: Polygon | Quad, b: Polygon | Quad) -> float:
    """Intersection over union of two simple polygons."""
    pa, pb = _shapely(a), _shapely(b)
    if pa.area < DEGENERATE_AREA or pb.area < DEGENERATE_AREA:
        raise GeometryError("degenerate polygon in IoU")
    inter = pa.intersection(pb).area
    if inter <= 0.0:
        return 0.0
    union = pa.area + pb.area - inter
    return float(min(1.0, max(0.0, inter / union)))


def points_in_polygon(xs: np.ndarray, ys: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd rule containment for arrays of sample coordinates."""
    inside = np.zeros(np.shape(xs), dtype=bool)
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        crosses = (y0 > ys) != (y1 > ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (ys - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (xs < xint)
    return inside
