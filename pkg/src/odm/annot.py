"""Annotation records, importers, the canonical JSONL format and weak-label filtering.

Canonical format, one JSON object per line::

    {"image_id": "img_1", "width": 640, "height": 480,
     "instances": [{"kind": "quad", "points": [[x, y], ...], "text": "hi",
                    "conf": 0.97, "ignore": false}]}

``kind`` is ``quad`` (4 points), ``polygon`` (>= 3 points) or ``bezier``
(exactly 8 control points, top curve then bottom curve, both left to right).
``conf`` is omitted for fully supervised labels.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence, Union

from .geom import BezierPair, GeometryError, Polygon, Quad, signed_area

Shape = Union[Quad, Polygon, BezierPair]

IGNORE_TEXT = "###"
KINDS = ("quad", "polygon", "bezier")


class AnnotationError(ValueError):
    """Malformed annotation input; carries the 1-based line number and field when known."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.reason = message
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class TextInstance:
    shape: Shape
    text: str
    confidence: float | None = None
    ignore: bool = False

    def __post_init__(self):
        if not self.ignore and self.text == "":
            raise AnnotationError("empty transcription on a non-ignored instance", field="text")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise AnnotationError(f"confidence {self.confidence} outside [0, 1]", field="conf")

    @property
    def kind(self) -> str:
        return shape_kind(self.shape)

    @property
    def points(self) -> tuple:
        return self.shape.points


@dataclass(frozen=True)
class SceneAnnotation:
    image_id: str
    width: int
    height: int
    instances: tuple[TextInstance, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise AnnotationError(f"image size must be positive, got {self.width}x{self.height}",
                                  field="width" if self.width <= 0 else "height")
        clamped = tuple(_clamp_instance(inst, self.width, self.height) for inst in self.instances)
        object.__setattr__(self, "instances", clamped)


def shape_kind(shape: Shape) -> str:
    if isinstance(shape, Quad):
        return "quad"
    if isinstance(shape, BezierPair):
        return "bezier"
    return "polygon"


def make_shape(kind: str, points: Sequence[Sequence[float]]) -> Shape:
    pts = tuple((float(p[0]), float(p[1])) for p in points)
    if kind == "quad":
        return Quad(pts)
    if kind == "polygon":
        return Polygon(pts)
    if kind == "bezier":
        return BezierPair.from_points(pts)
    raise AnnotationError(f"unknown shape kind {kind!r}", field="kind")


def _clamp_instance(inst: TextInstance, w: int, h: int) -> TextInstance:
    pts = inst.shape.points
    clamped = tuple((min(max(x, 0.0), float(w)), min(max(y, 0.0), float(h))) for x, y in pts)
    if clamped == pts:
        return inst
    return replace(inst, shape=make_shape(inst.kind, clamped))


def bbox_short_side(shape: Shape) -> float:
    xs = [p[0] for p in shape.points]
    ys = [p[1] for p in shape.points]
    return min(max(xs) - min(xs), max(ys) - min(ys))


# -- ICDAR-style quad lines ---------------------------------------------------------

def parse_quad_line(line: str, lineno: int | None = None) -> TextInstance:
    """Parse ``x1,y1,...,x4,y4,transcription``; commas inside the text are kept."""
    fields = line.rstrip("\r\n").lstrip("﻿").split(",")
    if len(fields) < 9:
        raise AnnotationError(f"expected at least 9 comma-separated fields, got {len(fields)}",
                              line=lineno)
    coords = []
    for k, raw in enumerate(fields[:8]):
        try:
            v = float(raw)
        except ValueError:
            raise AnnotationError(f"non-numeric coordinate {raw.strip()!r}", line=lineno,
                                  field=("x", "y")[k % 2] + str(k // 2 + 1)) from None
        if not math.isfinite(v):
            raise AnnotationError(f"non-finite coordinate {raw.strip()!r}", line=lineno,
                                  field=("x", "y")[k % 2] + str(k // 2 + 1))
        coords.append(v)
    text = ",".join(fields[8:])
    pts = [(coords[i], coords[i + 1]) for i in range(0, 8, 2)]
    if signed_area(pts) < 0:
        # counter-clockwise input: keep the first corner, flip traversal
        pts = [pts[0], pts[3], pts[2], pts[1]]
    ignore = text == IGNORE_TEXT
    return TextInstance(Quad(tuple(pts)), text, None, ignore)


def parse_quad_file(lines: Iterable[str], lenient: bool = False,
                    errors: list | None = None) -> list[TextInstance]:
    out = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            out.append(parse_quad_line(line, lineno))
        except (AnnotationError, GeometryError) as exc:
            err = exc if isinstance(exc, AnnotationError) else AnnotationError(str(exc), line=lineno)
            if not lenient:
                raise err
            if errors is not None:
                errors.append(err)
    return out


# -- PaddleOCR-style pseudo labels ------------------------------------------------------

def parse_weak_line(line: str, lineno: int | None = None) -> tuple[str, list[TextInstance]]:
    """Parse ``image_id<TAB>[{"transcription": ..., "points": [[x, y], ...], "score": ...}, ...]``.

    Four-point regions become quads, longer ones polygons. ``score`` (or
    ``confidence``) is required.
    """
    if "\t" not in line:
        raise AnnotationError("expected '<image_id>\\t<json list>'", line=lineno)
    image_id, payload = line.rstrip("\r\n").split("\t", 1)
    try:
        items = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"bad JSON: {exc.msg}", line=lineno) from None
    if not isinstance(items, list):
        raise AnnotationError("expected a JSON list of detections", line=lineno)
    out = []
    for item in items:
        if not isinstance(item, dict):
            raise AnnotationError("detection must be an object", line=lineno)
        score = item.get("score", item.get("confidence"))
        if score is None:
            raise AnnotationError("missing detection score", line=lineno, field="score")
        text = item.get("transcription")
        if not isinstance(text, str):
            raise AnnotationError("missing transcription", line=lineno, field="transcription")
        pts = _points(item.get("points"), lineno)
        kind = "quad" if len(pts) == 4 else "polygon"
        try:
            out.append(TextInstance(make_shape(kind, pts), text, float(score),
                                    ignore=text in ("", IGNORE_TEXT)))
        except (GeometryError, TypeError, ValueError) as exc:
            raise AnnotationError(str(exc), line=lineno) from None
    return image_id, out


def _points(raw, lineno, field_name="points"):
    if not isinstance(raw, list):
        raise AnnotationError("points must be a list of [x, y] pairs", line=lineno, field=field_name)
    pts = []
    for p in raw:
        if (not isinstance(p, (list, tuple)) or len(p) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
            raise AnnotationError(f"bad point {p!r}", line=lineno, field=field_name)
        if not all(math.isfinite(v) for v in p):
            raise AnnotationError(f"non-finite point {p!r}", line=lineno, field=field_name)
        pts.append((float(p[0]), float(p[1])))
    return pts


def extent(instances: Sequence[TextInstance]) -> tuple[int, int]:
    """Smallest integer canvas that holds every point (at least 1x1)."""
    xs = [p[0] for inst in instances for p in inst.points] or [1.0]
    ys = [p[1] for inst in instances for p in inst.points] or [1.0]
    return max(1, math.ceil(max(xs))), max(1, math.ceil(max(ys)))


# -- canonical JSONL -------------------------------------------------------------------

def annotation_to_dict(ann: SceneAnnotation) -> dict:
    insts = []
    for inst in ann.instances:
        rec = {"kind": inst.kind, "points": [list(p) for p in inst.points], "text": inst.text}
        if inst.confidence is not None:
            rec["conf"] = inst.confidence
        rec["ignore"] = inst.ignore
        insts.append(rec)
    return {"image_id": ann.image_id, "width": ann.width, "height": ann.height, "instances": insts}


def _require(rec: dict, key: str, types, lineno: int):
    if key not in rec:
        raise AnnotationError("missing required field", line=lineno, field=key)
    val = rec[key]
    if isinstance(val, bool) or not isinstance(val, types):
        raise AnnotationError(f"wrong type {type(val).__name__}", line=lineno, field=key)
    return val


def annotation_from_dict(rec, lineno: int = 0) -> SceneAnnotation:
    if not isinstance(rec, dict):
        raise AnnotationError("record must be a JSON object", line=lineno)
    image_id = _require(rec, "image_id", str, lineno)
    width = _require(rec, "width", int, lineno)
    height = _require(rec, "height", int, lineno)
    raw_insts = _require(rec, "instances", list, lineno)
    insts = []
    for k, r in enumerate(raw_insts):
        if not isinstance(r, dict):
            raise AnnotationError("instance must be an object", line=lineno, field=f"instances[{k}]")
        kind = _require(r, "kind", str, lineno)
        if kind not in KINDS:
            raise AnnotationError(f"unknown kind {kind!r}", line=lineno, field="kind")
        pts = _points(_require(r, "points", list, lineno), lineno)
        text = _require(r, "text", str, lineno)
        conf = r.get("conf")
        if conf is not None and (isinstance(conf, bool) or not isinstance(conf, (int, float))):
            raise AnnotationError("wrong type", line=lineno, field="conf")
        ignore = r.get("ignore", False)
        if not isinstance(ignore, bool):
            raise AnnotationError("wrong type", line=lineno, field="ignore")
        try:
            insts.append(TextInstance(make_shape(kind, pts), text,
                                      None if conf is None else float(conf), ignore))
        except GeometryError as exc:
            raise AnnotationError(str(exc), line=lineno, field="points") from None
        except AnnotationError as exc:
            raise AnnotationError(exc.reason, line=lineno, field=exc.field) from None
    try:
        return SceneAnnotation(image_id, width, height, tuple(insts))
    except AnnotationError as exc:
        raise AnnotationError(exc.reason, line=lineno, field=exc.field) from None


def iter_canonical(lines: Iterable[str]) -> Iterator[SceneAnnotation]:
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AnnotationError(f"bad JSON: {exc.msg}", line=lineno) from None
        yield annotation_from_dict(rec, lineno)


def read_canonical(path: str | os.PathLike) -> list[SceneAnnotation]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_canonical(fh))


def write_canonical(annotations: Iterable[SceneAnnotation], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ann in annotations:
            fh.write(json.dumps(annotation_to_dict(ann), ensure_ascii=False) + "\n")


# -- weak-label filtering ---------------------------------------------------------------

def filter_weak(ann: SceneAnnotation, min_conf: float = 0.9, min_size_px: float = 32) -> SceneAnnotation:
    """Keep pseudo-label instances with confidence > ``min_conf`` and a bounding-box
    short side > ``min_size_px``; both comparisons are strict."""
    kept = []
    for k, inst in enumerate(ann.instances):
        if inst.confidence is None:
            raise AnnotationError(f"instance {k} of {ann.image_id!r} has no confidence", field="conf")
        if inst.confidence > min_conf and bbox_short_side(inst.shape) > min_size_px:
            kept.append(inst)
    return replace(ann, instances=tuple(kept))
