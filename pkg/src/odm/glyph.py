"""Destylized label rendering: fill each character slot with a plain font glyph.

A glyph lives in a unit em box (x to the right, y down). For every slot the
box is laid over the slot's extent in a frame rotated by the slot angle, so
the glyph is stretched to fill the slot. Coverage is estimated with a 4x4
sub-pixel grid, restricted to the slot quad, and thresholded at 0.5; the label
is the union of all characters.
"""
from __future__ import annotations

import logging
import math
import os
import struct
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import _fontdata
from .annot import SceneAnnotation, TextInstance, make_shape
from .geom import (BezierPair, CharSlot, GeometryError, Polygon, Quad, char_slots_bezier,
                   char_slots_quad, points_in_polygon, polygon_to_bezier)

log = logging.getLogger(__name__)

COVERAGE_THRESHOLD = 0.5
SUBSAMPLES = 4
PRINTABLE = [chr(c) for c in range(0x20, 0x7F)]


class FontError(ValueError):
    """Font file missing, truncated or not a supported vector font."""


@dataclass(frozen=True)
class Glyph:
    coverage: np.ndarray  # (h, w) float in [0, 1], em box
    advance: float        # em units (fraction of em height)

    @property
    def empty(self) -> bool:
        return not (self.coverage >= COVERAGE_THRESHOLD).any()


def _fallback_box(h: int, w: int) -> np.ndarray:
    img = np.zeros((h, w))
    y0, y1, x0, x1 = h // 6, h - h // 6 - 1, w // 8, w - w // 8 - 1
    t = max(1, min(h, w) // 10)
    img[y0:y1 + 1, x0:x0 + t] = 1
    img[y0:y1 + 1, x1 - t + 1:x1 + 1] = 1
    img[y0:y0 + t, x0:x1 + 1] = 1
    img[y1 - t + 1:y1 + 1, x0:x1 + 1] = 1
    return img


class GlyphSet:
    """Character -> Glyph with a fallback for anything the source does not cover."""

    def __init__(self, glyphs: dict[str, Glyph], fallback: Glyph, source: str,
                 loader: Callable[[str], Glyph | None] | None = None):
        self._glyphs = dict(glyphs)
        self.fallback = fallback
        self.source = source
        self._loader = loader

    def __contains__(self, ch: str) -> bool:
        return ch in self._glyphs or (self._loader is not None and self[ch] is not self.fallback)

    def __getitem__(self, ch: str) -> Glyph:
        g = self._glyphs.get(ch)
        if g is None and self._loader is not None:
            g = self._loader(ch)
            if g is not None:
                self._glyphs[ch] = g
        return self.fallback if g is None else g

    lookup = __getitem__


def builtin_font() -> GlyphSet:
    """Embedded monospace bitmap font covering printable ASCII."""
    w, h = _fontdata.WIDTH, _fontdata.HEIGHT
    glyphs = {}
    for ch, rows in _fontdata.GLYPHS.items():
        bits = np.array([[(r >> (w - 1 - c)) & 1 for c in range(w)] for r in rows], dtype=float)
        glyphs[ch] = Glyph(bits, w / h)
    return GlyphSet(glyphs, Glyph(_fallback_box(h, w), w / h), "builtin")


def load_font(path: str | os.PathLike, px: int = 48) -> GlyphSet:
    """Rasterize a TrueType/OpenType font at ``px`` pixels per em height."""
    from fontTools.ttLib import TTFont, TTLibError
    from PIL import Image, ImageDraw, ImageFont

    path = os.fspath(path)
    try:
        tt = TTFont(path, lazy=False)
        cmap = tt.getBestCmap() or {}
        tt["head"]
        tt.close()
        font = ImageFont.truetype(path, px)
    except (OSError, TTLibError, KeyError, AssertionError, ValueError, struct.error) as exc:
        raise FontError(f"cannot load font {path!r}: {type(exc).__name__}: {exc}") from None
    if not cmap:
        raise FontError(f"font {path!r} has no character map")
    ascent, descent = font.getmetrics()
    height = ascent + descent

    def render(ch: str) -> Glyph | None:
        if len(ch) != 1 or ord(ch) not in cmap:
            return None
        adv = max(1, int(round(font.getlength(ch))))
        img = Image.new("L", (adv, height), 0)
        ImageDraw.Draw(img).text((0, 0), ch, fill=255, font=font)
        return Glyph(np.asarray(img, dtype=float) / 255.0, adv / height)

    glyphs = {ch: g for ch in PRINTABLE if (g := render(ch)) is not None}
    if "A" not in glyphs:
        raise FontError(f"font {path!r} does not cover basic Latin")
    fallback = Glyph(_fallback_box(height, max(2, height // 2)), 0.5)
    return GlyphSet(glyphs, fallback, path, loader=render)


# -- rendering ----------------------------------------------------------------------

@dataclass
class LabelCanvas:
    width: int
    height: int
    pixels: np.ndarray                      # (height, width) uint8 in {0, 1}
    rendered: tuple[int, ...] = ()
    skipped: tuple[tuple[int, str], ...] = field(default=())

    def __eq__(self, other):
        return (isinstance(other, LabelCanvas) and self.width == other.width
                and self.height == other.height and np.array_equal(self.pixels, other.pixels))

    def to_png_array(self) -> np.ndarray:
        return (self.pixels * 255).astype(np.uint8)


def scale_instance(inst: TextInstance, sx: float, sy: float) -> TextInstance:
    pts = [(x * sx, y * sy) for x, y in inst.points]
    return TextInstance(make_shape(inst.kind, pts), inst.text, inst.confidence, inst.ignore)


def instance_slots(inst: TextInstance) -> list[CharSlot]:
    """One slot per transcription character, quad or Bezier path by shape kind."""
    n = len(inst.text)
    if n == 0:
        return []
    shape = inst.shape
    if isinstance(shape, Quad):
        return char_slots_quad(shape, n)
    if isinstance(shape, BezierPair):
        return char_slots_bezier(shape, n)
    if isinstance(shape, Polygon):
        if len(shape.points) == 4:
            return char_slots_quad(Quad(shape.points), n)
        return char_slots_bezier(polygon_to_bezier(shape.points), n)
    raise GeometryError(f"unsupported shape {type(shape).__name__}")


def render_char(glyph: Glyph, slot: CharSlot, width: int, height: int) -> tuple[np.ndarray, tuple[int, int]] | None:
    """Binary mask of one glyph in one slot, as (mask, (y0, x0)) over the slot's bounding box."""
    quad = slot.box.as_array()
    x0 = max(0, int(math.floor(quad[:, 0].min())))
    x1 = min(width, int(math.ceil(quad[:, 0].max())))
    y0 = max(0, int(math.floor(quad[:, 1].min())))
    y1 = min(height, int(math.ceil(quad[:, 1].max())))
    if x1 <= x0 or y1 <= y0:
        return None

    c, s = math.cos(slot.angle), math.sin(slot.angle)
    # slot extent along the text direction (u) and across it (v)
    u_corner = quad[:, 0] * c + quad[:, 1] * s
    v_corner = -quad[:, 0] * s + quad[:, 1] * c
    u0, u1 = u_corner.min(), u_corner.max()
    v0, v1 = v_corner.min(), v_corner.max()
    if u1 - u0 <= 0 or v1 - v0 <= 0:
        return None

    k = SUBSAMPLES
    offs = (np.arange(k) + 0.5) / k
    ys = (np.arange(y0, y1)[:, None] + offs[None, :]).reshape(-1)
    xs = (np.arange(x0, x1)[:, None] + offs[None, :]).reshape(-1)
    sx, sy = np.meshgrid(xs, ys)
    inside = points_in_polygon(sx, sy, quad)

    gh, gw = glyph.coverage.shape
    gu = ((sx * c + sy * s) - u0) / (u1 - u0)
    gv = ((-sx * s + sy * c) - v0) / (v1 - v0)
    col = np.clip(np.floor(gu * gw).astype(int), 0, gw - 1)
    row = np.clip(np.floor(gv * gh).astype(int), 0, gh - 1)
    ink = glyph.coverage[row, col] >= COVERAGE_THRESHOLD
    hit = (inside & ink).astype(np.float64)
    cov = hit.reshape(y1 - y0, k, x1 - x0, k).mean(axis=(1, 3))
    return (cov >= COVERAGE_THRESHOLD).astype(np.uint8), (y0, x0)


def render_instance(inst: TextInstance, glyphs: GlyphSet, width: int, height: int) -> np.ndarray:
    """Union of the instance's character masks, already in canvas coordinates."""
    out = np.zeros((height, width), dtype=np.uint8)
    for ch, slot in zip(inst.text, instance_slots(inst)):
        if ch.isspace():
            continue
        glyph = glyphs[ch]
        if glyph.empty:
            continue
        res = render_char(glyph, slot, width, height)
        if res is None:
            continue
        mask, (y0, x0) = res
        out[y0:y0 + mask.shape[0], x0:x0 + mask.shape[1]] |= mask
    return out


def render_label(ann: SceneAnnotation, glyphs: GlyphSet, size: tuple[int, int],
                 keep: Iterable[int] | None = None) -> LabelCanvas:
    """Destylized binary label of ``ann`` at ``size`` = (W, H).

    ``keep`` restricts rendering to those instance indices (all when None).
    Ignore-flagged instances never render. Instances whose geometry is
    degenerate are skipped and reported in ``LabelCanvas.skipped``.
    """
    width, height = size
    if width <= 0 or height <= 0:
        raise ValueError(f"canvas size must be positive, got {size}")
    n = len(ann.instances)
    keep_set = set(range(n)) if keep is None else set(keep)
    bad = [k for k in keep_set if not 0 <= k < n]
    if bad:
        raise IndexError(f"keep indices {sorted(bad)} out of range for {n} instances")
    sx, sy = width / ann.width, height / ann.height
    pixels = np.zeros((height, width), dtype=np.uint8)
    rendered, skipped = [], []
    for k in sorted(keep_set):
        inst = ann.instances[k]
        if inst.ignore:
            continue
        try:
            mask = render_instance(scale_instance(inst, sx, sy), glyphs, width, height)
        except GeometryError as exc:
            log.warning("%s: instance %d skipped: %s", ann.image_id, k, exc)
            skipped.append((k, str(exc)))
            continue
        pixels |= mask
        rendered.append(k)
    return LabelCanvas(width, height, pixels, tuple(rendered), tuple(skipped))
