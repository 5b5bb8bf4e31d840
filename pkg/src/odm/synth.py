"""Synthetic scenes and random annotations for tests, demos and smoke training."""
from __future__ import annotations

import math
import string

import numpy as np
from scipy import ndimage

from .annot import SceneAnnotation, TextInstance
from .geom import BezierPair, CubicBezier, Polygon, Quad
from .glyph import GlyphSet, render_instance

ALPHABET = string.ascii_letters + string.digits
WORDS = ("Ridge", "Rootin", "Toymakers", "OPEN", "Cafe", "EXIT", "Hotel", "Sale", "Pizza", "Bank",
         "STOP", "Taxi", "Park", "Books", "Metro", "Bar", "Shoes", "Tea", "Gym", "Deli", "Wine",
         "Fish", "Bus", "Inn")


def random_word(rng: np.random.Generator, lo: int = 2, hi: int = 8) -> str:
    n = int(rng.integers(lo, hi + 1))
    return "".join(rng.choice(list(ALPHABET), size=n))


def _rot(pts, angle, cx, cy):
    c, s = math.cos(angle), math.sin(angle)
    return [(cx + c * x - s * y, cy + s * x + c * y) for x, y in pts]


def random_quad(rng, width, height) -> Quad:
    w = rng.uniform(0.15, 0.7) * width
    h = rng.uniform(0.06, 0.25) * height
    cx, cy = rng.uniform(0.2, 0.8) * width, rng.uniform(0.2, 0.8) * height
    ang = rng.uniform(-0.6, 0.6)
    jitter = rng.uniform(-0.08, 0.08, size=(4, 2)) * [w, h]
    corners = [(-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)]
    corners = [(x + dx, y + dy) for (x, y), (dx, dy) in zip(corners, jitter)]
    return Quad(tuple(_rot(corners, ang, cx, cy)))


def random_bezier(rng, width, height) -> BezierPair:
    w = rng.uniform(0.3, 0.8) * width
    h = rng.uniform(0.08, 0.2) * height
    cx, cy = rng.uniform(0.3, 0.7) * width, rng.uniform(0.3, 0.7) * height
    bend = rng.uniform(-0.35, 0.35) * h * 3
    xs = [-w / 2, -w / 6, w / 6, w / 2]
    top = [(x, -h / 2 + (bend if 0 < k < 3 else 0)) for k, x in enumerate(xs)]
    bot = [(x, h / 2 + (bend if 0 < k < 3 else 0)) for k, x in enumerate(xs)]
    ang = rng.uniform(-0.4, 0.4)
    return BezierPair(CubicBezier(tuple(_rot(top, ang, cx, cy))), CubicBezier(tuple(_rot(bot, ang, cx, cy))))


def random_polygon(rng, width, height) -> Polygon:
    pair = random_bezier(rng, width, height)
    from .geom import bezier_point
    k = int(rng.integers(3, 8))
    ts = np.linspace(0, 1, k)
    top = [bezier_point(pair.top, float(t)) for t in ts]
    bot = [bezier_point(pair.bottom, float(t)) for t in ts[::-1]]
    return Polygon(tuple(top + bot))


def random_annotation(rng: np.random.Generator, width: int = 256, height: int = 256,
                      max_instances: int = 4, kinds=("quad", "bezier", "polygon"),
                      image_id: str = "rand") -> SceneAnnotation:
    """Annotation with arbitrary (possibly overlapping) regions and random strings."""
    makers = {"quad": random_quad, "bezier": random_bezier, "polygon": random_polygon}
    insts = []
    for _ in range(int(rng.integers(1, max_instances + 1))):
        kind = kinds[int(rng.integers(len(kinds)))]
        text = random_word(rng, 1, 10)
        if rng.random() < 0.2:
            text = text[: len(text) // 2] + " " + text[len(text) // 2:]
        insts.append(TextInstance(makers[kind](rng, width, height), text,
                                  confidence=float(rng.random()), ignore=bool(rng.random() < 0.1)))
    return SceneAnnotation(image_id, width, height, tuple(insts))


def layout_rows(rng, size: int, n: int, height_px=(16, 26)):
    """Place ``n`` horizontal text boxes in distinct rows of a square canvas.

    Boxes shrink below ``height_px`` when a row band is too thin to hold them.
    """
    rows = np.array_split(np.arange(size), n)
    boxes = []
    for band in rows:
        hi = min(height_px[1], len(band) - 2)
        h = int(rng.integers(min(height_px[0], hi), hi + 1))
        y0 = int(rng.integers(band[0] + 1, band[-1] - h + 1)) if band[-1] - h > band[0] + 1 else band[0] + 1
        boxes.append((y0, h))
    return boxes


def make_scene(rng: np.random.Generator, glyphs: GlyphSet, size: int = 128, n_instances=(2, 3),
               words=WORDS, image_id: str = "scene", bold_prob: float = 0.5,
               max_shift: int = 1) -> tuple[np.ndarray, SceneAnnotation]:
    """A styled text image (3, size, size) in [0, 1] plus its annotation.

    Words sit on separate rows in axis-aligned boxes. Styling: random
    background gradient and noise, random text colour, optional bold
    (dilated strokes) and a one-pixel shift relative to the annotation.
    """
    n = int(rng.integers(n_instances[0], n_instances[1] + 1))
    chosen = rng.choice(len(words), size=n, replace=False)
    insts = []
    for (y0, h), wi in zip(layout_rows(rng, size, n), chosen):
        text = words[wi]
        char_w = min(rng.uniform(0.45, 0.6) * h, (size - 4) / len(text))
        w = char_w * len(text)
        x0 = rng.uniform(2, size - 2 - w)
        insts.append(TextInstance(Quad(((x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h))), text))
    ann = SceneAnnotation(image_id, size, size, tuple(insts))

    yy, xx = np.mgrid[0:size, 0:size] / size
    c0, c1 = rng.uniform(0, 1, size=(2, 3))
    t = (xx * rng.uniform(-1, 1) + yy * rng.uniform(-1, 1))
    t = (t - t.min()) / max(np.ptp(t), 1e-6)
    img = (c0[:, None, None] * (1 - t) + c1[:, None, None] * t)
    for inst in insts:
        mask = render_instance(inst, glyphs, size, size).astype(bool)
        if rng.random() < bold_prob:
            mask = ndimage.binary_dilation(mask)
        mask = np.roll(mask, tuple(rng.integers(-max_shift, max_shift + 1, size=2)), axis=(0, 1))
        bg = img[:, mask].mean(axis=1) if mask.any() else np.full(3, 0.5)
        color = np.where(bg > 0.5, rng.uniform(0.0, 0.3, 3), rng.uniform(0.7, 1.0, 3))
        img[:, mask] = color[:, None]
    img = img + rng.normal(scale=0.03, size=img.shape)
    return np.clip(img, 0, 1).astype(np.float32), ann


def make_dataset(n: int, seed: int = 0, size: int = 128, glyphs: GlyphSet | None = None,
                 n_instances=(2, 3), **style) -> list[tuple[np.ndarray, SceneAnnotation]]:
    from .glyph import builtin_font
    glyphs = glyphs or builtin_font()
    rng = np.random.default_rng(seed)
    return [make_scene(rng, glyphs, size, n_instances, image_id=f"synth_{i:04d}", **style) for i in range(n)]
