"""Prompt augmentation: keep a random subset of the real instances as prompts
(the rest become background in the target) and inject prompts for text that is
not in the image (which must reconstruct to nothing)."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .annot import SceneAnnotation
from .glyph import GlyphSet, LabelCanvas, render_label
from .model import CHARSET, MAX_INSTANCES, Charset, TokenBatch, tokenize

log = logging.getLogger(__name__)

# noise strings draw from visible ASCII; a space-only string would be an invisible prompt
NOISE_ALPHABET = tuple(chr(c) for c in range(0x21, 0x7F))
NOISE_LEN = (3, 8)


def _range(v, name, lo=None, hi=None, cast=float):
    pair = (v, v) if isinstance(v, (int, float)) else tuple(v)
    if len(pair) != 2:
        raise ValueError(f"{name} must be a number or a [low, high] pair")
    a, b = cast(pair[0]), cast(pair[1])
    if a > b:
        raise ValueError(f"{name} range is reversed: {pair}")
    if (lo is not None and a < lo) or (hi is not None and b > hi):
        raise ValueError(f"{name} must lie within [{lo}, {hi}], got {pair}")
    return a, b


@dataclass
class ControllerConfig:
    drop_keep_ratio: float | tuple[float, float] = (0.0, 1.0)
    noise_count: int | tuple[int, int] = (0, 3)
    seed: int = 0
    drop: bool = True
    noise: bool = True

    def __post_init__(self):
        self.keep_range = _range(self.drop_keep_ratio, "drop_keep_ratio", 0.0, 1.0)
        self.noise_range = _range(self.noise_count, "noise_count", 0, MAX_INSTANCES, cast=int)


@dataclass
class ControlledSample:
    kept: tuple[int, ...]
    noise: tuple[str, ...]
    prompts: tuple[str, ...]           # kept transcriptions then noise strings
    tokens: TokenBatch                 # single row, B = 1
    target: LabelCanvas
    ratio: float = 1.0
    extras: dict = field(default_factory=dict)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def apply_drop(instances: Sequence, ratio: float, rng: np.random.Generator) -> tuple[int, ...]:
    """Indices of round_half_up(ratio * n) instances chosen uniformly without replacement."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"keep ratio must be within [0, 1], got {ratio}")
    n = len(instances)
    k = min(n, round_half_up(ratio * n))
    if k == n:
        return tuple(range(n))
    return tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))


def apply_noise(real_texts: Sequence[str], count: int, rng: np.random.Generator,
                charset: Charset = CHARSET, existing: int | None = None,
                capacity: int = MAX_INSTANCES) -> list[str]:
    """``count`` random strings of length 3-8 that differ from every real transcription.

    ``existing`` is the number of prompts already present (defaults to
    ``len(real_texts)``); the count is clipped so the total fits ``capacity``.
    """
    existing = len(real_texts) if existing is None else existing
    room = max(0, capacity - existing)
    if count > room:
        log.warning("noise count %d clipped to %d (capacity %d)", count, room, capacity)
        count = room
    alphabet = [c for c in NOISE_ALPHABET if c in charset]
    forbidden = set(real_texts)
    out = []
    while len(out) < count:
        n = int(rng.integers(NOISE_LEN[0], NOISE_LEN[1] + 1))
        s = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), size=n))
        if s not in forbidden:
            out.append(s)
    return out


def rebuild_target(ann: SceneAnnotation, kept, glyphs: GlyphSet, size: tuple[int, int]) -> LabelCanvas:
    """Label of the kept instances only; everything else is background."""
    return render_label(ann, glyphs, size, keep=kept)


class TextController:
    """Applies drop and noise to one annotated sample with a per-sample rng stream."""

    def __init__(self, config: ControllerConfig | None = None, glyphs: GlyphSet | None = None,
                 size: tuple[int, int] = (128, 128), charset: Charset = CHARSET):
        from .glyph import builtin_font
        self.config = config or ControllerConfig()
        self.glyphs = glyphs or builtin_font()
        self.size = size
        self.charset = charset
        self._cache: dict = {}

    def rng(self, step: int, index: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, step, index])

    def instance_canvas(self, ann: SceneAnnotation, k: int) -> np.ndarray:
        key = (ann, k)
        if key not in self._cache:
            self._cache[key] = render_label(ann, self.glyphs, self.size, keep={k}).pixels
        return self._cache[key]

    def target_from_cache(self, ann: SceneAnnotation, kept) -> LabelCanvas:
        """Same pixels as :func:`rebuild_target`, assembled from cached per-instance canvases."""
        w, h = self.size
        px = np.zeros((h, w), dtype=np.uint8)
        for k in kept:
            if not ann.instances[k].ignore:
                px |= self.instance_canvas(ann, k)
        return LabelCanvas(w, h, px, tuple(k for k in kept if not ann.instances[k].ignore))

    def __call__(self, ann: SceneAnnotation, step: int = 0, index: int = 0,
                 rng: np.random.Generator | None = None) -> ControlledSample:
        cfg = self.config
        rng = rng or self.rng(step, index)
        usable = [k for k, inst in enumerate(ann.instances) if not inst.ignore]
        ratio = 1.0
        if cfg.drop:
            lo, hi = cfg.keep_range
            ratio = float(rng.uniform(lo, hi)) if hi > lo else lo
            picked = apply_drop(usable, ratio, rng)
            kept = tuple(usable[i] for i in picked)
        else:
            kept = tuple(usable)
        kept = kept[:MAX_INSTANCES]
        noise: list[str] = []
        if cfg.noise:
            lo, hi = cfg.noise_range
            count = int(rng.integers(lo, hi + 1))
            noise = apply_noise([inst.text for inst in ann.instances], count, rng, self.charset,
                                existing=len(kept))
        prompts = tuple(ann.instances[k].text for k in kept) + tuple(noise)
        return ControlledSample(kept, tuple(noise), prompts, tokenize([list(prompts)]),
                                self.target_from_cache(ann, kept), ratio)
