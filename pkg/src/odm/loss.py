"""Training objectives: pixel BCE, feature-space L1 through a frozen conv pyramid,
symmetric image/text contrastive loss, and their weighted sum."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import nd
from .nd import Array, ContractError, ShapeError

BCE_EPS = 1e-7


class NumericError(FloatingPointError):
    """A loss component is not finite; ``component`` names which one."""

    def __init__(self, component: str, value):
        self.component = component
        super().__init__(f"loss component {component!r} is not finite ({value})")


@dataclass(frozen=True)
class LossWeights:
    alpha: float = 1.0   # segmentation
    beta: float = 1.0    # feature-space L1
    gamma: float = 0.5   # contrastive

    def __post_init__(self):
        for k in ("alpha", "beta", "gamma"):
            v = getattr(self, k)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"loss weight {k} must be finite and >= 0, got {v}")


def _as_target(target, like: Array) -> np.ndarray:
    if isinstance(target, Array):
        target = target.data
    elif isinstance(target, (list, tuple)):
        target = np.stack([getattr(t, "pixels", t) for t in target])
    else:
        target = getattr(target, "pixels", target)
    target = np.asarray(target, dtype=like.dtype)
    if target.ndim == like.ndim - 1:
        target = target[:, None]
    if target.shape != like.shape:
        raise ShapeError(f"target {target.shape} does not match prediction {like.shape}")
    return target


def seg_loss(logits: Array, target, eps: float = BCE_EPS) -> Array:
    """Mean binary cross-entropy of sigmoid(logits) against a {0,1} target.

    Probabilities are clamped to [eps, 1 - eps] before the log; the gradient
    is (p - y) / N and is not cut off by the clamp.
    """
    return nd.bce_with_logits(logits, _as_target(target, logits), eps)


# -- feature-space distance ---------------------------------------------------------------

class FeatureExtractor:
    """Frozen conv pyramid: conv + ReLU per layer (3x3, stride 2 by default).

    Weights are drawn once from ``seed`` (He-normal) unless given explicitly
    and are never handed to an optimizer.
    """

    def __init__(self, channels: Sequence[int] = (8, 16, 32), in_channels: int = 3, seed: int = 0,
                 weights: Sequence[tuple[np.ndarray, np.ndarray]] | None = None, dtype=np.float32,
                 strides: Sequence[int] | None = None):
        if weights is None:
            rng = np.random.default_rng(seed)
            weights, cin = [], in_channels
            for cout in channels:
                w = rng.normal(0, math.sqrt(2.0 / (cin * 9)), (cout, cin, 3, 3))
                weights.append((w, np.zeros(cout)))
                cin = cout
        self.layers = []
        for w, b in weights:
            w = np.array(w, dtype=dtype)
            b = np.array(b, dtype=dtype)
            w.flags.writeable = False
            b.flags.writeable = False
            self.layers.append((Array(w), Array(b)))
        self.in_channels = self.layers[0][0].shape[1]
        self.strides = list(strides) if strides is not None else [2] * len(self.layers)
        if len(self.strides) != len(self.layers):
            raise ValueError("one stride per layer")

    @classmethod
    def from_file(cls, path: str | os.PathLike, dtype=np.float32) -> "FeatureExtractor":
        """Load ``w0, b0, w1, b1, ...`` from an ``.npz`` archive."""
        with np.load(path) as z:
            n = len([k for k in z.files if k.startswith("w")])
            return cls(weights=[(z[f"w{i}"], z[f"b{i}"]) for i in range(n)], dtype=dtype)

    def astype(self, dtype) -> "FeatureExtractor":
        return FeatureExtractor(weights=[(w.data, b.data) for w, b in self.layers], dtype=dtype,
                                strides=self.strides)

    def __call__(self, x: Array) -> list[Array]:
        if x.ndim != 4:
            raise ShapeError(f"feature extractor expects NCHW, got {x.shape}")
        if x.shape[1] == 1 and self.in_channels != 1:
            x = nd.concat([x] * self.in_channels, axis=1)
        if x.shape[1] != self.in_channels:
            raise ShapeError(f"feature extractor expects {self.in_channels} channels, got {x.shape[1]}")
        feats = []
        for (w, b), stride in zip(self.layers, self.strides):
            x = nd.relu(nd.conv2d(x, w, b, stride=stride, pad=w.shape[-1] // 2))
            feats.append(x)
        return feats


def ocr_lpips(pred_probs: Array, target, fx: FeatureExtractor) -> Array:
    """Sum over pyramid layers of the L1 feature distance divided by H_l * W_l, averaged over the batch."""
    if not isinstance(target, Array):
        target = Array(_as_target(target, pred_probs))
    if target.shape != pred_probs.shape:
        raise ShapeError(f"target {target.shape} does not match prediction {pred_probs.shape}")
    fp = fx(pred_probs)
    if target.requires_grad:
        ft = fx(target)
    else:
        with nd.no_grad():
            ft = fx(target)
    bsz = pred_probs.shape[0]
    total = None
    for a, b in zip(fp, ft):
        h, w = a.shape[2:]
        term = nd.sum_(nd.abs_(a - b)) * (1.0 / (h * w * bsz))
        total = term if total is None else total + term
    return total


# -- contrastive -------------------------------------------------------------------------

@dataclass
class EmbeddingBatch:
    image: Array   # (B, d)
    text: Array    # (B, d); row i is the positive for image row i

    def __post_init__(self):
        if self.image.ndim != 2 or self.image.shape != self.text.shape:
            raise ShapeError(f"embedding batch: image {self.image.shape} vs text {self.text.shape}")


def batch_contrastive(e: EmbeddingBatch, temperature: float = 1.0) -> Array:
    """Image->text plus text->image cross-entropy over cosine similarities / temperature."""
    if temperature <= 0:
        raise ContractError("temperature must be positive")
    try:
        i = nd.l2_normalize(e.image)
        t = nd.l2_normalize(e.text)
    except ContractError:
        raise ContractError("batch_contrastive: zero-norm embedding row") from None
    bsz = i.shape[0]
    sim = (i @ nd.transpose(t)) * (1.0 / temperature)
    eye = Array(np.eye(bsz, dtype=sim.dtype))
    i2t = -nd.sum_(nd.log_softmax(sim) * eye) * (1.0 / bsz)
    t2i = -nd.sum_(nd.log_softmax(nd.transpose(sim)) * eye) * (1.0 / bsz)
    return i2t + t2i


# -- weighted total -----------------------------------------------------------------------

def _value(x) -> float:
    return float(x.data) if isinstance(x, Array) else float(x)


def total_loss(seg, ocr, bc, w: LossWeights = LossWeights()):
    """alpha * seg + beta * ocr + gamma * bc. ``None`` components count as zero."""
    parts = {"seg": (seg, w.alpha), "ocr": (ocr, w.beta), "bc": (bc, w.gamma)}
    out = 0.0
    for name, (val, weight) in parts.items():
        if val is None:
            continue
        v = _value(val)
        if not math.isfinite(v):
            raise NumericError(name, v)
        out = out + val * weight
    return out
