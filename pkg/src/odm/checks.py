"""Finite-difference suite over the three losses and the whole model (double precision)."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import nd
from .loss import EmbeddingBatch, FeatureExtractor, batch_contrastive, ocr_lpips, seg_loss, total_loss
from .model import OdmConfig, OdmModel, tokenize
from .nd import Array, GradCheckReport, check_params, grad_check

LOSS_TOL = 1e-5
MODEL_TOL = 1e-3

# small enough that every parameter group can be probed in a few seconds
MICRO_CONFIG = dict(image_size=32, embed_dim=16, stem_channels=4, stage_channels=(4, 8, 8), text_depth=1,
                    text_heads=2, decoder_channels=4, max_instances=4, max_len=8)


@dataclass
class CheckResult:
    name: str
    report: GradCheckReport
    seconds: float

    @property
    def passed(self) -> bool:
        return self.report.passed

    def line(self) -> str:
        return f"{self.name}: {self.report.summary()} ({self.seconds:.1f}s)"


def _timed(name, fn) -> CheckResult:
    t0 = time.perf_counter()
    rep = fn()
    return CheckResult(name, rep, time.perf_counter() - t0)


def run_suite(seed: int = 0, per_param: int = 3) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    y = (rng.random((2, 1, 16, 16)) > 0.7).astype(np.float64)
    fx = FeatureExtractor(seed=seed, dtype=np.float64)
    txt = rng.normal(size=(4, 8))

    results = [
        _timed("seg_loss", lambda: grad_check(lambda z: seg_loss(z, y), rng.normal(size=y.shape), tol=LOSS_TOL)),
        _timed("ocr_lpips", lambda: grad_check(lambda p: ocr_lpips(p, y, fx), rng.random(y.shape), tol=LOSS_TOL)),
        _timed("batch_contrastive", lambda: grad_check(
            lambda e: batch_contrastive(EmbeddingBatch(e, Array(txt))), rng.normal(size=txt.shape), tol=LOSS_TOL)),
    ]

    model = OdmModel(OdmConfig(**MICRO_CONFIG), seed=seed, dtype=np.float64)
    # zero-initialised biases leave ReLU inputs exactly on the kink in dead regions;
    # jitter every parameter so the check runs at a generic point
    for prm in model.params.values():
        prm.data += rng.normal(0, 0.02, prm.shape)
    images = rng.random((2, 3, 32, 32))
    tokens = tokenize([["ab", "c"], ["de"]], max_instances=4, max_len=8)
    target = (rng.random((2, 1, 32, 32)) > 0.8).astype(np.float64)
    small_fx = FeatureExtractor(channels=(4, 4), seed=seed, dtype=np.float64)

    def loss():
        out = model.forward(images, tokens)
        return total_loss(seg_loss(out.logits, target), ocr_lpips(nd.sigmoid(out.logits), target, small_fx),
                          batch_contrastive(EmbeddingBatch(out.img_embed, out.txt_embed)))

    results.append(_timed("end_to_end", lambda: check_params(
        loss, dict(model.named_parameters()), tol=MODEL_TOL, per_param=per_param, seed=seed)))
    return results
