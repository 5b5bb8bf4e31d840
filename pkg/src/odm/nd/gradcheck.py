"""Central finite-difference checks against reverse-mode gradients."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .array import Array, backward


@dataclass
class GradCheckReport:
    """Outcome of a finite-difference comparison.

    ``errors`` maps a label (parameter name or ``"x"``) to the per-coordinate
    relative errors that were checked. ``failures`` lists ``(label, flat_index,
    autodiff, numeric)`` for coordinates at or above ``tol``.
    """

    tol: float
    errors: dict[str, np.ndarray] = field(default_factory=dict)
    failures: list[tuple[str, int, float, float]] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        if not self.errors:
            return 0.0
        return max(float(e.max(initial=0.0)) for e in self.errors.values())

    @property
    def passed(self) -> bool:
        return self.max_error < self.tol

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} max_rel_error={self.max_error:.3e} tol={self.tol:.1e}"


def relative_error(auto: np.ndarray, numeric: np.ndarray, scale_floor: float = 1e-3) -> np.ndarray:
    """|a - n| / max(|a|, |n|, floor).

    ``floor`` is ``scale_floor`` times the largest numeric gradient magnitude,
    so coordinates far below the gradient's own scale are compared on that scale
    instead of amplifying finite-difference round-off.
    """
    auto = np.asarray(auto, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    floor = scale_floor * float(np.abs(numeric).max(initial=0.0))
    denom = np.maximum(np.maximum(np.abs(auto), np.abs(numeric)), max(floor, 1e-300))
    return np.abs(auto - numeric) / denom


def _numeric(f: Callable[[], float], buf: np.ndarray, flat_idx: np.ndarray, h: float) -> np.ndarray:
    """Kink-aware finite differences.

    Each coordinate gets a central, a left and a right estimate, each
    Richardson-extrapolated from steps h and h/2. The estimate whose two step
    sizes agree best is kept, so a ReLU or |x| kink lying inside the stencil on
    one side does not pollute the result. A smooth function always selects
    the central estimate up to O(h^2) noise.
    """
    flat = buf.reshape(-1)
    out = np.empty(len(flat_idx))
    for k, i in enumerate(flat_idx):
        orig = flat[i]
        vals = {}
        for step in (0.0, h, h / 2, -h / 2, -h):
            flat[i] = orig + step
            vals[step] = f()
        flat[i] = orig
        f0, p1, p2, m2, m1 = vals[0.0], vals[h], vals[h / 2], vals[-h / 2], vals[-h]
        c1, c2 = (p1 - m1) / (2 * h), (p2 - m2) / h
        r1, r2 = (p1 - f0) / h, (p2 - f0) / (h / 2)
        l1, l2 = (f0 - m1) / h, (f0 - m2) / (h / 2)
        candidates = [
            (abs(c1 - c2), (4 * c2 - c1) / 3),
            (abs(r1 - r2), 2 * r2 - r1),
            (abs(l1 - l2), 2 * l2 - l1),
        ]
        out[k] = min(candidates, key=lambda t: t[0])[1]
    return out


def grad_check(f: Callable[[Array], Array], x: np.ndarray, h: float = 1e-5,
               tol: float = 1e-5, indices=None, scale_floor: float = 1e-3) -> GradCheckReport:
    """Compare autodiff of scalar ``f`` at ``x`` with central differences.

    ``indices`` optionally restricts the check to some flat coordinates.
    """
    x = np.array(x, dtype=np.float64)
    leaf = Array(x, requires_grad=True)
    out = f(leaf)
    backward(out, [leaf])
    auto = leaf.grad.reshape(-1)
    idx = np.arange(x.size) if indices is None else np.asarray(indices)

    def value():
        return float(f(Array(x)).data)

    numeric = _numeric(value, x, idx, h)
    return _report({"x": (auto[idx], numeric, idx)}, tol, scale_floor)


def check_params(loss_fn: Callable[[], Array], params: Mapping[str, Array], h: float = 1e-5,
                 tol: float = 1e-5, per_param: int | None = None, seed: int = 0,
                 scale_floor: float = 1e-3) -> GradCheckReport:
    """Finite-difference check of ``loss_fn`` w.r.t. named parameter arrays.

    Parameters are perturbed in place. ``per_param`` samples that many
    coordinates from each array (all of them when None).
    """
    for p in params.values():
        p.grad = None
    loss = loss_fn()
    backward(loss, list(params.values()))
    rng = np.random.default_rng(seed)
    parts = {}
    for name, p in params.items():
        n = p.size
        if per_param is None or per_param >= n:
            idx = np.arange(n)
        else:
            idx = np.sort(rng.choice(n, size=per_param, replace=False))
        auto = p.grad.reshape(-1)[idx].astype(np.float64)
        numeric = _numeric(lambda: float(loss_fn().data), p.data, idx, h)
        parts[name] = (auto, numeric, idx)
    for p in params.values():
        p.grad = None
    return _report(parts, tol, scale_floor)


def _report(parts, tol, scale_floor) -> GradCheckReport:
    report = GradCheckReport(tol=tol)
    # one floor for the whole check so every group is judged on the same scale
    all_numeric = np.concatenate([n for _, n, _ in parts.values()]) if parts else np.zeros(0)
    scale = float(np.abs(all_numeric).max(initial=0.0))
    for name, (auto, numeric, idx) in parts.items():
        floor = scale_floor * scale
        denom = np.maximum(np.maximum(np.abs(auto), np.abs(numeric)), max(floor, 1e-300))
        err = np.abs(auto - numeric) / denom
        report.errors[name] = err
        for k in np.flatnonzero(err >= tol):
            report.failures.append((name, int(idx[k]), float(auto[k]), float(numeric[k])))
    return report
