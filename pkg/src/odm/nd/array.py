"""Dense arrays with reverse-mode gradients.

An :class:`Array` wraps a numpy buffer and remembers the op that produced it.
Calling :func:`backward` on a scalar walks the recorded graph once in reverse
topological order and accumulates ``.grad`` on every leaf that requires it.

Binary elementwise ops broadcast along trailing axes only: the shapes must be
equal, or one shape must be a suffix of the other (a bias of shape ``(d,)``
against ``(B, T, d)``). Anything else raises :class:`ShapeError`; use
:func:`expand` when a different broadcast is intended.
"""
from __future__ import annotations

import contextlib
from typing import Callable, Iterable, Sequence

import numpy as np


class ShapeError(ValueError):
    """Operand shapes are incompatible."""


class ContractError(ValueError):
    """An op was called outside its documented preconditions."""


_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Evaluate without recording the graph."""
    global _GRAD_ENABLED
    prev, _GRAD_ENABLED = _GRAD_ENABLED, False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Array:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None,
                 dtype=None):
        if isinstance(data, Array):
            data = data.data
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype.kind in "iub" and requires_grad:
            raise ContractError("integer arrays cannot require grad")
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Array, ...] = ()
        self._backward: Callable | None = None
        self.name = name

    # -- introspection -----------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        tag = f" name={self.name!r}" if self.name else ""
        return f"Array(shape={self.shape}, dtype={self.dtype}{tag})"

    def backward(self):
        backward(self)

    # -- operators ---------------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis, keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis, keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes or None)


def _lift(x, like: Array | None = None) -> Array:
    if isinstance(x, Array):
        return x
    dtype = like.dtype if like is not None and np.isscalar(x) else None
    return Array(np.asarray(x, dtype=dtype))


def _node(data: np.ndarray, parents: Sequence[Array], grad_fn: Callable) -> Array:
    out = Array(data)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = grad_fn
    return out


def _check_trailing(a: tuple, b: tuple, op: str):
    if a == b:
        return
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    if long_[len(long_) - len(short):] != short:
        raise ShapeError(f"{op}: shapes {a} and {b} are not trailing-axis compatible")


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    if g.shape == shape:
        return g
    lead = g.ndim - len(shape)
    return g.sum(axis=tuple(range(lead))) if lead else g


# -- elementwise binary -------------------------------------------------------

def add(a, b) -> Array:
    a, b = _lift(a, b if isinstance(b, Array) else None), _lift(b, a if isinstance(a, Array) else None)
    _check_trailing(a.shape, b.shape, "add")

    def grad_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _node(a.data + b.data, (a, b), grad_fn)


def sub(a, b) -> Array:
    a, b = _lift(a, b if isinstance(b, Array) else None), _lift(b, a if isinstance(a, Array) else None)
    _check_trailing(a.shape, b.shape, "sub")

    def grad_fn(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)

    return _node(a.data - b.data, (a, b), grad_fn)


def mul(a, b) -> Array:
    a, b = _lift(a, b if isinstance(b, Array) else None), _lift(b, a if isinstance(a, Array) else None)
    _check_trailing(a.shape, b.shape, "mul")

    def grad_fn(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _node(a.data * b.data, (a, b), grad_fn)


def div(a, b) -> Array:
    a, b = _lift(a, b if isinstance(b, Array) else None), _lift(b, a if isinstance(a, Array) else None)
    _check_trailing(a.shape, b.shape, "div")
    out = a.data / b.data

    def grad_fn(g):
        return (_unbroadcast(g / b.data, a.shape),
                _unbroadcast(-g * out / b.data, b.shape))

    return _node(out, (a, b), grad_fn)


def matmul(a: Array, b: Array) -> Array:
    """``a @ b`` for 2-D operands, equal-batch N-D operands, or N-D @ 2-D."""
    a, b = _lift(a), _lift(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} are incompatible")
    if b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise ShapeError(f"matmul: batch dims of {a.shape} and {b.shape} differ")
    out = a.data @ b.data

    def grad_fn(g):
        ga = g @ np.swapaxes(b.data, -1, -2)
        if b.ndim == 2 and a.ndim > 2:
            gb = a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1])
        else:
            gb = np.swapaxes(a.data, -1, -2) @ g
        return ga, gb

    return _node(out, (a, b), grad_fn)


# -- elementwise unary --------------------------------------------------------

def exp(x: Array) -> Array:
    out = np.exp(x.data)
    return _node(out, (x,), lambda g: (g * out,))


def log(x: Array) -> Array:
    return _node(np.log(x.data), (x,), lambda g: (g / x.data,))


def relu(x: Array) -> Array:
    pos = x.data > 0
    # np.maximum propagates NaN, so a poisoned input stays visible downstream
    return _node(np.maximum(x.data, 0).astype(x.dtype), (x,), lambda g: (g * pos,))


def sigmoid(x: Array) -> Array:
    d = x.data
    # split by sign so large |x| never overflows exp
    e = np.exp(-np.abs(d))
    out = np.where(d >= 0, 1.0 / (1.0 + e), e / (1.0 + e)).astype(x.dtype)
    return _node(out, (x,), lambda g: (g * out * (1.0 - out),))


def abs_(x: Array) -> Array:
    sign = np.sign(x.data)
    return _node(np.abs(x.data), (x,), lambda g: (g * sign,))


def clip(x: Array, lo: float, hi: float) -> Array:
    """Clamp to ``[lo, hi]``; the gradient is zero where the clamp is active."""
    inside = (x.data >= lo) & (x.data <= hi)
    return _node(np.clip(x.data, lo, hi), (x,), lambda g: (g * inside,))


# -- shape ---------------------------------------------------------------------

def reshape(x: Array, shape) -> Array:
    return _node(x.data.reshape(shape), (x,), lambda g: (g.reshape(x.shape),))


def transpose(x: Array, axes=None) -> Array:
    axes = tuple(reversed(range(x.ndim))) if axes is None else tuple(axes)
    inv = tuple(np.argsort(axes))
    return _node(np.transpose(x.data, axes), (x,), lambda g: (np.transpose(g, inv),))


def swapaxes(x: Array, a1: int, a2: int) -> Array:
    axes = list(range(x.ndim))
    axes[a1], axes[a2] = axes[a2], axes[a1]
    return transpose(x, axes)


def expand(x: Array, shape) -> Array:
    """Explicit numpy-style broadcast of ``x`` to ``shape``."""
    shape = tuple(shape)
    try:
        out = np.broadcast_to(x.data, shape)
    except ValueError:
        raise ShapeError(f"expand: cannot broadcast {x.shape} to {shape}") from None
    lead = len(shape) - x.ndim
    kept = tuple(i + lead for i, n in enumerate(x.shape) if n == 1 and shape[i + lead] != 1)

    def grad_fn(g):
        if lead:
            g = g.sum(axis=tuple(range(lead)))
        if kept:
            g = g.sum(axis=tuple(k - lead for k in kept), keepdims=True)
        return (g,)

    return _node(np.ascontiguousarray(out), (x,), grad_fn)


def concat(xs: Sequence[Array], axis: int = 0) -> Array:
    xs = [_lift(x) for x in xs]
    axis = axis % xs[0].ndim
    for x in xs[1:]:
        if x.ndim != xs[0].ndim or any(
                n != m for i, (n, m) in enumerate(zip(x.shape, xs[0].shape)) if i != axis):
            raise ShapeError(f"concat: shapes {xs[0].shape} and {x.shape} differ off axis {axis}")
    bounds = np.cumsum([0] + [x.shape[axis] for x in xs])

    def grad_fn(g):
        return tuple(np.take(g, np.arange(lo, hi), axis=axis)
                     for lo, hi in zip(bounds[:-1], bounds[1:]))

    return _node(np.concatenate([x.data for x in xs], axis=axis), xs, grad_fn)


def take(x: Array, idx, axis: int = 0) -> Array:
    """Gather ``x`` along ``axis`` at integer indices ``idx`` (any shape)."""
    idx = np.asarray(idx)
    if idx.dtype.kind not in "iu":
        raise ContractError("take: indices must be integers")
    axis = axis % x.ndim
    if idx.size and (idx.min() < 0 or idx.max() >= x.shape[axis]):
        raise ContractError(f"take: index out of range for axis of size {x.shape[axis]}")

    def grad_fn(g):
        full = np.zeros(x.shape, dtype=g.dtype)
        moved = np.moveaxis(full, axis, 0)
        gm = np.moveaxis(g, tuple(range(axis, axis + idx.ndim)), tuple(range(idx.ndim)))
        np.add.at(moved, idx, gm)
        return (full,)

    return _node(np.take(x.data, idx, axis=axis), (x,), grad_fn)


def embedding(table: Array, ids) -> Array:
    """Rows of ``table`` looked up by integer ``ids``; result shape ids.shape + (d,)."""
    return take(table, ids, axis=0)


# -- reductions ----------------------------------------------------------------

def _norm_axis(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a % ndim for a in axis)


def sum_(x: Array, axis=None, keepdims: bool = False) -> Array:
    axes = _norm_axis(axis, x.ndim)
    out = x.data.sum(axis=axes, keepdims=keepdims)

    def grad_fn(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, x.shape).copy(),)

    return _node(np.asarray(out), (x,), grad_fn)


def mean(x: Array, axis=None, keepdims: bool = False) -> Array:
    axes = _norm_axis(axis, x.ndim)
    n = int(np.prod([x.shape[a] for a in axes])) if axes else 1
    return mul(sum_(x, axes, keepdims), 1.0 / n)


def bce_with_logits(logits: Array, target, eps: float = 1e-7) -> Array:
    """Mean binary cross-entropy of sigmoid(logits) against ``target`` (same shape).

    The probability is clamped to [eps, 1 - eps] for the value only; the
    gradient is the closed form (sigmoid(logits) - target) / N everywhere, so
    saturated logits still receive a training signal.
    """
    y = np.asarray(target.data if isinstance(target, Array) else target, dtype=logits.dtype)
    if y.shape != logits.shape:
        raise ShapeError(f"bce_with_logits: logits {logits.shape} vs target {y.shape}")
    d = logits.data
    e = np.exp(-np.abs(d))
    p = np.where(d >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    pc = np.clip(p, eps, 1.0 - eps)
    n = d.size
    val = -(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)).sum() / n

    def grad_fn(g):
        return (g * (p - y) / n,)

    return _node(np.asarray(val, dtype=logits.dtype), (logits,), grad_fn)


# -- normalisations ---------------------------------------------------------------

def softmax(x: Array) -> Array:
    """Softmax over the last axis."""
    z = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(z)
    s = e / e.sum(axis=-1, keepdims=True)

    def grad_fn(g):
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return _node(s, (x,), grad_fn)


def log_softmax(x: Array) -> Array:
    z = x.data - x.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    out = z - lse
    s = np.exp(out)

    def grad_fn(g):
        return (g - s * g.sum(axis=-1, keepdims=True),)

    return _node(out, (x,), grad_fn)


LAYER_NORM_EPS = 1e-5


def layer_norm(x: Array, gamma: Array | None = None, beta: Array | None = None,
               eps: float = LAYER_NORM_EPS) -> Array:
    """Normalise the last axis to zero mean / unit variance, then scale and shift."""
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    parents = [x]
    out = xhat
    if gamma is not None:
        _check_trailing(gamma.shape, x.shape[-1:], "layer_norm")
        out = out * gamma.data
        parents.append(gamma)
    if beta is not None:
        out = out + beta.data
        parents.append(beta)
    def grad_fn(g):
        gx_hat = g * gamma.data if gamma is not None else g
        gx = inv * (gx_hat - gx_hat.mean(axis=-1, keepdims=True)
                    - xhat * (gx_hat * xhat).mean(axis=-1, keepdims=True))
        grads = [gx]
        if gamma is not None:
            grads.append(_unbroadcast(g * xhat, gamma.shape))
        if beta is not None:
            grads.append(_unbroadcast(g, beta.shape))
        return tuple(grads)

    return _node(out.astype(x.dtype, copy=False), parents, grad_fn)


def l2_normalize(x: Array, eps: float = 0.0) -> Array:
    """Scale each row (last axis) to unit Euclidean length.

    Raises ContractError on a zero-norm row unless ``eps`` > 0.
    """
    norm = np.sqrt((x.data * x.data).sum(axis=-1, keepdims=True))
    if eps == 0.0 and np.any(norm == 0):
        raise ContractError("l2_normalize: zero-norm row")
    norm = np.maximum(norm, eps) if eps else norm
    y = x.data / norm

    def grad_fn(g):
        return ((g - y * (g * y).sum(axis=-1, keepdims=True)) / norm,)

    return _node(y, (x,), grad_fn)


# -- backward ----------------------------------------------------------------------

def _topo(root: Array) -> list[Array]:
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def backward(loss: Array, leaves: Iterable[Array] = ()) -> None:
    """Accumulate d(loss)/d(leaf) into ``.grad`` of every reachable leaf.

    ``loss`` must hold a single value. Leaves listed in ``leaves`` that the
    graph never reaches get a zero gradient rather than ``None``.
    """
    if loss.size != 1:
        raise ContractError(f"backward: loss must be scalar, got shape {loss.shape}")
    leaves = list(leaves)
    if loss.requires_grad:
        grads = {id(loss): np.ones_like(loss.data)}
        for node in reversed(_topo(loss)):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for p, pg in zip(node._parents, node._backward(g)):
                if pg is None or not p.requires_grad:
                    continue
                pg = np.asarray(pg, dtype=p.dtype)
                key = id(p)
                grads[key] = pg if key not in grads else grads[key] + pg
    for leaf in leaves:
        if leaf.grad is None:
            leaf.grad = np.zeros_like(leaf.data)
