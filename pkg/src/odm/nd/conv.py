"""2-D convolution and nearest-neighbour upsampling on NCHW arrays."""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .array import Array, ShapeError, ContractError, _node


def _windows(xp: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    # (N, C, Ho, Wo, kh, kw) view, no copy
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    return win[:, :, ::stride, ::stride]


def conv2d(x: Array, w: Array, b: Array | None = None, stride: int = 1, pad: int = 0) -> Array:
    """Cross-correlation of ``x`` (N,C,H,W) with ``w`` (O,C,kh,kw), zero padding ``pad``."""
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeError(f"conv2d: expected 4-D input and weight, got {x.shape} and {w.shape}")
    if x.shape[1] != w.shape[1]:
        raise ShapeError(f"conv2d: input channels {x.shape} do not match weight {w.shape}")
    if stride < 1 or pad < 0:
        raise ContractError("conv2d: stride must be >= 1 and pad >= 0")
    if b is not None and b.shape != (w.shape[0],):
        raise ShapeError(f"conv2d: bias shape {b.shape} does not match weight {w.shape}")
    n, c, h, wd = x.shape
    o, _, kh, kw = w.shape
    if h + 2 * pad < kh or wd + 2 * pad < kw:
        raise ShapeError(f"conv2d: kernel {w.shape} larger than padded input {x.shape}")

    xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x.data
    win = _windows(xp, kh, kw, stride)
    ho, wo = win.shape[2], win.shape[3]
    # columns laid out (N, C*kh*kw, Ho*Wo) so the product lands directly in NCHW
    if kh == 1 and kw == 1:
        cols = np.ascontiguousarray(win[..., 0, 0]).reshape(n, c, ho * wo)
    else:
        cols = win.transpose(0, 1, 4, 5, 2, 3).reshape(n, c * kh * kw, ho * wo)
    wmat = w.data.reshape(o, -1)
    out = wmat @ cols
    if b is not None:
        out += b.data[:, None]
    out = out.reshape(n, o, ho, wo)

    def grad_fn(g):
        g3 = g.reshape(n, o, ho * wo)
        gw = (g3 @ cols.transpose(0, 2, 1)).sum(axis=0).reshape(w.shape)
        gb = g3.sum(axis=(0, 2)) if b is not None else None
        gx = None
        if x.requires_grad:
            gcols = (wmat.T @ g3).reshape(n, c, kh, kw, ho, wo)
            if kh == 1 and kw == 1 and stride == 1 and not pad:
                gx = gcols[:, :, 0, 0]
            else:
                gxp = np.zeros(xp.shape, dtype=g.dtype)
                for i in range(kh):
                    for j in range(kw):
                        gxp[:, :, i:i + stride * ho:stride, j:j + stride * wo:stride] += gcols[:, :, i, j]
                gx = gxp[:, :, pad:pad + h, pad:pad + wd] if pad else gxp
        return (gx, gw) if b is None else (gx, gw, gb)

    parents = (x, w) if b is None else (x, w, b)
    return _node(out, parents, grad_fn)


def upsample_nearest(x: Array, factor: int) -> Array:
    """Replicate every pixel of an NCHW array into a ``factor`` x ``factor`` block."""
    if factor < 1 or int(factor) != factor:
        raise ContractError(f"upsample_nearest: factor must be a positive integer, got {factor}")
    if x.ndim != 4:
        raise ShapeError(f"upsample_nearest: expected NCHW, got {x.shape}")
    f = int(factor)
    out = x.data.repeat(f, axis=2).repeat(f, axis=3)
    n, c, h, w = x.shape

    def grad_fn(g):
        return (g.reshape(n, c, h, f, w, f).sum(axis=(3, 5)),)

    return _node(out, (x,), grad_fn)


def avg_pool_global(x: Array) -> Array:
    """Mean over the spatial axes of an NCHW array -> (N, C)."""
    return x.mean(axis=(2, 3))
