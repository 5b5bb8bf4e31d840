"""Minimal numpy-backed array engine with reverse-mode autodiff."""
from .array import (
    Array,
    ContractError,
    ShapeError,
    abs_,
    add,
    backward,
    bce_with_logits,
    clip,
    concat,
    div,
    embedding,
    exp,
    expand,
    l2_normalize,
    layer_norm,
    log,
    log_softmax,
    matmul,
    mean,
    mul,
    no_grad,
    relu,
    reshape,
    sigmoid,
    softmax,
    sub,
    sum_,
    swapaxes,
    take,
    transpose,
)
from .conv import avg_pool_global, conv2d, upsample_nearest
from .gradcheck import GradCheckReport, check_params, grad_check, relative_error

__all__ = [
    "Array", "ContractError", "ShapeError", "abs_", "add", "avg_pool_global", "backward", "bce_with_logits",
    "check_params", "clip", "concat", "conv2d", "div", "embedding", "exp", "expand",
    "grad_check", "GradCheckReport", "l2_normalize", "layer_norm", "log", "log_softmax",
    "matmul", "mean", "mul", "no_grad", "relative_error", "relu", "reshape", "sigmoid",
    "softmax", "sub", "sum_", "swapaxes", "take", "transpose", "upsample_nearest",
]
