"""Differentiable neural-network operations.

Convolution dispatches to the selected kernel backend; the remaining ops
are vectorized numpy. All gradients here pass the central finite-difference
suite in tests/test_gradients.py.
"""

import numpy as np

from . import kernels
from .autodiff import Tensor, accumulate_grad, make_node


def conv2d(x: Tensor, weight: Tensor, bias: Tensor, stride: int = 1, pad: int = 0) -> Tensor:
    """2-D cross-correlation over an NCHW batch (no kernel flip).

    Output extent per axis is floor((in + 2*pad - k) / stride) + 1.
    """
    if x.data.ndim != 4 or weight.data.ndim != 4:
        raise ValueError("conv2d expects 4-D input [N,C,H,W] and weight [O,I,kH,kW]")
    n, c_in, h, w = x.data.shape
    c_out, c_in_w, kh, kw = weight.data.shape
    if c_in != c_in_w:
        raise ValueError(
            f"conv2d channel mismatch: input has C_in={c_in}, weight expects {c_in_w}"
        )
    if bias.data.shape != (c_out,):
        raise ValueError(f"conv2d bias shape {bias.data.shape} != ({c_out},)")
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    if pad < 0:
        raise ValueError("pad must be non-negative")
    if kh > h + 2 * pad or kw > w + 2 * pad:
        raise ValueError(
            f"kernel {kh}x{kw} exceeds padded input {h + 2 * pad}x{w + 2 * pad}"
        )

    if pad > 0:
        inp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    else:
        inp = x.data
    out = kernels.conv2d_forward(inp, weight.data, bias.data, stride)

    def bwd(g):
        if weight.requires_grad:
            accumulate_grad(
                weight, kernels.conv2d_backward_weight(g, inp, stride, weight.data.shape)
            )
        if bias.requires_grad:
            accumulate_grad(bias, g.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            dinp = kernels.conv2d_backward_input(g, weight.data, stride, inp.shape)
            if pad > 0:
                dinp = np.ascontiguousarray(dinp[:, :, pad : pad + h, pad : pad + w])
            accumulate_grad(x, dinp)

    return make_node(out, (x, weight, bias), bwd)


class BatchNormState:
    """Running per-channel statistics, updated by train-mode forwards."""

    def __init__(self, channels: int, dtype=np.float32):
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)
        self.batches_seen = 0


def batch_norm2d(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    state: BatchNormState,
    training: bool,
    eps: float = 1e-5,
    momentum: float = 0.1,
) -> Tensor:
    """Per-channel batch normalization over the N, H, W axes.

    Train mode normalizes with biased batch statistics and updates the
    running stats by exponential moving average (the running variance
    stores the unbiased estimate); eval mode uses running stats only.
    """
    n, c, h, w = x.data.shape
    m = n * h * w
    if training:
        if m < 2:
            raise ValueError("batch_norm2d train mode needs N*H*W >= 2")
        mu = x.data.mean(axis=(0, 2, 3))
        var = x.data.var(axis=(0, 2, 3))
        inv_std = 1.0 / np.sqrt(var + eps)
        x_hat = (x.data - mu[None, :, None, None]) * inv_std[None, :, None, None]
        unbiased = var * (m / (m - 1))
        state.running_mean = (1 - momentum) * state.running_mean + momentum * mu
        state.running_var = (1 - momentum) * state.running_var + momentum * unbiased
        state.batches_seen += 1
    else:
        if state.batches_seen == 0:
            raise RuntimeError(
                "batch_norm2d eval mode called before any running stats were recorded"
            )
        mu = state.running_mean
        var = state.running_var
        inv_std = 1.0 / np.sqrt(var + eps)
        x_hat = (x.data - mu[None, :, None, None]) * inv_std[None, :, None, None]

    out = gamma.data[None, :, None, None] * x_hat + beta.data[None, :, None, None]

    def bwd(g):
        if gamma.requires_grad:
            accumulate_grad(gamma, (g * x_hat).sum(axis=(0, 2, 3)))
        if beta.requires_grad:
            accumulate_grad(beta, g.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            scale = (gamma.data * inv_std)[None, :, None, None]
            if training:
                g_mean = g.mean(axis=(0, 2, 3))[None, :, None, None]
                gx_mean = (g * x_hat).mean(axis=(0, 2, 3))[None, :, None, None]
                accumulate_grad(x, scale * (g - g_mean - x_hat * gx_mean))
            else:
                accumulate_grad(x, scale * g)

    return make_node(out, (x, gamma, beta), bwd)


def relu(x: Tensor) -> Tensor:
    """Elementwise max(0, x); subgradient at 0 is 0."""
    mask = x.data > 0
    out = np.where(mask, x.data, 0)

    def bwd(g):
        accumulate_grad(x, g * mask)

    return make_node(out, (x,), bwd)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Affine map x @ weight.T + bias for x [N, F_in], weight [F_out, F_in]."""
    if x.data.ndim != 2 or weight.data.ndim != 2:
        raise ValueError("linear expects 2-D input and weight")
    if x.data.shape[1] != weight.data.shape[1]:
        raise ValueError(
            f"linear feature mismatch: input F_in={x.data.shape[1]}, "
            f"weight F_in={weight.data.shape[1]}"
        )
    out = x.data @ weight.data.T + bias.data

    def bwd(g):
        if x.requires_grad:
            accumulate_grad(x, g @ weight.data)
        if weight.requires_grad:
            accumulate_grad(weight, g.T @ x.data)
        if bias.requires_grad:
            accumulate_grad(bias, g.sum(axis=0))

    return make_node(out, (x, weight, bias), bwd)


def global_avg_pool(x: Tensor) -> Tensor:
    """Spatial mean over H, W: [N,C,H,W] -> [N,C]."""
    n, c, h, w = x.data.shape
    out = x.data.mean(axis=(2, 3))

    def bwd(g):
        accumulate_grad(
            x, np.broadcast_to(g[:, :, None, None] / (h * w), x.data.shape).copy()
        )

    return make_node(out, (x,), bwd)


def weighted_cross_entropy(logits: Tensor, targets, class_weights) -> Tensor:
    """Mean over samples of w[target] * (-log softmax(logits)[target]).

    Log-sum-exp runs with max subtraction for stability. ``class_weights``
    may be a Tensor or a plain array; it receives no gradient.
    """
    targets = np.asarray(targets)
    w = class_weights.data if isinstance(class_weights, Tensor) else np.asarray(class_weights)
    n, k = logits.data.shape
    if targets.shape != (n,):
        raise ValueError(f"targets shape {targets.shape} != ({n},)")
    if targets.min() < 0 or targets.max() >= k:
        raise ValueError(
            f"target index out of range [0, {k}): saw {int(targets.min())}..{int(targets.max())}"
        )
    if w.shape != (k,):
        raise ValueError(f"class_weights shape {w.shape} != ({k},)")
    if np.any(w <= 0):
        raise ValueError("class weights must be positive")

    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    sample_w = w[targets]
    loss = float((-log_probs[np.arange(n), targets] * sample_w).mean())

    def bwd(g):
        if logits.requires_grad:
            probs = np.exp(log_probs)
            d = probs * sample_w[:, None]
            d[np.arange(n), targets] -= sample_w
            accumulate_grad(logits, (g * d / n).astype(logits.data.dtype))

    return make_node(np.asarray(loss, dtype=logits.data.dtype), (logits,), bwd)


def euclidean_distance(a: Tensor, b: Tensor, eps: float = 1e-12) -> Tensor:
    """Row-wise Euclidean distance between [N,D] tensors.

    Composite of primitive ops, so it is covered by their gradient checks;
    ``eps`` keeps the sqrt differentiable when rows coincide.
    """
    diff = a - b
    return ((diff * diff).sum(axis=1) + eps).sqrt()
