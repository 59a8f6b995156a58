"""Pure-numpy convolution kernels (im2col + BLAS matmul)."""

import numpy as np


def _im2col(inp, kh, kw, stride, oh, ow):
    n, c, _, _ = inp.shape
    cols = np.empty((n, c, kh, kw, oh, ow), dtype=inp.dtype)
    for ky in range(kh):
        for kx in range(kw):
            cols[:, :, ky, kx] = inp[
                :, :, ky : ky + stride * oh : stride, kx : kx + stride * ow : stride
            ]
    return cols


def conv2d_forward(inp_pad, weight, bias, stride):
    """Cross-correlate a padded NCHW batch with OIHW weights."""
    n, _, hp, wp = inp_pad.shape
    c_out, c_in, kh, kw = weight.shape
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    cols = _im2col(inp_pad, kh, kw, stride, oh, ow)
    mat = cols.transpose(0, 4, 5, 1, 2, 3).reshape(n * oh * ow, c_in * kh * kw)
    out = mat @ weight.reshape(c_out, -1).T
    out += bias
    return np.ascontiguousarray(out.reshape(n, oh, ow, c_out).transpose(0, 3, 1, 2))


def conv2d_backward_input(grad_out, weight, stride, padded_shape):
    """Gradient w.r.t. the padded input (col2im scatter of grad columns)."""
    n, c_out, oh, ow = grad_out.shape
    _, c_in, kh, kw = weight.shape
    g_mat = grad_out.transpose(0, 2, 3, 1).reshape(n * oh * ow, c_out)
    dcols = g_mat @ weight.reshape(c_out, -1)
    dcols = dcols.reshape(n, oh, ow, c_in, kh, kw).transpose(0, 3, 4, 5, 1, 2)
    dinp = np.zeros(padded_shape, dtype=grad_out.dtype)
    for ky in range(kh):
        for kx in range(kw):
            dinp[
                :, :, ky : ky + stride * oh : stride, kx : kx + stride * ow : stride
            ] += dcols[:, :, ky, kx]
    return dinp


def conv2d_backward_weight(grad_out, inp_pad, stride, weight_shape):
    """Gradient w.r.t. the weights."""
    n, c_out, oh, ow = grad_out.shape
    _, c_in, kh, kw = weight_shape
    cols = _im2col(inp_pad, kh, kw, stride, oh, ow)
    mat = cols.transpose(0, 4, 5, 1, 2, 3).reshape(n * oh * ow, c_in * kh * kw)
    g_mat = grad_out.transpose(0, 2, 3, 1).reshape(n * oh * ow, c_out)
    return (g_mat.T @ mat).reshape(weight_shape)
