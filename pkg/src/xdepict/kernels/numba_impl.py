"""Numba convolution kernels.

The compiled loops only handle unit stride, where the innermost loop runs
over a contiguous row and vectorizes. Strided convolutions are decomposed
into per-phase unit-stride passes over subsampled planes: with stride s,
kernel tap (ky, kx) only ever meets input rows congruent to ky mod s, so
the taps split into s*s independent unit-stride sub-convolutions.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _conv_acc(inp, w, out):
    # out[n,co,oy,ox] += sum_{ci,ky,kx} inp[n,ci,oy+ky,ox+kx] * w[co,ci,ky,kx]
    n_b, c_in, _, _ = inp.shape
    c_out, _, kh, kw = w.shape
    _, _, oh, ow = out.shape
    buf = np.empty(ow, dtype=inp.dtype)
    for n in range(n_b):
        for co in range(c_out):
            for oy in range(oh):
                for ox in range(ow):
                    buf[ox] = out[n, co, oy, ox]
                for ci in range(c_in):
                    for ky in range(kh):
                        src = inp[n, ci, oy + ky]
                        for kx in range(kw):
                            wv = w[co, ci, ky, kx]
                            for ox in range(ow):
                                buf[ox] += wv * src[ox + kx]
                for ox in range(ow):
                    out[n, co, oy, ox] = buf[ox]


@njit(cache=True)
def _conv_dx_acc(g, w, dinp):
    # dinp[n,ci,oy+ky,ox+kx] += g[n,co,oy,ox] * w[co,ci,ky,kx]
    n_b, c_out, oh, ow = g.shape
    _, c_in, kh, kw = w.shape
    for n in range(n_b):
        for co in range(c_out):
            for oy in range(oh):
                grow = g[n, co, oy]
                for ci in range(c_in):
                    for ky in range(kh):
                        dst = dinp[n, ci, oy + ky]
                        for kx in range(kw):
                            wv = w[co, ci, ky, kx]
                            for ox in range(ow):
                                dst[ox + kx] += wv * grow[ox]


@njit(cache=True, fastmath=True)
def _conv_dw(inp, g, dw):
    # dw[co,ci,ky,kx] += sum_{n,oy,ox} g[n,co,oy,ox] * inp[n,ci,oy+ky,ox+kx]
    n_b, c_out, oh, ow = g.shape
    _, c_in, kh, kw = dw.shape
    for co in range(c_out):
        for ci in range(c_in):
            for ky in range(kh):
                for kx in range(kw):
                    acc = dw[co, ci, ky, kx]
                    for n in range(n_b):
                        for oy in range(oh):
                            grow = g[n, co, oy]
                            src = inp[n, ci, oy + ky]
                            for ox in range(ow):
                                acc += grow[ox] * src[ox + kx]
                    dw[co, ci, ky, kx] = acc


def _phases(stride, kh, kw):
    for py in range(min(stride, kh)):
        for px in range(min(stride, kw)):
            yield py, px


def conv2d_forward(inp_pad, weight, bias, stride):
    """Cross-correlate a padded NCHW batch with OIHW weights."""
    n, _, hp, wp = inp_pad.shape
    c_out, _, kh, kw = weight.shape
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    out = np.empty((n, c_out, oh, ow), dtype=inp_pad.dtype)
    out[:] = bias[None, :, None, None]
    if stride == 1:
        _conv_acc(inp_pad, weight, out)
    else:
        for py, px in _phases(stride, kh, kw):
            wsub = np.ascontiguousarray(weight[:, :, py::stride, px::stride])
            view = np.ascontiguousarray(inp_pad[:, :, py::stride, px::stride])
            _conv_acc(view, wsub, out)
    return out


def conv2d_backward_input(grad_out, weight, stride, padded_shape):
    """Gradient w.r.t. the padded input."""
    _, _, kh, kw = weight.shape
    dinp = np.zeros(padded_shape, dtype=grad_out.dtype)
    if stride == 1:
        _conv_dx_acc(grad_out, weight, dinp)
    else:
        for py, px in _phases(stride, kh, kw):
            wsub = np.ascontiguousarray(weight[:, :, py::stride, px::stride])
            phase = dinp[:, :, py::stride, px::stride]
            buf = np.zeros(phase.shape, dtype=grad_out.dtype)
            _conv_dx_acc(grad_out, wsub, buf)
            phase += buf
    return dinp


def conv2d_backward_weight(grad_out, inp_pad, stride, weight_shape):
    """Gradient w.r.t. the weights."""
    dw = np.zeros(weight_shape, dtype=grad_out.dtype)
    _, _, kh, kw = weight_shape
    if stride == 1:
        _conv_dw(inp_pad, grad_out, dw)
    else:
        for py, px in _phases(stride, kh, kw):
            view = np.ascontiguousarray(inp_pad[:, :, py::stride, px::stride])
            sub_shape = dw[:, :, py::stride, px::stride].shape
            dwsub = np.zeros(sub_shape, dtype=grad_out.dtype)
            _conv_dw(view, grad_out, dwsub)
            dw[:, :, py::stride, px::stride] = dwsub
    return dw
