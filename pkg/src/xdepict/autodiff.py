"""Reverse-mode automatic differentiation on dense numpy tensors.

Every differentiable op stamps its output with a monotonically increasing
record number; ``backward`` replays the subgraph reaching the loss in exact
reverse record order, which is a valid topological order because execution
is eager. Gradients accumulate additively across multiple uses of a tensor
and are cleared explicitly (``Tensor.zero_grad`` / the optimizer step).
"""

import contextlib
import itertools

import numpy as np

_record_counter = itertools.count()
_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the block (eval-mode forwards)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    """Dense float tensor, optionally participating in the gradient tape.

    Data is float32 unless the caller hands in a float64 array (the
    gradient-check suite upcasts ops under test to double).
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn", "_record")

    def __init__(self, data, requires_grad=False):
        if isinstance(data, np.ndarray) and data.dtype in (np.float32, np.float64):
            self.data = data
        else:
            self.data = np.asarray(data, dtype=np.float32)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward_fn = None
        self._record = next(_record_counter)

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.data, requires_grad=False)

    # -- graph-building arithmetic ------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(_as_tensor(other, self.dtype), -1.0))

    def __rsub__(self, other):
        return add(_as_tensor(other, self.dtype), mul(self, -1.0))

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, *shape)

    def sqrt(self):
        return sqrt(self)

    def item(self):
        return float(self.data.reshape(-1)[0])

    def backward(self):
        backward(self)


def _as_tensor(value, dtype):
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=dtype))


def make_node(data, parents, backward_fn):
    """Create an op output, wired into the tape when grads are live."""
    needs = _grad_enabled and any(p.requires_grad for p in parents)
    out = Tensor(data, requires_grad=needs)
    if needs:
        out._parents = tuple(parents)
        out._backward_fn = backward_fn
    return out


def accumulate_grad(t: Tensor, g: np.ndarray):
    """Additively deposit a gradient contribution on ``t``.

    Callers must not mutate ``g`` afterwards.
    """
    if not t.requires_grad:
        return
    if g.shape != t.data.shape:
        raise ValueError(
            f"gradient shape {g.shape} does not match tensor shape {t.data.shape}"
        )
    t.grad = g if t.grad is None else t.grad + g


def backward(loss: Tensor):
    """Populate grads of all requires_grad tensors reaching ``loss``."""
    if loss.data.size != 1:
        raise ValueError(
            f"backward requires a scalar loss, got shape {loss.data.shape}"
        )
    nodes = []
    seen = set()
    stack = [loss]
    while stack:
        t = stack.pop()
        if id(t) in seen:
            continue
        seen.add(id(t))
        nodes.append(t)
        stack.extend(t._parents)
    nodes.sort(key=lambda t: t._record, reverse=True)
    loss.grad = np.ones_like(loss.data)
    for t in nodes:
        if t._backward_fn is not None and t.grad is not None:
            t._backward_fn(t.grad)


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _pair(a, b):
    if isinstance(a, Tensor):
        return a, (b if isinstance(b, Tensor) else Tensor(np.asarray(b, dtype=a.dtype)))
    return Tensor(np.asarray(a, dtype=b.dtype)), b


def add(a, b):
    a, b = _pair(a, b)
    out_data = a.data + b.data

    def bwd(g):
        accumulate_grad(a, _unbroadcast(g, a.data.shape))
        accumulate_grad(b, _unbroadcast(g, b.data.shape))

    return make_node(out_data, (a, b), bwd)


def mul(a, b):
    a, b = _pair(a, b)
    out_data = a.data * b.data

    def bwd(g):
        accumulate_grad(a, _unbroadcast(g * b.data, a.data.shape))
        accumulate_grad(b, _unbroadcast(g * a.data, b.data.shape))

    return make_node(out_data, (a, b), bwd)


def tsum(x: Tensor, axis=None, keepdims=False):
    out_data = x.data.sum(axis=axis, keepdims=keepdims)

    def bwd(g):
        if axis is None:
            accumulate_grad(x, np.broadcast_to(g, x.data.shape).copy())
            return
        gg = g
        if not keepdims:
            gg = np.expand_dims(g, axis)
        accumulate_grad(x, np.broadcast_to(gg, x.data.shape).copy())

    return make_node(np.asarray(out_data), (x,), bwd)


def tmean(x: Tensor, axis=None, keepdims=False):
    if axis is None:
        count = x.data.size
    elif isinstance(axis, tuple):
        count = 1
        for a in axis:
            count *= x.data.shape[a]
    else:
        count = x.data.shape[axis]
    return mul(tsum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(x: Tensor, *shape):
    if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
        shape = tuple(shape[0])
    out_data = x.data.reshape(shape)

    def bwd(g):
        accumulate_grad(x, g.reshape(x.data.shape))

    return make_node(out_data, (x,), bwd)


def sqrt(x: Tensor):
    out_data = np.sqrt(x.data)

    def bwd(g):
        accumulate_grad(x, g * (0.5 / out_data))

    return make_node(out_data, (x,), bwd)
