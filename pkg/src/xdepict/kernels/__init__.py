"""Hot convolution kernels, dispatched at import time via ``backend.ACTIVE``.

The three entry points accept an already zero-padded input; padding and
bias gradients are handled by the calling op layer.
"""

from .. import backend

if backend.ACTIVE == "numba":
    from . import numba_impl as _impl
else:
    from . import numpy_impl as _impl

ACTIVE = backend.ACTIVE

conv2d_forward = _impl.conv2d_forward
conv2d_backward_input = _impl.conv2d_backward_input
conv2d_backward_weight = _impl.conv2d_backward_weight


def get_impl(name: str):
    """Fetch a specific backend module (used by tests and the benchmark)."""
    if name == "numpy":
        from . import numpy_impl
        return numpy_impl
    if name == "numba":
        from . import numba_impl
        return numba_impl
    raise ValueError(f"unknown kernel backend {name!r}")
