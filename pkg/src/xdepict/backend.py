"""Compute-backend selection for the hot convolution kernels.

Two interchangeable backends exist:

* ``numba`` -- direct loop kernels compiled with ``@njit`` (default when
  numba imports cleanly)
* ``numpy`` -- pure-numpy im2col/col2im fallback

Select explicitly with the ``XDEPICT_BACKEND`` environment variable
(``numba`` or ``numpy``), read once at import time. Both backends produce
the same results up to floating-point reassociation; each is individually
bit-deterministic run to run.
"""

import os

_ENV_VAR = "XDEPICT_BACKEND"
_VALID = ("numba", "numpy")


def _resolve() -> str:
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested and requested not in _VALID:
        raise ValueError(
            f"{_ENV_VAR}={requested!r}: expected one of {_VALID}"
        )
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    return "numba"


ACTIVE = _resolve()


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True
