"""Backend selection for the hot loops.

The compiled extension is used when it was built and ``STABKIT_PURE_PYTHON``
is unset (or ``0``); otherwise the numpy fallback is used. ``BACKEND`` names
the active choice.
"""
import os

from . import _kernels_py

_want_pure = os.environ.get("STABKIT_PURE_PYTHON", "0") not in ("", "0")

try:
    if _want_pure:
        raise ImportError("pure-python backend requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

propagate = _impl.propagate
gramian_trapezoid = _impl.gramian_trapezoid
ftilde = _impl.ftilde
bisect_ftilde = _impl.bisect_ftilde


def get_backend(name):
    """Return the kernel module for ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
