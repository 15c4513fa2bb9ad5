"""Kernel backend selection.

The hot per-sample operations exist twice: a compiled extension
(``magtrack._kernels``, built from ``_kernels.pyx``) and a pure-Python
fallback (``magtrack._kernels_py``).  At import time the compiled module
is preferred when it built successfully; otherwise the fallback is used
transparently.  Set ``MAGTRACK_KERNEL_BACKEND=python`` or ``=compiled``
to force one (forcing ``compiled`` without a built extension is an
ImportError, not a silent fallback).

``get(name)`` resolves a backend by name so callers (the benchmark, the
differential tests, a pipeline instance) can hold both backends in one
process.
"""
import os

from . import _kernels_py
from .errors import ConfigError

try:
    from . import _kernels
except ImportError:
    _kernels = None

_requested = os.environ.get("MAGTRACK_KERNEL_BACKEND", "").strip().lower()
if _requested == "python":
    _impl = _kernels_py
elif _requested == "compiled":
    if _kernels is None:
        raise ImportError(
            "MAGTRACK_KERNEL_BACKEND=compiled but the magtrack._kernels "
            "extension is not built; run `python setup.py build_ext --inplace`"
        )
    _impl = _kernels
elif _requested == "":
    _impl = _kernels if _kernels is not None else _kernels_py
else:
    raise ConfigError(f"unknown kernel backend {_requested!r} in MAGTRACK_KERNEL_BACKEND")

BACKEND = "compiled" if _impl is _kernels else "python"
AVAILABLE = ("python", "compiled") if _kernels is not None else ("python",)


def get(backend=None):
    """Resolve ``backend`` (None, "python" or "compiled") to a kernel namespace."""
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "compiled":
        if _kernels is None:
            raise ConfigError("compiled kernels are not built")
        return _kernels
    raise ConfigError(f"unknown kernel backend {backend!r}")


sos_step = _impl.sos_step
goertzel_window = _impl.goertzel_window
goertzel_ring = _impl.goertzel_ring
solve_position = _impl.solve_position
