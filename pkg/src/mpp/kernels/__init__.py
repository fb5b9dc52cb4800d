"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time: numba unless the environment
variable ``MPP_DISABLE_JIT`` is set to a truthy value (or numba is not
importable).  Both backends are importable directly as ``kernels.numba_impl``
and ``kernels.numpy_impl`` for cross-checking and benchmarking.
"""
import os

from . import _numpy as numpy_impl

_FALSY = {"", "0", "false", "no", "off"}

try:
    from . import _numba as numba_impl
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None

JIT_DISABLED = os.environ.get("MPP_DISABLE_JIT", "").strip().lower() not in _FALSY
BACKEND = "numpy" if JIT_DISABLED or numba_impl is None else "numba"
_impl = numpy_impl if BACKEND == "numpy" else numba_impl

variation_dp = _impl.variation_dp
jump_dp = _impl.jump_dp
brute_variation = _impl.brute_variation
brute_jump = _impl.brute_jump
jump_stopping = _impl.jump_stopping

__all__ = [
    "BACKEND",
    "JIT_DISABLED",
    "numba_impl",
    "numpy_impl",
    "variation_dp",
    "jump_dp",
    "brute_variation",
    "brute_jump",
    "jump_stopping",
]
