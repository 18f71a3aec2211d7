"""Select the compiled kernels when importable, else the pure-Python fallback.

Set ``CASCADE_BUDGET_PURE=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("CASCADE_BUDGET_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

series_sum = _impl.series_sum
finite_sum = _impl.finite_sum
simulate_batch = _impl.simulate_batch

__all__ = ["BACKEND", "series_sum", "finite_sum", "simulate_batch"]
