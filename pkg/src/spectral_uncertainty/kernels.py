"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy fallback.
Setting ``SPECTRAL_UNCERTAINTY_PURE=1`` forces the fallback.
"""

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("SPECTRAL_UNCERTAINTY_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

jacobi_sweeps = _impl.jacobi_sweeps
inf_to_one_exact = _impl.inf_to_one_exact
sublevel_count = _impl.sublevel_count

__all__ = ["BACKEND", "jacobi_sweeps", "inf_to_one_exact", "sublevel_count"]
