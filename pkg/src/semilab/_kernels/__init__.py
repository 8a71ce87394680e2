"""Hot kernels with a compiled backend and a numpy fallback.

The compiled module is used when it was built and ``SEMILAB_PURE_PYTHON``
is unset; ``BACKEND`` records which one is active.
"""
import os

from . import _reference

BACKEND = "python"
if not os.environ.get("SEMILAB_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _reference
else:
    _impl = _reference

phase_rotate = _impl.phase_rotate
weighted_mass = _impl.weighted_mass
wigner_correlation = _impl.wigner_correlation

__all__ = ["BACKEND", "phase_rotate", "weighted_mass", "wigner_correlation"]
