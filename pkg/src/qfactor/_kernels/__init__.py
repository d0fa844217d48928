"""Hot loops: finite-field point enumeration and multistart Gauss-Newton.

The compiled (numba) implementations are used when available; set the
environment variable QFACTOR_NO_NUMBA=1 to force the pure-numpy fallback.
Both expose the same two functions with identical contracts.
"""
import os

_use_numba = not os.environ.get("QFACTOR_NO_NUMBA")
if _use_numba:
    try:
        from ._numba import enumerate_common_zeros, gauss_newton_multistart
        BACKEND = "numba"
    except ImportError:
        _use_numba = False
if not _use_numba:
    from ._numpy import enumerate_common_zeros, gauss_newton_multistart
    BACKEND = "numpy"

__all__ = ["enumerate_common_zeros", "gauss_newton_multistart", "BACKEND"]
