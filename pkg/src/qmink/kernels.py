"""Batch kernels with a compiled backend and a numpy fallback.

The Cython extension ``qmink._ckernels`` is used when it was built; otherwise
(or when ``QMINK_PURE_PYTHON`` is set) the numpy versions in
``qmink._pykernels`` are used. ``QMINK_THREADS`` caps the OpenMP thread count
of the compiled backend.
"""
import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("QMINK_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QMINK_THREADS", "1")))
    except ValueError:
        return 1


def _rows(a, width):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, width)
    if a.ndim != 2 or a.shape[1] != width:
        raise ValueError(f"expected rows of length {width}, got shape {a.shape}")
    return a


def qmul(a, b, impl=None):
    """Row-wise quaternion products; a single row broadcasts against many."""
    impl = impl or _impl
    a, b = _rows(a, 4), _rows(b, 4)
    if a.shape[0] == 1 and b.shape[0] > 1:
        a = np.ascontiguousarray(np.broadcast_to(a, b.shape))
    elif b.shape[0] == 1 and a.shape[0] > 1:
        b = np.ascontiguousarray(np.broadcast_to(b, a.shape))
    return np.asarray(impl.qmul_batch(a, b, _threads()))


def inner_slack(pts, center, cos_t, tol=1e-9, impl=None):
    """``(min slack, argmin, violations)`` for ``<p, center> >= cos_t``."""
    impl = impl or _impl
    best, arg, bad = impl.inner_slack(
        _rows(pts, 4), np.ascontiguousarray(center, dtype=np.float64).reshape(4), float(cos_t), float(tol)
    )
    return float(best), int(arg), int(bad)


def scalar_grid_min(d1, d2, kappa, n1=1024, n2=1024, impl=None):
    """Grid minimum of ``cos s cos t - kappa sin s sin t``; returns ``(value, s, t)``."""
    impl = impl or _impl
    return impl.scalar_grid_min(float(d1), float(d2), float(kappa), int(n1), int(n2), _threads())


def euler_vectors(pts, impl=None):
    impl = impl or _impl
    return np.asarray(impl.euler_vectors(_rows(pts, 4), _threads()))
