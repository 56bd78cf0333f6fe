# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels. Mirrors ``_pykernels`` function for function."""
import numpy as np

from cython.parallel cimport prange
from libc.math cimport atan2, cos, sin, sqrt, INFINITY


def qmul_batch(const double[:, ::1] a, const double[:, ::1] b, int nthreads=1):
    cdef Py_ssize_t n = a.shape[0], i
    if b.shape[0] != n:
        raise ValueError("row count mismatch")
    out_arr = np.empty((n, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double aw, ax, ay, az, bw, bx, by, bz
    for i in prange(n, nogil=True, num_threads=nthreads, schedule="static"):
        aw = a[i, 0]; ax = a[i, 1]; ay = a[i, 2]; az = a[i, 3]
        bw = b[i, 0]; bx = b[i, 1]; by = b[i, 2]; bz = b[i, 3]
        out[i, 0] = aw * bw - ax * bx - ay * by - az * bz
        out[i, 1] = aw * bx + ax * bw + ay * bz - az * by
        out[i, 2] = aw * by - ax * bz + ay * bw + az * bx
        out[i, 3] = aw * bz + ax * by - ay * bx + az * bw
    return out_arr


def inner_slack(const double[:, ::1] pts, const double[::1] center, double cos_t, double tol):
    """Return (min slack, argmin, violations) of <p, center> - cos_t."""
    cdef Py_ssize_t n = pts.shape[0], i, arg = -1
    cdef double best = INFINITY, d
    cdef Py_ssize_t bad = 0
    cdef double cw = center[0], cx = center[1], cy = center[2], cz = center[3]
    with nogil:
        for i in range(n):
            d = pts[i, 0] * cw + pts[i, 1] * cx + pts[i, 2] * cy + pts[i, 3] * cz - cos_t
            if d < best:
                best = d
                arg = i
            if d < -tol:
                bad += 1
    return best, arg, bad


def scalar_grid_min(double d1, double d2, double kappa, Py_ssize_t n1, Py_ssize_t n2, int nthreads=1):
    """Minimum of cos s cos t - kappa sin s sin t over an n1 x n2 grid of
    [-d1, d1] x [-d2, d2] (endpoints included)."""
    s_arr = np.linspace(-d1, d1, n1)
    t_arr = np.linspace(-d2, d2, n2)
    cdef double[::1] cs = np.cos(s_arr), ss = np.sin(s_arr)
    cdef double[::1] ct = np.cos(t_arr), st = np.sin(t_arr)
    row_min_arr = np.empty(n1, dtype=np.float64)
    row_arg_arr = np.empty(n1, dtype=np.intp)
    cdef double[::1] row_min = row_min_arr
    cdef Py_ssize_t[::1] row_arg = row_arg_arr
    cdef Py_ssize_t i, j, jbest
    cdef double v, best, a, b
    for i in prange(n1, nogil=True, num_threads=nthreads, schedule="static"):
        a = cs[i]
        b = kappa * ss[i]
        best = INFINITY
        jbest = 0
        for j in range(n2):
            v = a * ct[j] - b * st[j]
            if v < best:
                best = v
                jbest = j
        row_min[i] = best
        row_arg[i] = jbest
    i = int(np.argmin(row_min_arr))
    return float(row_min[i]), float(s_arr[i]), float(t_arr[row_arg[i]])


def euler_vectors(const double[:, ::1] pts, int nthreads=1):
    """theta * n for each unit quaternion, angle in [0, pi], identity -> 0."""
    cdef Py_ssize_t n = pts.shape[0], i
    out_arr = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double w, x, y, z, s, f
    for i in prange(n, nogil=True, num_threads=nthreads, schedule="static"):
        w = pts[i, 0]; x = pts[i, 1]; y = pts[i, 2]; z = pts[i, 3]
        if w < 0:
            w = -w; x = -x; y = -y; z = -z
        s = sqrt(x * x + y * y + z * z)
        if s <= 1e-8:
            out[i, 0] = 0.0; out[i, 1] = 0.0; out[i, 2] = 0.0
        else:
            f = 2.0 * atan2(s, w) / s
            out[i, 0] = f * x; out[i, 1] = f * y; out[i, 2] = f * z
    return out_arr
