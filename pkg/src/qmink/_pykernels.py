"""Numpy implementations of the batch kernels (fallback backend)."""
import numpy as np


def qmul_batch(a, b, nthreads=1):
    if a.shape[0] != b.shape[0]:
        raise ValueError("row count mismatch")
    aw, ax, ay, az = a.T
    bw, bx, by, bz = b.T
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=1,
    )


def inner_slack(pts, center, cos_t, tol):
    if pts.shape[0] == 0:
        return np.inf, -1, 0
    d = pts @ center - cos_t
    arg = int(np.argmin(d))
    return float(d[arg]), arg, int(np.count_nonzero(d < -tol))


def scalar_grid_min(d1, d2, kappa, n1, n2, nthreads=1):
    s = np.linspace(-d1, d1, n1)
    t = np.linspace(-d2, d2, n2)
    f = np.outer(np.cos(s), np.cos(t)) - kappa * np.outer(np.sin(s), np.sin(t))
    i, j = np.unravel_index(int(np.argmin(f)), f.shape)
    return float(f[i, j]), float(s[i]), float(t[j])


def euler_vectors(pts, nthreads=1):
    p = np.where(pts[:, :1] < 0, -pts, pts)
    s = np.linalg.norm(p[:, 1:], axis=1)
    out = np.zeros((pts.shape[0], 3))
    ok = s > 1e-8
    f = 2.0 * np.arctan2(s[ok], p[ok, 0]) / s[ok]
    out[ok] = f[:, None] * p[ok, 1:]
    return out
