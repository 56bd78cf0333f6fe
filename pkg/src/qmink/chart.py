"""Maps from S^3 to R^3: Cayley transforms / stereographic projection,
hyperspherical coordinates, and the so(3) exponential, logarithm and BCH
composition of Euler vectors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError
from .quat import (
    ONE,
    Quaternion,
    UnitQuaternion,
    _coerce,
    compose_axis_angle,
    from_axis_angle,
    inv,
    to_axis_angle,
)
from .rotation_sets import SphericalCap, exp_rows

POLE_TOL = 1e-12
_EX = np.array([1.0, 0.0, 0.0])


def cayley_phi(q) -> Quaternion:
    """``(q + 1)^-1 (q - 1)``; restricted to S^3 it is stereographic projection from -1."""
    q = Quaternion.from_array(_coerce(q).as_array())
    p = q + 1.0
    if p.norm() <= POLE_TOL:
        raise DomainError("pole of Cayley transform")
    return inv(p) * (q - 1.0)


def cayley_psi(q) -> Quaternion:
    """``(1 - q)^-1 (1 + q)``, the inverse of :func:`cayley_phi`."""
    q = Quaternion.from_array(_coerce(q).as_array())
    d = 1.0 - q
    if d.norm() <= POLE_TOL:
        raise DomainError("pole of Cayley transform")
    return inv(d) * (1.0 + q)


def stereo_project(u) -> np.ndarray:
    u = _coerce(u)
    if (u + 1.0).norm() <= POLE_TOL:
        raise DomainError("-1 maps to infinity under stereographic projection")
    return u.vect / (1.0 + u.w)


def stereo_unproject(v) -> UnitQuaternion:
    v = np.asarray(v, dtype=float).reshape(3)
    r2 = float(v @ v)
    return UnitQuaternion.from_scalar_vector((1.0 - r2) / (1.0 + r2), 2.0 * v / (1.0 + r2))


def stereo_project_rows(pts, pole_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Project many points; returns ``(images, kept_mask)`` dropping points near -1."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 4)
    keep = np.linalg.norm(pts + np.array([1.0, 0, 0, 0]), axis=1) > pole_tol
    p = pts[keep]
    return p[:, 1:] / (1.0 + p[:, :1]), keep


class Hyperspherical(NamedTuple):
    alpha: float
    beta: float
    gamma: float
    singular: bool


def hyperspherical(u) -> Hyperspherical:
    """Coordinates with ``u = (cos a, sin a cos b, sin a sin b cos g, sin a sin b sin g)``.

    ``singular`` is set where ``beta`` or ``gamma`` is not determined; the free
    angles are then reported as 0.
    """
    w, x, y, z = _coerce(u).as_array()
    rv = math.sqrt(x * x + y * y + z * z)
    alpha = math.atan2(rv, w)
    ryz = math.hypot(y, z)
    if rv <= 1e-15:
        return Hyperspherical(alpha, 0.0, 0.0, True)
    beta = math.atan2(ryz, x)
    if ryz <= 1e-15:
        return Hyperspherical(alpha, beta, 0.0, True)
    gamma = math.atan2(z, y) % (2.0 * math.pi)
    if gamma >= 2.0 * math.pi:  # tiny negative angles round up to 2 pi
        gamma = 0.0
    return Hyperspherical(alpha, beta, gamma, False)


def from_hyperspherical(alpha: float, beta: float, gamma: float) -> UnitQuaternion:
    sa, sb = math.sin(alpha), math.sin(beta)
    return UnitQuaternion(
        math.cos(alpha), sa * math.cos(beta), sa * sb * math.cos(gamma), sa * sb * math.sin(gamma)
    )


def hat(v) -> np.ndarray:
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(a, tol: float = 1e-9) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(3, 3)
    if np.max(np.abs(a + a.T)) > tol:
        raise DomainError("matrix is not skew-symmetric")
    return 0.5 * np.array([a[2, 1] - a[1, 2], a[0, 2] - a[2, 0], a[1, 0] - a[0, 1]])


def exp_so3(v) -> np.ndarray:
    """Rotation matrix of the Euler vector ``v`` (Rodrigues formula)."""
    v = np.asarray(v, dtype=float).reshape(3)
    theta = float(np.linalg.norm(v))
    a = hat(v)
    if theta < 1e-8:
        # sin(x)/x and (1 - cos x)/x^2 to second order
        return np.eye(3) + (1.0 - theta**2 / 6.0) * a + (0.5 - theta**2 / 24.0) * (a @ a)
    return np.eye(3) + (math.sin(theta) / theta) * a + ((1.0 - math.cos(theta)) / theta**2) * (a @ a)


def check_rotation(m, tol: float = 1e-8) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise DomainError("expected a finite 3x3 matrix")
    if np.max(np.abs(m.T @ m - np.eye(3))) > tol or abs(np.linalg.det(m) - 1.0) > tol:
        raise DomainError("matrix is not a rotation")
    return m


def log_so3(m) -> np.ndarray:
    """Euler vector ``theta n`` with ``theta`` in ``[0, pi]`` such that ``exp_so3`` gives ``m`` back."""
    m = check_rotation(m)
    skew = vee(0.5 * (m - m.T))
    cos_t = 0.5 * (np.trace(m) - 1.0)
    sin_t = float(np.linalg.norm(skew))
    theta = math.atan2(sin_t, cos_t)
    if theta < 1e-6:
        return skew * (1.0 + theta**2 / 6.0)
    if theta < math.pi - 1e-4:
        return skew * (theta / sin_t)
    # near a half turn: axis from the symmetric part, n n^T = (S - cos I)/(1 - cos)
    b = (0.5 * (m + m.T) - cos_t * np.eye(3)) / (1.0 - cos_t)
    k = int(np.argmax(np.diag(b)))
    n = b[:, k] / math.sqrt(b[k, k])
    if n @ skew < 0:
        n = -n
    return theta * n / np.linalg.norm(n)


def log_so3_arcsin(m) -> np.ndarray:
    """Logarithm through the arcsine of the skew part; valid for angles up to pi/2."""
    m = check_rotation(m)
    a = 0.5 * (m - m.T)
    s = float(np.linalg.norm(vee(a)))
    if s == 0.0:
        return np.zeros(3)
    return vee(a) * (math.asin(min(1.0, s)) / s)


def _split(v):
    v = np.asarray(v, dtype=float).reshape(3)
    theta = float(np.linalg.norm(v))
    if theta == 0.0:
        return _EX, 0.0
    return v / theta, theta


def bch(v1, v2) -> np.ndarray:
    """Euler vector of ``exp_so3(v1) @ exp_so3(v2)`` via quaternion axis-angle composition."""
    n1, t1 = _split(v1)
    n2, t2 = _split(v2)
    axis, angle, degenerate = compose_axis_angle(n1, t1, n2, t2)
    if degenerate:
        return np.zeros(3)
    return angle * axis


def quat_to_matrix(u) -> np.ndarray:
    axis, angle, _ = to_axis_angle(u)
    return exp_so3(angle * axis)


def matrix_to_quat(m) -> UnitQuaternion:
    axis, angle = _split(log_so3(m))
    return from_axis_angle(axis, angle)


def euler_rows(pts) -> np.ndarray:
    """Euler vectors ``theta n`` of many unit quaternions (norm at most pi)."""
    return kernels.euler_vectors(pts)


# --- images of caps under stereographic projection ---------------------------------


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    kind = "ball"

    def contains(self, x, tol=1e-9):
        x = np.atleast_2d(x)
        return np.linalg.norm(x - self.center, axis=1) <= self.radius + tol * max(1.0, self.radius)

    def on_surface(self, x, tol=1e-8):
        x = np.atleast_2d(x)
        return np.abs(np.linalg.norm(x - self.center, axis=1) - self.radius) <= tol * max(1.0, self.radius)


@dataclass(frozen=True)
class BallComplement(Ball):
    """Points at distance at least ``radius`` from ``center``."""

    kind = "ball_complement"

    def contains(self, x, tol=1e-9):
        x = np.atleast_2d(x)
        return np.linalg.norm(x - self.center, axis=1) >= self.radius - tol * max(1.0, self.radius)


@dataclass(frozen=True)
class HalfSpace:
    """``{x : <normal, x> <= offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float
    kind = "half_space"

    def contains(self, x, tol=1e-9):
        x = np.atleast_2d(x)
        scale = np.maximum(1.0, np.linalg.norm(x, axis=1))
        return x @ self.normal <= self.offset + tol * scale

    def on_surface(self, x, tol=1e-8):
        x = np.atleast_2d(x)
        scale = np.maximum(1.0, np.linalg.norm(x, axis=1))
        return np.abs(x @ self.normal - self.offset) <= tol * scale


@dataclass(frozen=True)
class Point:
    p: np.ndarray
    kind = "point"

    def contains(self, x, tol=1e-9):
        return np.linalg.norm(np.atleast_2d(x) - self.p, axis=1) <= tol


@dataclass(frozen=True)
class AllSpace:
    kind = "all_space"

    def contains(self, x, tol=1e-9):
        return np.ones(len(np.atleast_2d(x)), dtype=bool)


def _probe_directions() -> np.ndarray:
    cube = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], float)
    cube /= math.sqrt(3.0)
    # generic orientation so no probe lines up with a coordinate axis
    r = exp_so3(np.array([0.3, -0.7, 0.45]))
    return cube @ r.T


def cap_image_under_phi(cap: SphericalCap, pole_tol: float = 1e-12):
    """Shape of the stereographic image of a cap: ball, half-space, ball complement,
    point or all of R^3.

    The kind follows from where -1 sits relative to the cap; sizes are fitted
    through projected boundary points.
    """
    if cap.t == math.pi:
        return AllSpace()
    if cap.t == 0.0:
        return Point(stereo_project(cap.center))
    antipode = -cap.center.w  # <-1, U0>
    level = math.cos(cap.t)
    bnd = kernels.qmul(cap.center.as_array(), exp_rows(np.full(8, cap.t), _probe_directions()))
    x, keep = stereo_project_rows(bnd, pole_tol=1e-6)
    if abs(antipode - level) <= pole_tol:
        # -1 on the boundary sphere: image boundary is a plane
        _, _, vt = np.linalg.svd(np.column_stack([x, np.ones(len(x))]))
        coef = vt[-1]
        scale = np.linalg.norm(coef[:3])
        normal, offset = coef[:3] / scale, -coef[3] / scale
        inside = stereo_project(cap.center)
        if inside @ normal > offset:
            normal, offset = -normal, -offset
        return HalfSpace(normal, float(offset))
    _, _, vt = np.linalg.svd(np.column_stack([np.sum(x * x, axis=1), x, np.ones(len(x))]))
    a, b, c = vt[-1][0], vt[-1][1:4], vt[-1][4]
    center = -b / (2.0 * a)
    radius = math.sqrt(max(0.0, float(center @ center) - c / a))
    if antipode < level:
        return Ball(center, radius)
    return BallComplement(center, radius)
