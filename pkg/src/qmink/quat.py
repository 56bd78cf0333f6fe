"""Quaternion arithmetic, unit quaternions and axis-angle conversions.

Quaternions are stored as ``(w, x, y, z)`` with ``w`` the scalar part.
Vectors in R^3 are plain numpy arrays of shape ``(3,)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

UNIT_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
DEGENERATE_SIN = 1e-8


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"non-finite quaternion component {name}={value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = (float(c) for c in a)
        return cls(w, x, y, z)

    @classmethod
    def from_scalar_vector(cls, s: float, v) -> "Quaternion":
        return cls(s, float(v[0]), float(v[1]), float(v[2]))

    @property
    def scal(self) -> float:
        return self.w

    @property
    def vect(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    def __neg__(self):
        return type(self)(-self.w, -self.x, -self.y, -self.z)

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return mul(_coerce(other), self)

    def __truediv__(self, other: float):
        return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)

    def conj(self):
        return type(self)(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.as_array() - _coerce(other).as_array())) <= tol)


class UnitQuaternion(Quaternion):
    """A quaternion of magnitude one, i.e. a point of the 3-sphere.

    Construction renormalizes inputs whose norm is off by less than 1e-9
    and rejects anything further away.
    """

    def __post_init__(self):
        super().__post_init__()
        n = self.norm()
        if abs(n - 1.0) > RENORMALIZE_TOL:
            raise DomainError(f"quaternion norm {n!r} is not 1")
        if n != 1.0:
            for name in ("w", "x", "y", "z"):
                object.__setattr__(self, name, getattr(self, name) / n)

    @classmethod
    def from_quaternion(cls, q: Quaternion) -> "UnitQuaternion":
        return cls(q.w, q.x, q.y, q.z)


ONE = UnitQuaternion(1.0)
I = UnitQuaternion(0.0, 1.0, 0.0, 0.0)
J = UnitQuaternion(0.0, 0.0, 1.0, 0.0)
K = UnitQuaternion(0.0, 0.0, 0.0, 1.0)


def _coerce(q) -> Quaternion:
    if isinstance(q, Quaternion):
        return q
    if isinstance(q, (int, float)):
        return Quaternion(float(q))
    return Quaternion.from_array(q)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    a, b = _coerce(a), _coerce(b)
    w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z
    x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y
    y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x
    z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w
    if isinstance(a, UnitQuaternion) and isinstance(b, UnitQuaternion):
        return UnitQuaternion(w, x, y, z)
    return Quaternion(w, x, y, z)


def conj(a: Quaternion) -> Quaternion:
    return _coerce(a).conj()


def norm(a: Quaternion) -> float:
    return _coerce(a).norm()


def inv(a: Quaternion) -> Quaternion:
    a = _coerce(a)
    n2 = a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z
    if n2 == 0.0:
        raise DomainError("zero quaternion has no inverse")
    if isinstance(a, UnitQuaternion):
        return a.conj()
    return a.conj() / n2


def inner(a: Quaternion, b: Quaternion) -> float:
    """Euclidean inner product of ``a`` and ``b`` as vectors of R^4."""
    a, b = _coerce(a), _coerce(b)
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z


def unit_vector(v, tol: float = UNIT_TOL) -> np.ndarray:
    """Return ``v`` as a float array, raising unless it has unit length."""
    v = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise DomainError("non-finite vector")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise DomainError(f"axis {v.tolist()} is not a unit vector")
    return v


def normalized(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DomainError("zero vector has no direction")
    return v / n


def exp_unit(s: float, c) -> UnitQuaternion:
    """``cos s + sin s * c`` for a unit pure vector ``c``."""
    c = unit_vector(c, tol=1e-9)
    return UnitQuaternion.from_scalar_vector(math.cos(s), math.sin(s) * c)


def from_axis_angle(n, theta: float) -> UnitQuaternion:
    """Unit quaternion of the rotation by ``theta`` about the unit axis ``n``."""
    n = unit_vector(n)
    return exp_unit(0.5 * theta, n)


class AxisAngle(NamedTuple):
    axis: np.ndarray
    angle: float
    degenerate: bool


def to_axis_angle(u: Quaternion) -> AxisAngle:
    """Axis and angle with ``angle`` in ``[0, pi]``.

    ``u`` and ``-u`` describe the same rotation; the representative with a
    non-negative scalar part is used, so ``from_axis_angle`` of the result
    gives back ``u`` or ``-u``. When the rotation is (numerically) the
    identity the axis is reported as ``(1, 0, 0)`` and ``degenerate`` is set.
    """
    u = _coerce(u)
    w, v = u.w, u.vect
    if w < 0.0:
        w, v = -w, -v
    s = float(np.linalg.norm(v))
    if s <= DEGENERATE_SIN:
        return AxisAngle(np.array([1.0, 0.0, 0.0]), 2.0 * math.atan2(s, w), True)
    return AxisAngle(v / s, 2.0 * math.atan2(s, w), False)


def rotate(u: Quaternion, v) -> np.ndarray:
    """Vector part of ``u v u*``."""
    u = _coerce(u)
    p = mul(mul(u, Quaternion.from_scalar_vector(0.0, v)), u.conj())
    return p.vect


def compose_axis_angle(n1, theta1: float, n2, theta2: float) -> AxisAngle:
    """Axis and angle of rotation ``(n1, theta1)`` applied after ``(n2, theta2)``.

    Evaluates the half-angle composition formulas directly and reports the
    result in the ``to_axis_angle`` convention.
    """
    n1, n2 = unit_vector(n1), unit_vector(n2)
    c1, s1 = math.cos(0.5 * theta1), math.sin(0.5 * theta1)
    c2, s2 = math.cos(0.5 * theta2), math.sin(0.5 * theta2)
    c = c1 * c2 - s1 * s2 * float(np.dot(n1, n2))
    # numerator equals sin(theta/2) * n
    num = s1 * c2 * n1 + c1 * s2 * n2 + s1 * s2 * np.cross(n1, n2)
    if c < 0.0:
        c, num = -c, -num
    s = float(np.linalg.norm(num))
    if s <= DEGENERATE_SIN:
        return AxisAngle(np.array([1.0, 0.0, 0.0]), 2.0 * math.atan2(s, c), True)
    return AxisAngle(num / s, 2.0 * math.atan2(s, c), False)
