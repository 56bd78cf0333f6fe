"""Families of unit quaternion sets: singletons, spherical caps, arcs of
great circles through 1, axis caps, and the whole sphere.

Every set answers membership and boundary queries with an explicit
tolerance, samples itself reproducibly, and round-trips through a small JSON
descriptor format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cloud import PointCloud, make_rng
from .errors import DomainError, UsageError
from .quat import Quaternion, UnitQuaternion, exp_unit, unit_vector

DEFAULT_TOL = 1e-9
PLANE_TOL = 1e-8


def _as_unit(q) -> UnitQuaternion:
    if isinstance(q, UnitQuaternion):
        return q
    if isinstance(q, Quaternion):
        return UnitQuaternion.from_quaternion(q)
    return UnitQuaternion.from_array(q)


def _pts(u) -> np.ndarray:
    if isinstance(u, Quaternion):
        return u.as_array()[None, :]
    return np.asarray(u, dtype=float).reshape(-1, 4)


def orthonormal_complement(c) -> np.ndarray:
    """Two orthonormal vectors spanning the plane orthogonal to unit ``c``."""
    c = np.asarray(c, dtype=float)
    helper = np.eye(3)[int(np.argmin(np.abs(c)))]
    e1 = np.cross(c, helper)
    e1 /= np.linalg.norm(e1)
    return np.stack([e1, np.cross(c, e1)])


def exp_rows(s, c) -> np.ndarray:
    """Rows ``cos s + sin s * c`` for scalar angles ``s`` and unit axis/axes ``c``."""
    s = np.asarray(s, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float)
    vec = np.sin(s)[:, None] * (c if c.ndim == 2 else c[None, :])
    return np.column_stack([np.cos(s), vec])


def uniform_s2(rng, n) -> np.ndarray:
    g = rng.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1)[:, None]


def sample_cap_angle(rng, n, t) -> np.ndarray:
    """Angles in ``[0, t]`` with density proportional to ``sin^2``."""
    if t == 0.0:
        return np.zeros(n)
    envelope = math.sin(min(t, 0.5 * math.pi)) ** 2
    out = np.empty(0)
    while out.size < n:
        m = 2 * (n - out.size) + 16
        a = rng.uniform(0.0, t, m)
        keep = rng.uniform(0.0, envelope, m) <= np.sin(a) ** 2
        out = np.concatenate([out, a[keep]])
    return out[:n]


def _wrap(a):
    """Reduce angles to ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - a, 2.0 * np.pi)


def cap_radius(phi: float, xi: float) -> float:
    """Angular radius of the smallest cap about ``exp(phi c)`` holding ``S(c, phi, xi)``."""
    return math.acos(min(1.0, max(-1.0, math.cos(phi) ** 2 + math.sin(phi) ** 2 * math.cos(xi))))


class RotationSet:
    """Common protocol. Subclasses implement ``members``/``boundary_members``/``_sample``."""

    kind = "abstract"

    def members(self, pts, tol=DEFAULT_TOL) -> np.ndarray:
        raise NotImplementedError

    def boundary_members(self, pts, tol=DEFAULT_TOL) -> np.ndarray:
        raise DomainError(f"{self.kind} has no boundary")

    def _sample(self, rng, n, mode):
        raise NotImplementedError

    def hull(self) -> "RotationSet":
        """Smallest spherical cap (or the whole sphere) enclosing the set."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Singleton(RotationSet):
    q: UnitQuaternion
    kind = "singleton"

    def __post_init__(self):
        object.__setattr__(self, "q", _as_unit(self.q))

    def members(self, pts, tol=DEFAULT_TOL):
        return np.linalg.norm(_pts(pts) - self.q.as_array(), axis=1) <= tol

    def _sample(self, rng, n, mode):
        if mode != "interior":
            raise DomainError("a singleton has no boundary to sample")
        return np.tile(self.q.as_array(), (n, 1)), {}

    def hull(self):
        return SphericalCap(self.q, 0.0)

    def to_dict(self):
        return {"type": "singleton", "q": self.q.as_array().tolist()}


@dataclass(frozen=True)
class SphericalCap(RotationSet):
    """Unit quaternions within angle ``t`` of ``center``."""

    center: UnitQuaternion
    t: float
    kind = "cap"

    def __post_init__(self):
        object.__setattr__(self, "center", _as_unit(self.center))
        t = float(self.t)
        if not 0.0 <= t <= math.pi:
            raise DomainError(f"cap radius t={t} outside [0, pi]")
        object.__setattr__(self, "t", t)

    @property
    def rho(self) -> float:
        """Chordal radius in R^4."""
        return 2.0 * math.sin(0.5 * self.t)

    def canonical(self) -> RotationSet:
        if self.t == 0.0:
            return Singleton(self.center)
        if self.t == math.pi:
            return FullSphere()
        return self

    def members(self, pts, tol=DEFAULT_TOL):
        return _pts(pts) @ self.center.as_array() >= math.cos(self.t) - tol

    def boundary_members(self, pts, tol=DEFAULT_TOL):
        if self.t == 0.0 or self.t == math.pi:
            raise DomainError("degenerate cap has no 2-sphere boundary")
        return np.abs(_pts(pts) @ self.center.as_array() - math.cos(self.t)) <= tol

    def _sample(self, rng, n, mode):
        if mode == "interior":
            alpha = sample_cap_angle(rng, n, self.t)
        else:
            if self.t == 0.0 or self.t == math.pi:
                raise DomainError("degenerate cap has no 2-sphere boundary")
            alpha = np.full(n, self.t)
        d = uniform_s2(rng, n)
        local = np.column_stack([np.cos(alpha), np.sin(alpha)[:, None] * d])
        return kernels.qmul(self.center.as_array(), local), {"alpha": alpha}

    def hull(self):
        return self

    def to_dict(self):
        return {"type": "cap", "center": self.center.as_array().tolist(), "t": self.t}


@dataclass(frozen=True)
class Arc(RotationSet):
    """``{exp(s c) : |s - phi| <= delta}``; ``delta = pi`` is a full great circle.

    The axis is stored with its first nonzero component positive; flipping
    it negates ``phi``, which leaves the set unchanged.
    """

    axis: np.ndarray
    phi: float
    delta: float
    kind = "arc"

    def __post_init__(self):
        c = unit_vector(self.axis, tol=1e-9)
        c = c / np.linalg.norm(c)
        phi = float(self.phi)
        lead = c[np.flatnonzero(np.abs(c) > 1e-12)[0]]
        if lead < 0:
            c, phi = -c, -phi
        delta = float(self.delta)
        if not 0.0 <= delta <= math.pi:
            raise DomainError(f"arc half-width delta={delta} outside [0, pi]")
        c.setflags(write=False)
        object.__setattr__(self, "axis", c)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "delta", delta)

    def __eq__(self, other):
        return (
            isinstance(other, Arc)
            and np.array_equal(self.axis, other.axis)
            and self.phi == other.phi
            and self.delta == other.delta
        )

    def __hash__(self):
        return hash((tuple(self.axis), self.phi, self.delta))

    @property
    def center(self) -> UnitQuaternion:
        return exp_unit(self.phi, self.axis)

    def point(self, s) -> np.ndarray:
        return exp_rows(s, self.axis)

    def parameter(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Angle along the circle and distance of each point from its plane."""
        p = _pts(pts)
        along = p[:, 1:] @ self.axis
        off = np.linalg.norm(p[:, 1:] - along[:, None] * self.axis, axis=1)
        return np.arctan2(along, p[:, 0]), off

    def members(self, pts, tol=DEFAULT_TOL):
        s, off = self.parameter(pts)
        if self.delta == math.pi:
            return off <= tol
        return (off <= tol) & (np.abs(_wrap(s - self.phi)) <= self.delta + tol)

    def boundary_members(self, pts, tol=DEFAULT_TOL):
        """Endpoint test; a full circle or a single point has no endpoints."""
        if self.delta == 0.0:
            raise DomainError("a zero-width arc is a singleton")
        s, off = self.parameter(pts)
        if self.delta == math.pi:
            return np.zeros(len(s), dtype=bool)
        return (off <= tol) & (np.abs(np.abs(_wrap(s - self.phi)) - self.delta) <= tol)

    def _sample(self, rng, n, mode):
        if mode == "interior":
            s = self.phi + rng.uniform(-self.delta, self.delta, n)
        else:
            if self.delta in (0.0, math.pi):
                raise DomainError("arc has no endpoints to sample")
            s = self.phi + np.where(np.arange(n) % 2 == 0, -self.delta, self.delta)
        return self.point(s), {"s": s}

    def hull(self):
        return SphericalCap(self.center, self.delta).canonical()

    def to_dict(self):
        return {"type": "arc", "axis": self.axis.tolist(), "phi": self.phi, "delta": self.delta}


@dataclass(frozen=True)
class AxisCap(RotationSet):
    """``{cos phi + sin phi m : <m, c> >= cos xi}``: rotations by ``2 phi`` whose
    axes stay within ``xi`` of ``c``. Boundary queries use the circle
    ``<m, c> = cos xi`` (boundary within the 2-sphere ``scal = cos phi``)."""

    axis: np.ndarray
    phi: float
    xi: float
    kind = "axis_cap"

    def __post_init__(self):
        c = unit_vector(self.axis, tol=1e-9)
        c = c / np.linalg.norm(c)
        c.setflags(write=False)
        phi, xi = float(self.phi), float(self.xi)
        if not 0.0 < phi < math.pi:
            raise DomainError(f"axis-cap angle phi={phi} outside (0, pi)")
        if not 0.0 <= xi <= math.pi:
            raise DomainError(f"axis-cap spread xi={xi} outside [0, pi]")
        object.__setattr__(self, "axis", c)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "xi", xi)

    def __eq__(self, other):
        return (
            isinstance(other, AxisCap)
            and np.array_equal(self.axis, other.axis)
            and self.phi == other.phi
            and self.xi == other.xi
        )

    def __hash__(self):
        return hash((tuple(self.axis), self.phi, self.xi))

    @property
    def center(self) -> UnitQuaternion:
        return exp_unit(self.phi, self.axis)

    def axes_of(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Rotation axis ``m`` of each point and its scalar-part error."""
        p = _pts(pts)
        return p[:, 1:] / math.sin(self.phi), np.abs(p[:, 0] - math.cos(self.phi))

    def members(self, pts, tol=DEFAULT_TOL):
        m, err = self.axes_of(pts)
        return (err <= tol) & (m @ self.axis >= math.cos(self.xi) - tol)

    def boundary_members(self, pts, tol=DEFAULT_TOL):
        if self.xi == 0.0:
            raise DomainError("a zero-spread axis cap is a singleton")
        m, err = self.axes_of(pts)
        return (err <= tol) & (np.abs(m @ self.axis - math.cos(self.xi)) <= tol)

    def point(self, polar, azimuth) -> np.ndarray:
        e = orthonormal_complement(self.axis)
        polar, azimuth = np.asarray(polar, float), np.asarray(azimuth, float)
        m = (
            np.cos(polar)[:, None] * self.axis
            + (np.sin(polar) * np.cos(azimuth))[:, None] * e[0]
            + (np.sin(polar) * np.sin(azimuth))[:, None] * e[1]
        )
        return exp_rows(np.full(len(polar), self.phi), m)

    def _sample(self, rng, n, mode):
        if mode == "interior":
            polar = np.arccos(rng.uniform(math.cos(self.xi), 1.0, n))
        else:
            if self.xi == 0.0:
                raise DomainError("a zero-spread axis cap is a singleton")
            polar = np.full(n, self.xi)
        azimuth = rng.uniform(-math.pi, math.pi, n)
        return self.point(polar, azimuth), {"polar": polar, "azimuth": azimuth}

    def hull(self):
        return SphericalCap(self.center, cap_radius(self.phi, self.xi)).canonical()

    def to_dict(self):
        return {"type": "axis_cap", "axis": self.axis.tolist(), "phi": self.phi, "xi": self.xi}


@dataclass(frozen=True)
class FullSphere(RotationSet):
    kind = "full"

    def members(self, pts, tol=DEFAULT_TOL):
        p = _pts(pts)
        return np.abs(np.linalg.norm(p, axis=1) - 1.0) <= max(tol, 1e-12)

    def _sample(self, rng, n, mode):
        if mode != "interior":
            raise DomainError("the 3-sphere has empty boundary")
        g = rng.standard_normal((n, 4))
        return g / np.linalg.norm(g, axis=1)[:, None], {}

    def hull(self):
        return self

    def to_dict(self):
        return {"type": "full"}


@dataclass(frozen=True)
class TangentPlane4:
    """Oriented 2-plane of R^4 through the origin, attached to a point of S^3."""

    base: UnitQuaternion
    frame: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=float).reshape(2, 4)
        f.setflags(write=False)
        object.__setattr__(self, "frame", f)

    def projector(self) -> np.ndarray:
        return self.frame.T @ self.frame

    def distance(self, other: "TangentPlane4") -> float:
        return float(np.linalg.norm(self.projector() - other.projector()))

    def same_plane(self, other: "TangentPlane4", tol: float = PLANE_TOL) -> bool:
        return self.distance(other) <= tol

    def left(self, q) -> "TangentPlane4":
        """Image under ``x -> q x``."""
        q = _as_unit(q)
        return TangentPlane4(q * self.base, kernels.qmul(q.as_array(), self.frame))

    def right(self, q) -> "TangentPlane4":
        """Image under ``x -> x q``."""
        q = _as_unit(q)
        return TangentPlane4(self.base * q, kernels.qmul(self.frame, q.as_array()))


def contains(s: RotationSet, u, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    return bool(s.members(u, tol)[0])


def on_boundary(s: RotationSet, u, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    return bool(s.boundary_members(u, tol)[0])


def tangent_plane(s: RotationSet, u) -> TangentPlane4:
    """Tangent 2-plane of the boundary surface of ``s`` at ``u``.

    Defined for proper caps (boundary 2-sphere) and for axis caps, which are
    themselves 2-surfaces of S^3; for those every member qualifies.
    """
    u = _as_unit(u)
    if isinstance(s, SphericalCap):
        if not on_boundary(s, u, DEFAULT_TOL):
            raise DomainError("point is not on the cap boundary")
        _, _, vt = np.linalg.svd(np.stack([u.as_array(), s.center.as_array()]))
        return TangentPlane4(u, vt[2:])
    if isinstance(s, AxisCap):
        if not contains(s, u, DEFAULT_TOL):
            raise DomainError("point is not on the axis cap")
        m = u.vect / np.linalg.norm(u.vect)
        e = orthonormal_complement(m)
        return TangentPlane4(u, np.column_stack([np.zeros(2), e]))
    raise DomainError(f"{s.kind} has no 2-dimensional boundary")


def sample(s: RotationSet, n: int, seed: int, mode: str = "interior") -> PointCloud:
    """``n`` reproducible points of ``s`` (``mode='interior'``) or of its boundary."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    if mode not in ("interior", "boundary"):
        raise UsageError(f"unknown sampling mode {mode!r}")
    pts, tags = s._sample(make_rng(seed), int(n), mode)
    return PointCloud(pts, tags, "S3", {"set": s.to_dict(), "mode": mode, "seed": seed})


def _vector(d, key, n):
    try:
        v = [float(x) for x in d[key]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"descriptor field {key!r} must be a list of {n} numbers") from exc
    if len(v) != n:
        raise UsageError(f"descriptor field {key!r} must have {n} entries")
    return v


def _number(d, key):
    try:
        return float(d[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"descriptor field {key!r} must be a number") from exc


def from_descriptor(d: dict) -> RotationSet:
    """Build a set from its JSON descriptor (see ``to_dict``)."""
    if not isinstance(d, dict) or "type" not in d:
        raise UsageError("descriptor must be an object with a 'type' field")
    kind = d["type"]
    if kind == "cap":
        return SphericalCap(UnitQuaternion(*_vector(d, "center", 4)), _number(d, "t"))
    if kind == "arc":
        return Arc(np.array(_vector(d, "axis", 3)), _number(d, "phi"), _number(d, "delta"))
    if kind == "axis_cap":
        return AxisCap(np.array(_vector(d, "axis", 3)), _number(d, "phi"), _number(d, "xi"))
    if kind == "singleton":
        return Singleton(UnitQuaternion(*_vector(d, "q", 4)))
    if kind == "full":
        return FullSphere()
    raise UsageError(f"unknown set type {kind!r}")
