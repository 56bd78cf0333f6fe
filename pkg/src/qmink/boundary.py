"""Point tests for the boundary of a Minkowski product of full-dimensional sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cloud import PointCloud, make_rng
from .errors import DomainError
from .quat import Quaternion, UnitQuaternion, _coerce, mul
from .rotation_sets import (
    DEFAULT_TOL,
    PLANE_TOL,
    AxisCap,
    RotationSet,
    SphericalCap,
    TangentPlane4,
    _as_unit,
    _pts,
    contains,
    on_boundary,
    orthonormal_complement,
    tangent_plane,
    uniform_s2,
)
from .minkowski import cap_product

CERTIFIED_BOUNDARY = "CertifiedBoundary"
CERTIFIED_INTERIOR = "CertifiedInterior"
NECESSARY_FAILED = "NecessaryFailed"
INCONCLUSIVE = "Inconclusive"

SEED = 20240917

__all__ = [
    "TangentPlane4", "BoundaryVerdict", "CapUnion", "product_differential", "interior_rule",
    "necessary_condition", "cap_boundary_lemma", "sufficient_condition",
    "non_boundary_corollary", "sample_product_boundary", "inscribed_cap",
]


@dataclass
class BoundaryVerdict:
    status: str
    max_slack: float | None = None
    witness: np.ndarray | None = None
    evidence: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"status": self.status, "max_slack": self.max_slack, "evidence": self.evidence}
        if self.witness is not None:
            out["witness"] = np.asarray(self.witness, float).tolist()
        out.update(self.details)
        return out


@dataclass(frozen=True)
class CapUnion(RotationSet):
    """Union of spherical caps."""

    caps: tuple
    kind = "cap_union"

    def __post_init__(self):
        object.__setattr__(self, "caps", tuple(self.caps))
        if not self.caps or not all(isinstance(c, SphericalCap) for c in self.caps):
            raise DomainError("a cap union needs at least one spherical cap")

    def _levels(self, pts):
        p = _pts(pts)
        return np.stack([p @ c.center.as_array() - math.cos(c.t) for c in self.caps], axis=1)

    def members(self, pts, tol=DEFAULT_TOL):
        return np.any(self._levels(pts) >= -tol, axis=1)

    def boundary_members(self, pts, tol=DEFAULT_TOL):
        lv = self._levels(pts)
        return np.any(np.abs(lv) <= tol, axis=1) & ~np.any(lv > tol, axis=1)

    def _sample(self, rng, n, mode):
        k = len(self.caps)
        if mode == "interior":
            parts = [c._sample(rng, n // k + (i < n % k), mode)[0] for i, c in enumerate(self.caps)]
            return np.vstack(parts), {}
        out = np.empty((0, 4))
        while len(out) < n:
            for c in self.caps:
                p, _ = c._sample(rng, max(n, 16), mode)
                out = np.vstack([out, p[self.boundary_members(p)]])
        return out[:n], {}

    def hull(self):
        raise DomainError("no enclosing cap is computed for cap unions")

    def to_dict(self):
        return {"type": "cap_union", "caps": [c.to_dict() for c in self.caps]}


def product_differential(p, q, direction: str, v) -> Quaternion:
    """Derivative of ``(P, Q) -> P Q`` at ``(p, q)`` along ``(v, 0)`` (``left``) or ``(0, v)`` (``right``)."""
    p, q, v = _coerce(p), _coerce(q), _coerce(v)
    if direction == "left":
        return mul(v, q)
    if direction == "right":
        return mul(p, v)
    raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")


def interior_rule(u_interior: bool, v_interior: bool) -> bool:
    """True when ``u v`` is certainly interior to the product: one factor is interior."""
    return bool(u_interior or v_interior)


def inscribed_cap(cap: SphericalCap, u, radius: float) -> SphericalCap:
    """Cap of the given radius inside ``cap`` whose boundary touches ``cap``'s at ``u``."""
    u = _as_unit(u)
    if radius > cap.t:
        raise DomainError("inscribed radius exceeds the cap radius")
    ua, ca = u.as_array(), cap.center.as_array()
    w = ca - (ca @ ua) * ua
    nw = np.linalg.norm(w)
    if nw == 0.0:
        raise DomainError("point coincides with the cap center or its antipode")
    return SphericalCap(UnitQuaternion(*(math.cos(radius) * ua + math.sin(radius) * w / nw)), radius)


def _nested(a: SphericalCap, b: SphericalCap, tol: float) -> bool:
    """Whether one cap includes the other."""
    d = math.acos(max(-1.0, min(1.0, float(a.center.as_array() @ b.center.as_array()))))
    return d + min(a.t, b.t) <= max(a.t, b.t) + tol


def _tangent_caps(s: RotationSet, u) -> SphericalCap | None:
    if isinstance(s, SphericalCap):
        if s.t < 0.5 * math.pi:
            return s
        return inscribed_cap(s, u, 0.25 * math.pi)
    return None


def _check_boundary_point(s: RotationSet, u, tol: float):
    if isinstance(s, SphericalCap):
        if not on_boundary(s, u, tol):
            raise DomainError("point is not on the boundary of its set")
    elif isinstance(s, AxisCap):
        if not contains(s, u, tol):
            raise DomainError("point does not lie on the axis cap")
    else:
        raise DomainError(f"tangent planes are not available for {s.kind}")


def necessary_condition(
    U: RotationSet,
    u,
    V: RotationSet,
    v,
    inscribed: tuple | None = None,
    tol: float = PLANE_TOL,
) -> bool:
    """Necessary test for ``u v`` to lie on the boundary of ``U (x) V``.

    Compares the tangent plane of ``U`` at ``u`` pulled back by ``u*`` with that
    of ``V`` at ``v`` pushed by ``v*``. When tangent inscribed caps are known
    (computed for caps, or passed as ``inscribed=(cap_u, cap_v)``), the moved
    caps must also be nested. ``False`` rules the point out.
    """
    u, v = _as_unit(u), _as_unit(v)
    _check_boundary_point(U, u, DEFAULT_TOL)
    _check_boundary_point(V, v, DEFAULT_TOL)
    pu = tangent_plane(U, u).left(u.conj())
    pv = tangent_plane(V, v).right(v.conj())
    if not pu.same_plane(pv, tol):
        return False
    cu, cv = inscribed if inscribed is not None else (_tangent_caps(U, u), _tangent_caps(V, v))
    if cu is None or cv is None:
        return True
    moved_u = SphericalCap(u.conj() * cu.center, cu.t)
    moved_v = SphericalCap(cv.center * v.conj(), cv.t)
    return _nested(moved_u, moved_v, 1e-9)


def cap_boundary_lemma(U0, s0: float, V0, t0: float, tol: float = 1e-9) -> bool:
    """For caps whose boundaries meet at 1: is 1 on the boundary of their product?

    Holds exactly when both centers are ``exp(s0 c)``, ``exp(t0 c)`` for one imaginary unit ``c``.
    """
    U0, V0 = _as_unit(U0), _as_unit(V0)
    if not 0.0 < s0 <= t0 < 0.5 * math.pi:
        raise DomainError("need 0 < s0 <= t0 < pi/2")
    if abs(U0.w - math.cos(s0)) > tol or abs(V0.w - math.cos(t0)) > tol:
        raise DomainError("1 is not on both cap boundaries")
    a, b = U0.vect, V0.vect
    return bool(np.linalg.norm(a / np.linalg.norm(a) - b / np.linalg.norm(b)) <= tol)


def _min_slack(pts, P: UnitQuaternion, s: float, tol: float):
    return kernels.inner_slack(pts, P.as_array(), math.cos(s), tol)


def sufficient_condition(
    U: RotationSet,
    u,
    V: RotationSet,
    v,
    P,
    s: float,
    n: int = 10_000,
    seed: int = SEED,
    tol: float = DEFAULT_TOL,
) -> BoundaryVerdict:
    """Certify ``u v`` on the boundary of ``U (x) V`` by checking, on samples, that
    ``u* U`` and ``V v*`` both sit inside the cap ``U(P, s)`` touching 1.

    The reported ``max_slack`` is the worst (smallest) ``<x, P> - cos s`` seen.
    """
    u, v, P = _as_unit(u), _as_unit(v), _as_unit(P)
    if not 0.0 < s < 0.5 * math.pi:
        raise DomainError("the certifying cap radius must lie in (0, pi/2)")
    if abs(P.w - math.cos(s)) > 1e-9:
        raise DomainError("1 is not on the boundary of the certifying cap")
    if not contains(U, u, tol) or not contains(V, v, tol):
        raise DomainError("points must belong to their sets")
    rng = make_rng(seed)
    worst, witness = math.inf, None
    for which, S, mover in (("U", U, lambda p: kernels.qmul(u.conj().as_array(), p)),
                            ("V", V, lambda p: kernels.qmul(p, v.conj().as_array()))):
        pts = np.vstack([S._sample(rng, n, "interior")[0], S._sample(rng, n, "boundary")[0]])
        moved = mover(pts)
        slack, arg, bad = _min_slack(moved, P, s, tol)
        if slack < worst:
            worst = slack
        if bad:
            return BoundaryVerdict(
                INCONCLUSIVE, worst, pts[arg],
                f"a point of {which} leaves the certifying cap",
                {"operand": which},
            )
    return BoundaryVerdict(
        CERTIFIED_BOUNDARY, worst, None,
        f"{2 * n} samples per operand inside the certifying cap",
        {"samples_per_operand": 2 * n},
    )


def non_boundary_corollary(U: CapUnion, u, tol: float = DEFAULT_TOL) -> bool:
    """``u v`` is never on the product boundary when two incomparable caps of ``U``
    are tangent to its boundary at ``u``."""
    u = _as_unit(u)
    caps = [c for c in U.caps if on_boundary(c, u, tol)]
    for i in range(len(caps)):
        for j in range(i + 1, len(caps)):
            a, b = caps[i], caps[j]
            if not tangent_plane(a, u).same_plane(tangent_plane(b, u)):
                continue
            if not _nested(a, b, tol):
                return True
    raise DomainError("no pair of incomparable caps tangent at the point")


def sample_product_boundary(U: CapUnion, V: SphericalCap, n: int, seed: int = SEED,
                            tol: float = DEFAULT_TOL) -> PointCloud:
    """Points of the boundary of ``U (x) V`` for a cap union ``U`` and a cap ``V``.

    Each candidate is a product of a boundary point of one cap of ``U`` with a
    boundary point of ``V`` sharing its rotation axis (the only pairs that reach
    the boundary of a cap product); candidates inside another product cap are
    discarded.
    """
    rng = make_rng(seed)
    prods = [cap_product(c, V) for c in U.caps]
    if not all(isinstance(p, SphericalCap) for p in prods):
        return PointCloud(np.empty((0, 4)), {}, "S3", {"note": "product covers S3"})
    union = CapUnion(tuple(prods))
    idx = rng.integers(0, len(U.caps), n)
    m = uniform_s2(rng, n)
    s = np.array([U.caps[i].t for i in idx])
    left = np.column_stack([np.cos(s), np.sin(s)[:, None] * m])
    u_pts = kernels.qmul(np.stack([U.caps[i].center.as_array() for i in idx]), left)
    v_pts = kernels.qmul(np.column_stack([np.full(n, math.cos(V.t)), math.sin(V.t) * m]),
                         V.center.as_array())
    p = kernels.qmul(u_pts, v_pts)
    keep = union.boundary_members(p, tol)
    return PointCloud(p[keep], {"cap": idx[keep]}, "S3", {"candidates": n, "kept": int(keep.sum())})
