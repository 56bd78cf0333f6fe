"""Closed-form Minkowski products of rotation sets, and enclosing-cap bounds
where no closed form is known."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError
from .quat import ONE, UnitQuaternion, exp_unit
from .rotation_sets import (
    DEFAULT_TOL,
    Arc,
    AxisCap,
    FullSphere,
    RotationSet,
    Singleton,
    SphericalCap,
    _as_unit,
    _pts,
    cap_radius,
    exp_rows,
    orthonormal_complement,
)

FULL_SPHERE = "FULL_SPHERE"
FULL_SPHERE_BOUND = "FULL_SPHERE_BOUND"
EMBEDDED = "EMBEDDED"
IMMERSED_ONLY = "IMMERSED_ONLY"
BOUND_ONLY = "BOUND_ONLY"
NO_CLOSED_FORM = "NO_CLOSED_FORM"
CORNER_MINIMUM = "CORNER_MINIMUM"
GRID_MINIMUM = "GRID_MINIMUM"

GRID_SIZE = 1024


@dataclass(frozen=True)
class Translated(RotationSet):
    """``left * base * right`` for a set without a closed-form translate."""

    base: RotationSet
    left: UnitQuaternion = ONE
    right: UnitQuaternion = ONE
    kind = "translated"
    notes = (NO_CLOSED_FORM,)

    def _pull_back(self, pts):
        p = kernels.qmul(self.left.conj().as_array(), _pts(pts))
        return kernels.qmul(p, self.right.conj().as_array())

    def members(self, pts, tol=DEFAULT_TOL):
        return self.base.members(self._pull_back(pts), tol)

    def boundary_members(self, pts, tol=DEFAULT_TOL):
        return self.base.boundary_members(self._pull_back(pts), tol)

    def _sample(self, rng, n, mode):
        pts, tags = self.base._sample(rng, n, mode)
        pts = kernels.qmul(kernels.qmul(self.left.as_array(), pts), self.right.as_array())
        return pts, tags

    def hull(self):
        h = self.base.hull()
        if isinstance(h, FullSphere):
            return h
        return SphericalCap(self.left * h.center * self.right, h.t)

    def to_dict(self):
        return {
            "type": "translated",
            "base": self.base.to_dict(),
            "left": self.left.as_array().tolist(),
            "right": self.right.as_array().tolist(),
        }


@dataclass(frozen=True)
class ArcSurface:
    """Parameterization ``P(s, t) = exp(s c1) exp(t c2)`` of a product of two arcs."""

    c1: np.ndarray
    c2: np.ndarray
    phi1: float
    phi2: float
    delta1: float
    delta2: float

    def point(self, s, t) -> np.ndarray:
        return kernels.qmul(exp_rows(s, self.c1), exp_rows(t, self.c2))

    def corners(self) -> np.ndarray:
        s = self.phi1 + np.array([-1.0, -1.0, 1.0, 1.0]) * self.delta1
        t = self.phi2 + np.array([-1.0, 1.0, -1.0, 1.0]) * self.delta2
        return self.point(s, t)

    def edges(self) -> list[dict]:
        """The four edge arcs: one parameter pinned at an end of its range."""
        out = []
        for sign in (-1.0, 1.0):
            out.append({"fixed": "s", "value": self.phi1 + sign * self.delta1,
                        "range": [self.phi2 - self.delta2, self.phi2 + self.delta2]})
        for sign in (-1.0, 1.0):
            out.append({"fixed": "t", "value": self.phi2 + sign * self.delta2,
                        "range": [self.phi1 - self.delta1, self.phi1 + self.delta1]})
        return out

    def fit(self, p, grid: int = 64, iters: int = 30) -> tuple[float, float, float]:
        """Nearest parameters ``(s, t)`` to the point ``p`` and the residual distance.

        Coarse grid start followed by Gauss-Newton on ``|P(s, t) - p|^2``.
        """
        p = np.asarray(p, dtype=float).reshape(4)
        ss = np.linspace(self.phi1 - self.delta1, self.phi1 + self.delta1, grid)
        tt = np.linspace(self.phi2 - self.delta2, self.phi2 + self.delta2, grid)
        S, T = np.meshgrid(ss, tt, indexing="ij")
        d = np.linalg.norm(self.point(S.ravel(), T.ravel()) - p, axis=1)
        k = int(np.argmin(d))
        s, t = float(S.ravel()[k]), float(T.ravel()[k])
        c1 = np.concatenate([[0.0], self.c1])
        c2 = np.concatenate([[0.0], self.c2])
        for _ in range(iters):
            a, b = exp_rows(s, self.c1), exp_rows(t, self.c2)
            r = (kernels.qmul(a, b) - p)[0]
            ds = kernels.qmul(kernels.qmul(a, c1), b)[0]
            dt = kernels.qmul(a, kernels.qmul(b, c2))[0]
            jac = np.column_stack([ds, dt])
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            s = float(np.clip(s + step[0], self.phi1 - self.delta1, self.phi1 + self.delta1))
            t = float(np.clip(t + step[1], self.phi2 - self.delta2, self.phi2 + self.delta2))
            if np.linalg.norm(step) < 1e-15:
                break
        res = float(np.linalg.norm(self.point(s, t)[0] - p))
        return s, t, res

    def to_dict(self):
        return {
            "c1": self.c1.tolist(), "c2": self.c2.tolist(),
            "phi1": self.phi1, "phi2": self.phi2,
            "delta1": self.delta1, "delta2": self.delta2,
        }


@dataclass
class ProductResult:
    exact: RotationSet | None = None
    enclosing_cap: SphericalCap | None = None
    surface: ArcSurface | None = None
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.exact is None and self.enclosing_cap is None and self.surface is None:
            raise ValueError("product result carries no information")

    def to_dict(self) -> dict:
        out = {"notes": list(self.notes)}
        if self.exact is not None:
            out["exact"] = self.exact.to_dict()
        if self.enclosing_cap is not None:
            out["enclosing_cap"] = self.enclosing_cap.to_dict()
        if self.surface is not None:
            out["surface"] = self.surface.to_dict()
        out.update(self.extra)
        return out


def _same_line(c1, c2, tol=1e-12) -> bool:
    return float(np.linalg.norm(np.cross(c1, c2))) <= tol


def _axis_exp_angle(q: UnitQuaternion, c) -> float | None:
    """``psi`` with ``q = exp(psi c)`` when ``q`` lies on that great circle."""
    v = q.vect
    along = float(v @ c)
    if np.linalg.norm(v - along * c) > 1e-12:
        return None
    return math.atan2(along, q.w)


def translate(s: RotationSet, q, side: str = "right") -> RotationSet:
    """Exact image of ``s`` under multiplication by ``q`` on the given side."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    q = _as_unit(q)
    if isinstance(s, FullSphere):
        return s
    if isinstance(s, Singleton):
        return Singleton(q * s.q if side == "left" else s.q * q)
    if isinstance(s, SphericalCap):
        return SphericalCap(q * s.center if side == "left" else s.center * q, s.t)
    if isinstance(s, Arc):
        psi = _axis_exp_angle(q, s.axis)
        if psi is not None:
            return Arc(s.axis, s.phi + psi, s.delta)
    if isinstance(s, Translated):
        if side == "left":
            return Translated(s.base, q * s.left, s.right)
        return Translated(s.base, s.left, s.right * q)
    if side == "left":
        return Translated(s, left=q)
    return Translated(s, right=q)


def cap_product(a: SphericalCap, b: SphericalCap) -> RotationSet:
    """Product of two caps: a cap about the product of centers, or the whole sphere."""
    total = a.t + b.t
    if total >= math.pi:
        return FullSphere()
    return SphericalCap(a.center * b.center, total)


def arc_product_same_axis(a: Arc, b: Arc) -> RotationSet:
    if not _same_line(a.axis, b.axis):
        raise DomainError("use arc_product_general")
    # Arc normalization makes parallel axes identical
    phi = a.phi + b.phi
    delta = min(a.delta + b.delta, math.pi)
    if delta == 0.0:
        return Singleton(exp_unit(phi, a.axis))
    return Arc(a.axis, phi, delta)


def corner_eta(delta1: float, delta2: float, kappa: float) -> float:
    """Enclosing-cap radius of an arc product when both half-widths are at most pi/2."""
    r = math.cos(delta1) * math.cos(delta2) - math.sin(delta1) * math.sin(delta2) * abs(kappa)
    return math.acos(min(1.0, max(-1.0, r)))


def _golden(f, lo, hi, iters=80):
    g = 0.5 * (math.sqrt(5.0) - 1.0)
    a, b = lo, hi
    x1, x2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def scalar_minimum(delta1: float, delta2: float, kappa: float, n: int = GRID_SIZE) -> tuple[float, float, float]:
    """Minimum of ``cos s cos t - kappa sin s sin t`` over ``|s| <= delta1, |t| <= delta2``.

    Dense grid followed by alternating golden-section refinement within one
    grid cell of the best node. Returns ``(r, s, t)``.
    """
    def F(s, t):
        return math.cos(s) * math.cos(t) - kappa * math.sin(s) * math.sin(t)

    r, s, t = kernels.scalar_grid_min(delta1, delta2, kappa, n, n)
    hs = 2.0 * delta1 / (n - 1) if n > 1 else 0.0
    ht = 2.0 * delta2 / (n - 1) if n > 1 else 0.0
    for _ in range(4):
        if hs > 0:
            s_new, _ = _golden(lambda x: F(x, t), max(-delta1, s - hs), min(delta1, s + hs))
            if F(s_new, t) < F(s, t):
                s = s_new
        if ht > 0:
            t_new, _ = _golden(lambda y: F(s, y), max(-delta2, t - ht), min(delta2, t + ht))
            if F(s, t_new) < F(s, t):
                t = t_new
    return min(r, F(s, t)), s, t


def arc_product_general(a: Arc, b: Arc) -> ProductResult:
    """Product of arcs about distinct axes: a 2-surface plus its enclosing cap."""
    if _same_line(a.axis, b.axis):
        raise DomainError("parallel axes: use arc_product_same_axis")
    kappa = float(a.axis @ b.axis)
    center = a.center * b.center
    surface = ArcSurface(a.axis, b.axis, a.phi, b.phi, a.delta, b.delta)
    notes = []
    if a.delta <= 0.5 * math.pi and b.delta <= 0.5 * math.pi:
        eta = corner_eta(a.delta, b.delta, kappa)
        notes.append(CORNER_MINIMUM)
    else:
        r, _, _ = scalar_minimum(a.delta, b.delta, kappa)
        eta = math.acos(min(1.0, max(-1.0, r)))
        notes.append(GRID_MINIMUM)
    embedded = a.delta != math.pi and b.delta != math.pi and min(a.delta, b.delta) < 0.5 * math.pi
    notes.append(EMBEDDED if embedded else IMMERSED_ONLY)
    exact = None
    if b.delta == 0.0:
        exact = translate(a, b.center, "right")
    elif a.delta == 0.0:
        exact = translate(b, a.center, "left")
    extra = {"eta": eta, "corners": surface.corners().tolist(), "edges": surface.edges()}
    return ProductResult(exact, SphericalCap(center, eta), surface, notes, extra)


def axiscap_bound(a: AxisCap, b: AxisCap) -> ProductResult:
    """Enclosing cap of a product of axis caps from the operands' own enclosing caps."""
    t1, t2 = cap_radius(a.phi, a.xi), cap_radius(b.phi, b.xi)
    total = t1 + t2
    center = a.center * b.center
    extra = {
        "T": total,
        "operand_caps": [SphericalCap(a.center, t1).to_dict(), SphericalCap(b.center, t2).to_dict()],
    }
    notes = []
    exact = None
    if a.xi == 0.0 and b.xi == 0.0:
        exact = Singleton(center)
    if total <= math.pi:
        cap = SphericalCap(center, total)
    else:
        cap = SphericalCap(center, math.pi)
        notes.append(FULL_SPHERE_BOUND)
    return ProductResult(exact, cap, None, notes, extra)


def rank_defect_locus(a: AxisCap, b: AxisCap, m, n, tol: float = 1e-9) -> bool:
    """Whether the product map of two axis caps loses rank at ``(exp(phi1 m), exp(phi2 n))``.

    Numerical rank of the four tangent images ``v exp(phi2 n)`` (``v`` orthogonal
    to ``m``) and ``exp(phi1 m) w`` (``w`` orthogonal to ``n``).
    """
    m = np.asarray(m, float) / np.linalg.norm(m)
    n = np.asarray(n, float) / np.linalg.norm(n)
    p = exp_rows(a.phi, m)
    q = exp_rows(b.phi, n)
    pad = lambda e: np.column_stack([np.zeros(2), e])  # noqa: E731
    rows = np.vstack([
        kernels.qmul(pad(orthonormal_complement(m)), q),
        kernels.qmul(p, pad(orthonormal_complement(n))),
    ])
    sv = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0]))) < 3


def product(a: RotationSet, b: RotationSet) -> ProductResult:
    """Minkowski product ``{u v : u in a, v in b}``, exact where a closed form exists."""
    if isinstance(a, SphericalCap):
        a = a.canonical()
    if isinstance(b, SphericalCap):
        b = b.canonical()
    if isinstance(a, Singleton) and isinstance(b, Singleton):
        return ProductResult(Singleton(a.q * b.q))
    if isinstance(b, Singleton):
        return _exact(translate(a, b.q, "right"))
    if isinstance(a, Singleton):
        return _exact(translate(b, a.q, "left"))
    if isinstance(a, FullSphere) or isinstance(b, FullSphere):
        return ProductResult(FullSphere(), notes=[FULL_SPHERE])
    if isinstance(a, SphericalCap) and isinstance(b, SphericalCap):
        return _exact(cap_product(a, b))
    if isinstance(a, Arc) and isinstance(b, Arc):
        if _same_line(a.axis, b.axis):
            return _exact(arc_product_same_axis(a, b))
        return arc_product_general(a, b)
    if isinstance(a, AxisCap) and isinstance(b, AxisCap):
        return axiscap_bound(a, b)
    ha, hb = a.hull(), b.hull()
    if isinstance(ha, FullSphere) or isinstance(hb, FullSphere):
        bound = FullSphere()
    else:
        bound = cap_product(ha, hb)
    notes = [BOUND_ONLY]
    if isinstance(bound, FullSphere):
        notes.append(FULL_SPHERE_BOUND)
        cap = SphericalCap(ONE, math.pi)
    else:
        cap = bound
    return ProductResult(None, cap, None, notes)


def _exact(s: RotationSet) -> ProductResult:
    if isinstance(s, SphericalCap):
        s = s.canonical()
    notes = [FULL_SPHERE] if isinstance(s, FullSphere) else []
    if isinstance(s, Translated):
        notes.append(NO_CLOSED_FORM)
    cap = s if isinstance(s, SphericalCap) else None
    return ProductResult(s, cap, None, notes)
