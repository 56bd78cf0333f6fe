"""Monte-Carlo verification of the closed forms: sample operands, multiply,
and compare the products against the predicted sets and bounds."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .boundary import necessary_condition
from .chart import bch, euler_rows, exp_so3, log_so3, stereo_project_rows
from .cloud import PointCloud, make_rng
from .errors import DomainError, UsageError
from .minkowski import arc_product_general, arc_product_same_axis, axiscap_bound, corner_eta, scalar_minimum
from .quat import UnitQuaternion
from .rotation_sets import (
    Arc,
    AxisCap,
    FullSphere,
    RotationSet,
    SphericalCap,
    cap_radius,
    exp_rows,
    orthonormal_complement,
    uniform_s2,
)

PROPERTIES = {
    "CAP_CLOSURE": "products of two caps stay in the cap about the product of centers with the summed radius",
    "CAP_SHARPNESS": "same-axis boundary pairs reach the boundary of the product cap",
    "FULL_SPHERE_COVERAGE": "caps with radii summing past pi multiply onto the whole sphere",
    "ARC_SAME_AXIS": "arcs about one axis multiply to the arc with summed offsets and widths",
    "ARC_SURFACE_CAP": "an arc-arc surface stays inside its computed enclosing cap",
    "CORNER_MIN": "for half-widths up to pi/2 the enclosing radius comes from a corner",
    "AXISCAP_BOUND": "axis-cap products stay in the cap of summed operand radii",
    "AXISCAP_SHARP_HALFPI": "for quarter-turn angles the axis-cap bound is attained",
    "BCH_CONSISTENCY": "axis-angle composition agrees with log(exp v1 exp v2)",
    "BOUNDARY_IN_PRODUCT_OF_BOUNDARIES": "product-cap boundary points factor into boundary points",
    "NECESSARY_FILTER": "the tangent-plane test on cap pairs matches the common-axis criterion",
}

TOLERANCES = {
    "CAP_CLOSURE": 1e-9,
    "CAP_SHARPNESS": 1e-12,
    "FULL_SPHERE_COVERAGE": 0.2,
    "ARC_SAME_AXIS": 1e-9,
    "ARC_SURFACE_CAP": 1e-9,
    "CORNER_MIN": 1e-6,
    "AXISCAP_BOUND": 1e-9,
    "AXISCAP_SHARP_HALFPI": 1e-12,
    "BCH_CONSISTENCY": 1e-9,
    "BOUNDARY_IN_PRODUCT_OF_BOUNDARIES": 1e-9,
    "NECESSARY_FILTER": 1e-9,
}


@dataclass
class VerificationReport:
    property: str
    n_samples: int
    violations: int
    worst_slack: float
    seed: int
    runtime: float = 0.0
    tolerance: float = 0.0
    claim: str = ""
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["status"] = "PASS" if self.passed else "FAIL"
        return _jsonable(out)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def random_units(rng, n) -> np.ndarray:
    g = rng.standard_normal((n, 4))
    return g / np.linalg.norm(g, axis=1)[:, None]


def product_cloud(a: RotationSet, b: RotationSet, n: int, seed: int) -> PointCloud:
    """``n`` products ``u v`` of independent samples ``u`` of ``a`` and ``v`` of ``b``."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    pa, ta = a._sample(make_rng(seed, 1), n, "interior")
    pb, tb = b._sample(make_rng(seed, 2), n, "interior")
    tags = {f"a_{k}": v for k, v in ta.items()} | {f"b_{k}": v for k, v in tb.items()}
    pts = kernels.qmul(pa, pb)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return PointCloud(pts, tags, "S3", {"a": a.to_dict(), "b": b.to_dict(), "seed": seed})


def project_cloud(cloud: PointCloud, method: str) -> PointCloud:
    """Chart an S3 cloud into R^3 by stereographic projection or Euler vectors."""
    if cloud.frame != "S3":
        raise UsageError("only S3 clouds can be projected")
    meta = dict(cloud.meta)
    if method == "stereo":
        img, keep = stereo_project_rows(cloud.points, pole_tol=1e-9)
        meta["dropped"] = int((~keep).sum())
        tags = {k: v[keep] for k, v in cloud.tags.items()}
        return PointCloud(img, tags, "R3_STEREO", meta)
    if method == "bch":
        meta["dropped"] = 0
        return PointCloud(euler_rows(cloud.points), dict(cloud.tags), "R3_BCH", meta)
    raise UsageError(f"unknown projection method {method!r}")


# --- property checks ------------------------------------------------------------------

def _unit_param(params, key, rng):
    if key in params:
        return UnitQuaternion(*params[key])
    return UnitQuaternion(*random_units(rng, 1)[0])


def _axis_param(params, key, default):
    v = np.asarray(params.get(key, default), dtype=float)
    return v / np.linalg.norm(v)


def _cap_pair(params, rng):
    s, t = float(params.get("s", 0.7)), float(params.get("t", 0.6))
    if not (0.0 <= s <= math.pi and 0.0 <= t <= math.pi):
        raise DomainError("cap radii must lie in [0, pi]")
    return SphericalCap(_unit_param(params, "U0", rng), s), SphericalCap(_unit_param(params, "V0", rng), t)


def _check_cap_closure(params, n, seed):
    rng = make_rng(seed, 0)
    a, b = _cap_pair(params, rng)
    total = a.t + b.t
    if total >= math.pi:
        return 0, -math.inf, ["FULL_SPHERE"], {}
    cloud = product_cloud(a, b, n, seed)
    center = a.center * b.center
    worst, _, bad = kernels.inner_slack(cloud.points, center.as_array(), math.cos(total), 1e-9)
    return bad, -worst, [], {"min_margin": worst}


def _check_cap_sharpness(params, n, seed):
    rng = make_rng(seed, 0)
    a, b = _cap_pair(params, rng)
    total = a.t + b.t
    if total >= math.pi:
        raise DomainError("sharpness needs s + t < pi")
    center = (a.center * b.center).as_array()
    p = uniform_s2(rng, n)
    u = kernels.qmul(a.center.as_array(), exp_rows(np.full(n, a.t), p))
    v = kernels.qmul(exp_rows(np.full(n, b.t), p), b.center.as_array())
    dev = np.abs(kernels.qmul(u, v) @ center - math.cos(total))
    on_u = np.abs(u @ a.center.as_array() - math.cos(a.t))
    on_v = np.abs(v @ b.center.as_array() - math.cos(b.t))
    worst = float(max(dev.max(), on_u.max(), on_v.max()))
    bad = int(np.count_nonzero((dev > 1e-12) | (on_u > 1e-12) | (on_v > 1e-12)))
    # blind boundary pairs: closest approach to the product boundary
    ub, _ = a._sample(rng, n, "boundary")
    vb, _ = b._sample(rng, n, "boundary")
    gap = kernels.qmul(ub, vb) @ center - math.cos(total)
    extra = {"blind_min_gap": float(gap.min())}
    if not (-1e-9 <= gap.min() <= 1e-3):
        bad += 1
    return bad, worst, [], extra


def _check_coverage(params, n, seed):
    rng = make_rng(seed, 0)
    a, b = _cap_pair(params, rng)
    if a.t + b.t < math.pi:
        raise DomainError("coverage needs s + t >= pi")
    radius = float(params.get("radius", 0.2))
    targets = random_units(make_rng(seed, 3), int(params.get("targets", 20)))
    cloud = product_cloud(a, b, n, seed)
    near = np.arccos(np.clip(targets @ cloud.points.T, -1.0, 1.0)).min(axis=1)
    return int(np.count_nonzero(near > radius)), float(near.max()), [], {"nearest": near}


def _check_arc_same_axis(params, n, seed):
    c = _axis_param(params, "axis", [0.0, 0.0, 1.0])
    a = Arc(c, float(params.get("phi1", 0.3)), float(params.get("delta1", 0.4)))
    b = Arc(c, float(params.get("phi2", -0.2)), float(params.get("delta2", 0.5)))
    res = arc_product_same_axis(a, b)
    bad = 0
    if not isinstance(res, Arc):
        return 0, 0.0, ["SINGLETON"], {}
    expect_delta = min(a.delta + b.delta, math.pi)
    if res.phi != a.phi + b.phi or res.delta != expect_delta:
        bad += 1
    fwd = product_cloud(a, b, n, seed)
    bad += int(np.count_nonzero(~res.members(fwd.points, 1e-9)))
    # every result point splits as a product of operand points
    d = make_rng(seed, 4).uniform(-res.delta, res.delta, n)
    lam = a.delta / (a.delta + b.delta)
    s1 = a.phi + lam * d
    s2 = b.phi + (1.0 - lam) * d
    ok_split = a.members(a.point(s1), 1e-9) & b.members(b.point(s2), 1e-9)
    rebuilt = kernels.qmul(a.point(s1), b.point(s2))
    err = np.linalg.norm(rebuilt - res.point(res.phi + d), axis=1)
    bad += int(np.count_nonzero(~ok_split | (err > 1e-9)))
    return bad, float(err.max()), [], {}


def _arc_pair(params):
    a = Arc(_axis_param(params, "c1", [0.0, 1.0, 0.0]), float(params.get("phi1", 0.0)),
            float(params.get("delta1", math.pi / 4)))
    b = Arc(_axis_param(params, "c2", [0.0, 0.0, 1.0]), float(params.get("phi2", 0.0)),
            float(params.get("delta2", math.pi / 4)))
    return a, b


def _check_arc_surface_cap(params, n, seed):
    a, b = _arc_pair(params)
    res = arc_product_general(a, b)
    cloud = product_cloud(a, b, n, seed)
    cap = res.enclosing_cap
    worst, _, bad = kernels.inner_slack(cloud.points, cap.center.as_array(), math.cos(cap.t), 1e-9)
    return bad, -worst, list(res.notes), {"eta": cap.t}


def _check_corner_min(params, n, seed):
    rng = make_rng(seed, 0)
    configs = int(params.get("configs", 50))
    grid = int(params.get("grid", 1024))
    bad, worst = 0, 0.0
    rows = []
    for _ in range(configs):
        d1, d2 = rng.uniform(0.0, 0.5 * math.pi, 2)
        c1, c2 = uniform_s2(rng, 2)
        kappa = float(c1 @ c2)
        eta_c = corner_eta(d1, d2, kappa)
        r, _, _ = kernels.scalar_grid_min(d1, d2, kappa, grid, grid)
        eta_g = math.acos(min(1.0, max(-1.0, r)))
        err = abs(eta_c - eta_g)
        worst = max(worst, err)
        if err > 1e-6 or not eta_c < d1 + d2:
            bad += 1
        rows.append([d1, d2, kappa, eta_c, eta_g])
    return bad, worst, [], {"configs": rows}


def _axiscap_pair(params):
    a = AxisCap(_axis_param(params, "c1", [0.0, 1.0, 0.0]), float(params.get("phi1", math.pi / 8)),
                float(params.get("xi1", math.pi / 8)))
    b = AxisCap(_axis_param(params, "c2", [0.0, 0.0, 1.0]), float(params.get("phi2", math.pi / 8)),
                float(params.get("xi2", math.pi / 8)))
    return a, b


def _check_axiscap_bound(params, n, seed):
    a, b = _axiscap_pair(params)
    res = axiscap_bound(a, b)
    cap = res.enclosing_cap
    cloud = product_cloud(a, b, n, seed)
    worst, _, bad = kernels.inner_slack(cloud.points, cap.center.as_array(), math.cos(cap.t), 1e-9)
    return bad, -worst, list(res.notes), {"T": res.extra["T"]}


def _check_axiscap_sharp(params, n, seed):
    xi = float(params.get("xi", math.pi / 6))
    if not 0.0 <= xi <= 0.5 * math.pi:
        raise DomainError("xi must lie in [0, pi/2]")
    c = _axis_param(params, "c", [0.0, 0.0, 1.0])
    a = AxisCap(c, 0.5 * math.pi, xi)
    res = axiscap_bound(a, a)
    e = orthonormal_complement(c)
    bad, worst = 0, 0.0
    for ang in np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False):
        v = math.cos(ang) * e[0] + math.sin(ang) * e[1]
        p = np.concatenate([[0.0], math.cos(xi) * c + math.sin(xi) * v])
        q = np.concatenate([[0.0], math.cos(xi) * c - math.sin(xi) * v])
        if not (a.members(p)[0] and a.members(q)[0]):
            bad += 1
        prod = kernels.qmul(p, q)[0]
        dev = abs(-prod[0] - math.cos(2.0 * xi))
        worst = max(worst, dev)
        if dev > 1e-12:
            bad += 1
    if abs(res.enclosing_cap.t - 2.0 * xi) > 1e-12 or not res.enclosing_cap.center.isclose(
            UnitQuaternion(-1.0), 1e-12):
        bad += 1
    return bad, worst, [], {"bound_t": res.enclosing_cap.t}


def _check_bch(params, n, seed):
    rng = make_rng(seed, 0)
    margin = float(params.get("margin", 1e-3))
    worst, bad, used = 0.0, 0, 0
    while used < n:
        v1 = uniform_s2(rng, 1)[0] * rng.uniform(0.0, math.pi)
        v2 = uniform_s2(rng, 1)[0] * rng.uniform(0.0, math.pi)
        ref = log_so3(exp_so3(v1) @ exp_so3(v2))
        if np.linalg.norm(ref) > math.pi - margin:
            continue
        used += 1
        err = float(np.linalg.norm(bch(v1, v2) - ref))
        worst = max(worst, err)
        bad += err > 1e-9
    return int(bad), worst, [], {}


def _check_boundary_factorization(params, n, seed):
    rng = make_rng(seed, 0)
    a, b = _cap_pair(params, rng)
    total = a.t + b.t
    if total >= math.pi:
        raise DomainError("needs s + t < pi")
    U0, V0 = a.center.as_array(), b.center.as_array()
    center = (a.center * b.center).as_array()
    prod_cap = SphericalCap(a.center * b.center, total)
    p, _ = prod_cap._sample(rng, n, "boundary")
    local = kernels.qmul(kernels.qmul(a.center.conj().as_array(), p), b.center.conj().as_array())
    m = local[:, 1:] / np.linalg.norm(local[:, 1:], axis=1)[:, None]
    u = kernels.qmul(U0, exp_rows(np.full(n, a.t), m))
    v = kernels.qmul(exp_rows(np.full(n, b.t), m), V0)
    err = np.linalg.norm(kernels.qmul(u, v) - p, axis=1)
    on_u = np.abs(u @ U0 - math.cos(a.t))
    on_v = np.abs(v @ V0 - math.cos(b.t))
    worst = float(max(err.max(), on_u.max(), on_v.max()))
    bad = int(np.count_nonzero((err > 1e-9) | (on_u > 1e-9) | (on_v > 1e-9)))
    # strictly interior first factors never land on the product boundary
    ui, tags = a._sample(rng, n, "interior")
    strict = tags["alpha"] < a.t - 1e-6
    vb, _ = b._sample(rng, n, "boundary")
    gap = kernels.qmul(ui[strict], vb[strict]) @ center - math.cos(total)
    bad += int(np.count_nonzero(gap <= 1e-9))
    return bad, worst, [], {"interior_min_gap": float(gap.min()) if gap.size else None}


def _check_necessary_filter(params, n, seed):
    rng = make_rng(seed, 0)
    a, b = _cap_pair(params, rng)
    total = a.t + b.t
    if total >= math.pi or a.t == 0.0 or b.t == 0.0:
        raise DomainError("needs 0 < s, t and s + t < pi")
    p = uniform_s2(rng, n)
    q = uniform_s2(rng, n)
    same = rng.uniform(size=n) < 0.5
    q[same] = p[same]
    flip = rng.uniform(size=n) < 0.25
    q[flip & ~same] = -p[flip & ~same]
    u = kernels.qmul(a.center.as_array(), exp_rows(np.full(n, a.t), p))
    v = kernels.qmul(exp_rows(np.full(n, b.t), q), b.center.as_array())
    bad, agree_true = 0, 0
    for i in range(n):
        verdict = necessary_condition(a, u[i], b, v[i])
        lhs = kernels.qmul(kernels.qmul(a.center.conj().as_array(), u[i]),
                           kernels.qmul(v[i], b.center.conj().as_array()))[0, 0]
        criterion = abs(lhs - math.cos(total)) <= 1e-9
        bad += verdict != criterion
        agree_true += verdict and criterion
    return int(bad), float(bad) / n, [], {"boundary_pairs": int(agree_true)}


_CHECKS = {
    "CAP_CLOSURE": _check_cap_closure,
    "CAP_SHARPNESS": _check_cap_sharpness,
    "FULL_SPHERE_COVERAGE": _check_coverage,
    "ARC_SAME_AXIS": _check_arc_same_axis,
    "ARC_SURFACE_CAP": _check_arc_surface_cap,
    "CORNER_MIN": _check_corner_min,
    "AXISCAP_BOUND": _check_axiscap_bound,
    "AXISCAP_SHARP_HALFPI": _check_axiscap_sharp,
    "BCH_CONSISTENCY": _check_bch,
    "BOUNDARY_IN_PRODUCT_OF_BOUNDARIES": _check_boundary_factorization,
    "NECESSARY_FILTER": _check_necessary_filter,
}


def verify(prop: str, params: dict | None = None, n: int = 10_000, seed: int = 42) -> VerificationReport:
    """Run one named property check and return its report."""
    key = str(prop).upper()
    if key not in _CHECKS:
        raise UsageError(f"unknown property {prop!r}; choose from {', '.join(_CHECKS)}")
    if n < 1:
        raise UsageError("n must be at least 1")
    params = dict(params or {})
    start = time.perf_counter()
    bad, worst, notes, extra = _CHECKS[key](params, int(n), int(seed))
    return VerificationReport(
        property=key,
        n_samples=int(n),
        violations=int(bad),
        worst_slack=float(worst),
        seed=int(seed),
        runtime=time.perf_counter() - start,
        tolerance=TOLERANCES[key],
        claim=PROPERTIES[key],
        params=_jsonable(params),
        notes=notes,
        extra=_jsonable(extra),
    )
