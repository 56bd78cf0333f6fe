import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmink import kernels
from qmink.boundary import (
    CERTIFIED_BOUNDARY, INCONCLUSIVE, BoundaryVerdict, CapUnion, cap_boundary_lemma, inscribed_cap,
    interior_rule, necessary_condition, non_boundary_corollary, product_differential,
    sample_product_boundary, sufficient_condition,
)
from qmink.errors import DomainError
from qmink.quat import ONE, I, J, K, Quaternion, UnitQuaternion, exp_unit, mul
from qmink.rotation_sets import AxisCap, SphericalCap, sample, tangent_plane

from conftest import quat4, unit3, unit4

X, Y, Z = np.eye(3)
Q4 = math.pi / 4


def test_differential_examples():
    assert product_differential(ONE, ONE, "left", I) == I
    assert product_differential(I, ONE, "right", J) == K
    with pytest.raises(ValueError):
        product_differential(I, ONE, "up", J)


@given(quat4, quat4, quat4)
def test_differential_matches_finite_differences(p, q, v):
    p, q, v = (Quaternion.from_array(x) for x in (p, q, v))
    h = 1e-6
    fd_left = (mul(p + h * v, q) - mul(p - h * v, q)) / (2 * h)
    fd_right = (mul(p, q + h * v) - mul(p, q - h * v)) / (2 * h)
    scale = 1e-8 * max(1.0, v.norm() * max(p.norm(), q.norm()))
    assert product_differential(p, q, "left", v).isclose(fd_left, scale)
    assert product_differential(p, q, "right", v).isclose(fd_right, scale)


@given(unit4(), unit4(), quat4)
def test_no_stationary_points(p, q, v):
    p, q, v = UnitQuaternion.from_array(p), UnitQuaternion.from_array(q), Quaternion.from_array(v)
    if v.norm() == 0:
        return
    for d in ("left", "right"):
        assert product_differential(p, q, d, v).norm() == pytest.approx(v.norm(), rel=1e-12)


def test_interior_rule():
    assert interior_rule(True, False)
    assert interior_rule(False, True)
    assert not interior_rule(False, False)


def test_necessary_examples():
    U = SphericalCap(exp_unit(Q4, X), Q4)
    assert necessary_condition(U, ONE, U, ONE)
    V = SphericalCap(exp_unit(Q4, Y), Q4)
    assert not necessary_condition(U, ONE, V, ONE)
    # 1 is interior to the product cap there
    prod_center = mul(U.center, V.center)
    assert prod_center.w > math.cos(2 * Q4)
    with pytest.raises(DomainError):
        necessary_condition(U, exp_unit(0.1, X), U, ONE)


@given(unit4(), unit4(), st.booleans())
def test_necessary_invariance(w1, w2, same):
    W, W2 = UnitQuaternion.from_array(w1), UnitQuaternion.from_array(w2)
    U = SphericalCap(exp_unit(0.5, X), 0.5)
    V = SphericalCap(exp_unit(0.3, X if same else Y), 0.3)
    base = necessary_condition(U, ONE, V, ONE)
    assert base == same
    U2 = SphericalCap(mul(W, U.center), U.t)
    V2 = SphericalCap(mul(V.center, W2), V.t)
    assert necessary_condition(U2, W, V2, W2) == base


def test_necessary_rejects_opposite_sides():
    # tangent planes agree but the moved caps face opposite ways
    U = SphericalCap(exp_unit(0.5, X), 0.5)
    V = SphericalCap(exp_unit(-0.3, X), 0.3)
    assert tangent_plane(U, ONE).same_plane(tangent_plane(V, ONE))
    assert not necessary_condition(U, ONE, V, ONE)


def test_necessary_with_axis_caps():
    a, b = AxisCap(Z, 0.6, 0.3), AxisCap(Z, 1.1, 0.3)
    m = np.array([0.0, math.sin(0.2), math.cos(0.2)])
    n = np.array([math.sin(0.2), 0.0, math.cos(0.2)])
    # planes agree exactly on the rank-defect locus m = n
    assert necessary_condition(a, exp_unit(0.6, m), b, exp_unit(1.1, m))
    assert not necessary_condition(a, exp_unit(0.6, m), b, exp_unit(1.1, n))
    u = exp_unit(0.6, Z)
    with pytest.raises(DomainError):
        necessary_condition(a, exp_unit(0.6, X), a, u)


def test_inscribed_cap():
    cap = SphericalCap(ONE, 2.0)
    u = UnitQuaternion.from_array(sample(cap, 1, 3, "boundary").points[0])
    small = inscribed_cap(cap, u, 0.5)
    assert small.boundary_members(u.as_array()).all()
    assert cap.members(sample(small, 500, 1).points).all()
    assert tangent_plane(small, u).same_plane(tangent_plane(cap, u))
    with pytest.raises(DomainError):
        inscribed_cap(cap, u, 2.5)


def test_cap_boundary_lemma_examples():
    assert cap_boundary_lemma(exp_unit(0.3, X), 0.3, exp_unit(0.7, X), 0.7)
    assert not cap_boundary_lemma(exp_unit(0.3, X), 0.3, exp_unit(0.7, Y), 0.7)
    u0 = exp_unit(0.4, [0.0, 0.6, 0.8])
    assert cap_boundary_lemma(u0, 0.4, u0, 0.4)
    with pytest.raises(DomainError):
        cap_boundary_lemma(exp_unit(0.3, X), 0.3, exp_unit(0.7, X), 0.6)
    with pytest.raises(DomainError):
        cap_boundary_lemma(exp_unit(1.7, X), 1.7, exp_unit(1.7, X), 1.7)


def _lemma_inputs(rng, n):
    for _ in range(n):
        s, t = np.sort(rng.uniform(0.05, math.pi / 2 - 0.05, 2))
        c1 = rng.standard_normal(3)
        c1 /= np.linalg.norm(c1)
        if rng.uniform() < 0.5:
            c2 = c1
        else:
            c2 = c1 + rng.uniform(1e-2, 2.0) * rng.standard_normal(3) / math.sqrt(3)
            c2 /= np.linalg.norm(c2)
        yield exp_unit(s, c1), s, exp_unit(t, c2), t


def test_cap_boundary_lemma_equivalence(rng):
    for U0, s, V0, t in _lemma_inputs(rng, 2000):
        scalar = abs(mul(U0, V0).w - math.cos(s + t)) <= 1e-9
        assert cap_boundary_lemma(U0, s, V0, t) == scalar


def test_sufficient_examples():
    U = SphericalCap(exp_unit(Q4, X), Q4)
    v = sufficient_condition(U, ONE, U, ONE, exp_unit(Q4, X), Q4, n=2000)
    assert v.status == CERTIFIED_BOUNDARY and v.max_slack >= -1e-9
    prod = mul(U.center, U.center)
    assert ONE.w == pytest.approx(1.0) and abs(prod.w - math.cos(2 * Q4)) <= 1e-12
    for bad_s in (math.pi / 2, 2.0):
        with pytest.raises(DomainError):
            sufficient_condition(U, ONE, U, ONE, exp_unit(bad_s, X), bad_s)
    with pytest.raises(DomainError):
        sufficient_condition(U, ONE, U, ONE, exp_unit(0.3, X), Q4)


def test_sufficient_rejects_union():
    union = CapUnion((SphericalCap(exp_unit(Q4, X), Q4), SphericalCap(exp_unit(-Q4, X), Q4)))
    for sign in (1, -1):
        P = exp_unit(sign * Q4, X)
        v = sufficient_condition(union, ONE, union, ONE, P, Q4, n=2000)
        assert v.status == INCONCLUSIVE and v.witness is not None
        assert "witness" in v.to_dict()


def test_verdict_serializes():
    d = BoundaryVerdict(CERTIFIED_BOUNDARY, 0.1).to_dict()
    assert d == {"status": CERTIFIED_BOUNDARY, "max_slack": 0.1, "evidence": ""}


def test_non_boundary_corollary():
    union = CapUnion((SphericalCap(exp_unit(Q4, X), Q4), SphericalCap(exp_unit(-Q4, X), Q4)))
    assert non_boundary_corollary(union, ONE)
    nested = CapUnion((SphericalCap(exp_unit(Q4, X), Q4), SphericalCap(exp_unit(0.3, X), 0.3)))
    with pytest.raises(DomainError):
        non_boundary_corollary(nested, ONE)


def test_cap_union_boundary():
    union = CapUnion((SphericalCap(exp_unit(Q4, X), Q4), SphericalCap(exp_unit(-Q4, X), Q4)))
    assert union.boundary_members(ONE.as_array()).all()
    pts = union._sample(np.random.default_rng(1), 300, "boundary")[0]
    assert union.boundary_members(pts).all()
    with pytest.raises(DomainError):
        CapUnion(())


def test_product_boundary_excludes_translate_of_v():
    union = CapUnion((SphericalCap(exp_unit(Q4, X), Q4), SphericalCap(exp_unit(-Q4, X), Q4)))
    V = SphericalCap(ONE, math.pi / 8)
    cloud = sample_product_boundary(union, V, 100_000, seed=3)
    assert len(cloud) > 1000
    dist = np.arccos(np.clip(cloud.points[:, 0], -1, 1)) - V.t
    assert dist.min() >= 1e-2


def test_product_boundary_factorization(rng):
    U = SphericalCap(UnitQuaternion(0.1, -0.7, 0.1, 0.7), 0.7)
    V = SphericalCap(UnitQuaternion(0.5, 0.5, -0.5, 0.5), 0.9)
    cloud = sample_product_boundary(CapUnion((U,)), V, 2000, seed=1)
    assert len(cloud) == 2000
    prod = SphericalCap(mul(U.center, V.center), 1.6)
    assert prod.boundary_members(cloud.points, 1e-9).all()
