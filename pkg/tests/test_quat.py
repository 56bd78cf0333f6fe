import math

import numpy as np
import pytest
from hypothesis import given

from qmink.errors import DomainError
from qmink.quat import (
    ONE, I, J, K, Quaternion, UnitQuaternion, compose_axis_angle, conj, from_axis_angle,
    inner, inv, mul, norm, rotate, to_axis_angle,
)

from conftest import quat4, unit3, unit4, angle

H = math.sqrt(0.5)


def Q(a):
    return Quaternion.from_array(a)


def U(a):
    return UnitQuaternion.from_array(a)


def test_basis_products():
    assert mul(I, J) == K
    assert mul(J, K) == I
    assert mul(K, I) == J
    assert mul(J, I) == -K
    assert mul(I, I) == -ONE


def test_half_turn_products():
    got = mul(U([H, H, 0, 0]), U([H, 0, H, 0]))
    assert got.isclose(Quaternion(0.5, 0.5, 0.5, 0.5))


@given(quat4)
def test_identity_element(q):
    q = Q(q)
    assert mul(ONE, q).isclose(q, 0.0)
    assert mul(q, ONE).isclose(q, 0.0)


def test_conj_inv_norm_examples():
    assert conj(Quaternion(1, 1)) == Quaternion(1, -1)
    assert inv(I).isclose(-I)
    assert norm(Quaternion(1, 1, 1, 1)) == pytest.approx(2.0)


def test_inv_zero():
    with pytest.raises(DomainError, match="zero quaternion has no inverse"):
        inv(Quaternion(0.0))


@given(quat4)
def test_inverse(q):
    q = Q(q)
    if norm(q) < 1e-3:
        return
    assert mul(inv(q), q).isclose(ONE, 1e-12)
    assert mul(q, inv(q)).isclose(ONE, 1e-12)


@given(quat4, quat4)
def test_norm_multiplicative_and_conj_antihomomorphism(a, b):
    a, b = Q(a), Q(b)
    ab = mul(a, b)
    assert norm(ab) == pytest.approx(norm(a) * norm(b), rel=1e-12, abs=1e-300)
    assert conj(ab).isclose(mul(conj(b), conj(a)), 1e-12 * max(1.0, norm(ab)))


@given(unit4(), unit4(), unit4())
def test_associative(a, b, c):
    a, b, c = U(a), U(b), U(c)
    assert mul(mul(a, b), c).isclose(mul(a, mul(b, c)), 1e-12)


def test_unit_times_unit_is_unit():
    assert isinstance(mul(U([H, H, 0, 0]), U([0, 0, 1, 0])), UnitQuaternion)


def test_inner_examples():
    assert inner(ONE, I) == 0.0
    q = Quaternion(1, 2, 3, 4)
    assert inner(q, q) == pytest.approx(norm(q) ** 2)


@given(unit4(), quat4, quat4)
def test_inner_invariance(u, a, b):
    u, a, b = U(u), Q(a), Q(b)
    ref = inner(a, b)
    scale = 1e-12 * max(1.0, norm(a) * norm(b))
    assert inner(mul(u, a), mul(u, b)) == pytest.approx(ref, abs=scale)
    assert inner(mul(a, u), mul(b, u)) == pytest.approx(ref, abs=scale)


def test_unit_quaternion_normalization():
    u = UnitQuaternion(1.0 + 5e-10, 0.0, 0.0, 0.0)
    assert abs(u.norm() - 1.0) <= 1e-12
    with pytest.raises(DomainError):
        UnitQuaternion(1.1, 0, 0, 0)


def test_non_finite_rejected():
    with pytest.raises(DomainError):
        Quaternion(float("nan"))


def test_from_axis_angle_examples():
    assert from_axis_angle([0, 0, 1], math.pi).isclose(K, 1e-15)
    assert from_axis_angle([1, 0, 0], 0.0) == ONE
    assert from_axis_angle([1, 0, 0], math.pi / 2).isclose(Quaternion(H, H), 1e-15)
    with pytest.raises(DomainError):
        from_axis_angle([1, 1, 0], 0.3)


def test_to_axis_angle_examples():
    aa = to_axis_angle(ONE)
    assert aa.degenerate and aa.angle == 0.0 and np.allclose(aa.axis, [1, 0, 0])
    aa = to_axis_angle(K)
    assert np.allclose(aa.axis, [0, 0, 1]) and aa.angle == pytest.approx(math.pi)
    aa = to_axis_angle(Quaternion(0.5, 0.5, 0.5, 0.5))
    assert np.allclose(aa.axis, np.ones(3) / math.sqrt(3), atol=1e-15)
    assert aa.angle == pytest.approx(2 * math.pi / 3, abs=1e-15)


@given(unit4())
def test_to_axis_angle_roundtrip(u):
    u = U(u)
    aa = to_axis_angle(u)
    assert 0.0 <= aa.angle <= math.pi
    back = from_axis_angle(aa.axis, aa.angle)
    assert back.isclose(u, 1e-9) or back.isclose(-u, 1e-9)


def test_rotate_examples():
    assert np.allclose(rotate(from_axis_angle([0, 0, 1], math.pi / 2), [1, 0, 0]), [0, 1, 0], atol=1e-15)
    v = np.array([0.3, -1.2, 2.0])
    assert np.allclose(rotate(ONE, v), v)


@given(unit4(), unit3())
def test_rotate_double_cover_and_isometry(u, v):
    u = U(u)
    r = rotate(u, v)
    assert np.allclose(r, rotate(-u, v), atol=1e-12)
    assert np.linalg.norm(r) == pytest.approx(1.0, abs=1e-12)
    full = mul(mul(u, Quaternion.from_scalar_vector(0.0, v)), u.conj())
    assert abs(full.w) <= 1e-12


def test_compose_examples():
    aa = compose_axis_angle([1, 0, 0], math.pi / 2, [0, 1, 0], math.pi / 2)
    assert np.allclose(aa.axis, np.ones(3) / math.sqrt(3), atol=1e-12)
    assert aa.angle == pytest.approx(2 * math.pi / 3, abs=1e-12)
    aa = compose_axis_angle([0, 0.6, 0.8], 1.1, [0, 0.6, 0.8], -1.1)
    assert aa.degenerate and aa.angle == pytest.approx(0.0, abs=1e-12)
    aa = compose_axis_angle([0, 0, 1], math.pi / 3, [0, 0, 1], math.pi / 3)
    assert np.allclose(aa.axis, [0, 0, 1]) and aa.angle == pytest.approx(2 * math.pi / 3)


@given(unit3(), angle, unit3(), angle)
def test_compose_matches_quaternion_product(n1, t1, n2, t2):
    aa = compose_axis_angle(n1, t1, n2, t2)
    ref = to_axis_angle(mul(from_axis_angle(n1, t1), from_axis_angle(n2, t2)))
    assert aa.angle == pytest.approx(ref.angle, abs=1e-10)
    if math.sin(0.5 * ref.angle) > 1e-8 and ref.angle < math.pi - 1e-6:
        assert np.allclose(aa.axis, ref.axis, atol=1e-10)
