"""The compiled and numpy kernels must agree."""
import math

import numpy as np
import pytest

from qmink import _pykernels, kernels
from qmink.quat import Quaternion, mul

compiled = pytest.importorskip("qmink._ckernels")
BACKENDS = [compiled, _pykernels]


def _units(rng, n):
    g = rng.standard_normal((n, 4))
    return g / np.linalg.norm(g, axis=1)[:, None]


def test_backend_selection():
    import os
    assert kernels.BACKEND == ("python" if os.environ.get("QMINK_PURE_PYTHON") else "cython")


@pytest.mark.parametrize("impl", BACKENDS)
def test_qmul_matches_scalar_product(impl, rng):
    a, b = rng.standard_normal((50, 4)), rng.standard_normal((50, 4))
    got = kernels.qmul(a, b, impl=impl)
    for i in range(50):
        ref = mul(Quaternion.from_array(a[i]), Quaternion.from_array(b[i])).as_array()
        assert np.allclose(got[i], ref, atol=1e-14)


def test_qmul_backends_agree(rng):
    a, b = rng.standard_normal((1000, 4)), rng.standard_normal((1000, 4))
    assert np.allclose(kernels.qmul(a, b, impl=compiled), kernels.qmul(a, b, impl=_pykernels), atol=1e-15)
    one = a[:1]
    assert np.allclose(kernels.qmul(one, b, impl=compiled), kernels.qmul(one, b, impl=_pykernels), atol=1e-15)


def test_inner_slack_backends_agree(rng):
    pts = _units(rng, 5000)
    c = pts[0]
    for cos_t in (-0.5, 0.0, 0.3):
        r1 = kernels.inner_slack(pts, c, cos_t, 1e-9, impl=compiled)
        r2 = kernels.inner_slack(pts, c, cos_t, 1e-9, impl=_pykernels)
        assert r1[1:] == r2[1:] and r1[0] == pytest.approx(r2[0], abs=1e-15)
        assert r1[2] == int(np.sum(pts @ c < cos_t - 1e-9))


@pytest.mark.parametrize("d1,d2,kappa", [(0.3, 0.5, 0.2), (2.5, 1.0, -0.7), (math.pi, math.pi, 0.0)])
def test_grid_min_backends_agree(d1, d2, kappa):
    r1 = kernels.scalar_grid_min(d1, d2, kappa, 257, 129, impl=compiled)
    r2 = kernels.scalar_grid_min(d1, d2, kappa, 257, 129, impl=_pykernels)
    assert r1[0] == pytest.approx(r2[0], abs=1e-14)
    s = np.linspace(-d1, d1, 257)[:, None]
    t = np.linspace(-d2, d2, 129)[None, :]
    assert r1[0] == pytest.approx((np.cos(s) * np.cos(t) - kappa * np.sin(s) * np.sin(t)).min(), abs=1e-14)


def test_euler_vectors_backends_agree(rng):
    pts = np.vstack([_units(rng, 2000), [[1, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1]]])
    e1 = kernels.euler_vectors(pts, impl=compiled)
    e2 = kernels.euler_vectors(pts, impl=_pykernels)
    assert np.allclose(e1, e2, atol=1e-12)
    assert np.all(np.linalg.norm(e1, axis=1) <= math.pi + 1e-9)
    assert np.array_equal(e1[-3], [0, 0, 0]) and np.array_equal(e1[-2], [0, 0, 0])


def test_thread_count_env(monkeypatch, rng):
    a, b = rng.standard_normal((100, 4)), rng.standard_normal((100, 4))
    monkeypatch.setenv("QMINK_THREADS", "4")
    assert kernels._threads() == 4
    four = kernels.qmul(a, b)
    monkeypatch.setenv("QMINK_THREADS", "bogus")
    assert kernels._threads() == 1
    assert np.array_equal(four, kernels.qmul(a, b))


def test_pure_python_switch():
    import subprocess
    import sys
    code = "import qmink.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**__import__("os").environ, "QMINK_PURE_PYTHON": "1"})
    assert out.stdout.strip() == "python"


def test_shape_errors():
    with pytest.raises(ValueError):
        kernels.qmul(np.zeros((3, 3)), np.zeros((3, 4)))
