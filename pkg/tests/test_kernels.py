"""Backend parity: the compiled kernels and the NumPy reference must
agree to round-off on randomized inputs."""
import numpy as np
import pytest

from fomlab import kernels
from fomlab.kernels import _ref

pytestmark = pytest.mark.skipif(
    not kernels._HAVE_C, reason="compiled kernels not built")


def test_backend_reports_and_switches():
    assert kernels.BACKEND in ("cython", "numpy")
    prev = kernels.set_backend("numpy")
    try:
        assert kernels.BACKEND == "numpy"
    finally:
        kernels.set_backend(prev)
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_cap_series_backend_parity():
    rng = np.random.default_rng(11)
    for _ in range(40):
        alpha = float(np.exp(rng.uniform(np.log(1e-3), np.log(2.0))))
        a = kernels._ckernels.cap_series_sums(alpha, 1e-14, 2_000_000)
        b = _ref.cap_series_sums(alpha, 1e-14, 2_000_000)
        # summation order differs between the backends, so agreement is
        # limited by accumulated round-off in the long small-alpha series
        for va, vb in zip(a, b):
            assert va == pytest.approx(vb, rel=1e-12, abs=0.0)


def test_lifshitz_terms_backend_parity():
    rng = np.random.default_rng(12)
    from fomlab.casimir import _U_NODES, _U_WEIGHTS
    for _ in range(10):
        d = float(np.exp(rng.uniform(np.log(3e-8), np.log(2e-6))))
        n = 16
        xi_c = np.concatenate([[0.0], np.cumsum(rng.uniform(1e4, 1e6, n - 1))])
        eps_gap = np.ones(n)
        eps_a = 1.0 + rng.uniform(0.1, 1e4, (n, 2))
        eps_b = 1.0 + rng.uniform(0.1, 1e4, (n, 1))
        t_a = np.array([1.5e-9, -1.0])
        t_b = np.array([-1.0])
        a = kernels._ckernels.lifshitz_terms(
            d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b, _U_NODES, _U_WEIGHTS)
        b = _ref.lifshitz_terms(
            d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b, _U_NODES, _U_WEIGHTS)
        assert np.asarray(a) == pytest.approx(np.asarray(b), rel=1e-13)


def test_public_entry_points_follow_backend():
    prev = kernels.set_backend("numpy")
    try:
        r1 = kernels.cap_series_sums(0.05, 1e-12, 1_000_000)
        kernels.set_backend("cython")
        r2 = kernels.cap_series_sums(0.05, 1e-12, 1_000_000)
    finally:
        kernels.set_backend(prev)
    assert r1[0] == pytest.approx(r2[0], rel=1e-14)
