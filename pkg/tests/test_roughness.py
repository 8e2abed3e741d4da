"""Topography pipeline: sphere fit recovery, zero-map identity, POLS
ensembles, and the relative size of the Casimir vs electrostatic
corrections."""
import numpy as np
import pytest

from fomlab import roughness as rough
from fomlab.constants import EPS0
from fomlab.exceptions import ContactError


def synthetic_map(rms=3e-9, n=256, pitch=39e-9, R=33e-6, seed=5):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:n, 0:n] * pitch
    x0 = y0 = n * pitch / 2
    cap = np.sqrt(np.maximum(R**2 - (x - x0) ** 2 - (y - y0) ** 2, 0.0)) \
        + (1e-6 - R)
    noise = rng.standard_normal((n, n))
    # short correlation length via a small box blur
    from scipy.ndimage import uniform_filter
    noise = uniform_filter(noise, 3)
    noise *= rms / noise.std()
    return rough.TopographyMap(cap + noise, pitch), R


def test_sphere_fit_recovers_radius():
    m, R_true = synthetic_map()
    residual, R_fit, _c = rough.remove_sphere_fit(m, 30e-6)
    assert R_fit == pytest.approx(R_true, rel=5e-3)
    assert residual.heights.std() < 5e-9


def test_separate_roughness_removes_long_range_bow():
    m, _R = synthetic_map()
    residual, _Rf, _c = rough.remove_sphere_fit(m, 30e-6)
    ny, nx = residual.shape
    y, x = np.mgrid[0:ny, 0:nx]
    bow = 5e-9 * ((x - nx / 2) ** 2 + (y - ny / 2) ** 2) / (nx / 2) ** 2
    bowed = rough.TopographyMap(residual.heights + bow, residual.pitch)
    flat = rough.separate_roughness(bowed, filter_px=32)
    assert abs(flat.heights.mean()) < 0.2e-9
    # the 10 nm corner-to-center trend is mostly gone (edge padding
    # leaves a small residual)
    c = np.median(flat.heights[ny // 2 - 8:ny // 2 + 8,
                               nx // 2 - 8:nx // 2 + 8])
    k = np.median(flat.heights[:16, :16])
    assert abs(c - k) < 2e-9


def test_zero_map_identity():
    # a perfectly smooth map must return the smooth value exactly
    flat = rough.TopographyMap(np.zeros((128, 128)), 39e-9)
    smooth = -2 * np.pi * EPS0 * 33e-6 / 100e-9
    val = rough.oriented_pfa_force(flat, (64, 64), 100e-9, 33e-6,
                                   rough.electrostatic_cprime_density,
                                   smooth, stride=1)
    assert val == smooth


def test_contact_error_names_pixel():
    h = np.zeros((128, 128))
    h[40, 50] = 90e-9
    m = rough.TopographyMap(h, 39e-9)
    with pytest.raises(ContactError, match=r"\(40, 50\)"):
        rough.oriented_pfa_force(m, (64, 64), 60e-9, 33e-6,
                                 rough.electrostatic_cprime_density,
                                 -1.0, stride=1)


def test_casimir_correction_exceeds_electrostatic():
    # the d^-4 kernel weights roughness harder than the d^-2 kernel, so
    # the relative Casimir correction must be the larger one
    m, _R = synthetic_map()
    residual, R_fit, _c = rough.remove_sphere_fit(m, 30e-6)
    r = rough.separate_roughness(residual, filter_px=32)
    pols = (128, 128)
    for d in (60e-9, 100e-9, 200e-9):
        smooth_es = -2 * np.pi * EPS0 * R_fit / d
        es = rough.oriented_pfa_force(
            r, pols, d, R_fit, rough.electrostatic_cprime_density,
            smooth_es, stride=2)
        smooth_ca = np.pi**3 * 1.0545718e-34 * 2.998e8 * R_fit / (360 * d**3)
        ca = rough.oriented_pfa_force(
            r, pols, d, R_fit, rough.casimir_pressure_density,
            smooth_ca, stride=2)
        rel_es = abs(es / smooth_es - 1.0)
        rel_ca = abs(ca / smooth_ca - 1.0)
        assert rel_ca > rel_es


def test_pols_grid_and_ensemble():
    m = rough.TopographyMap(np.zeros((512, 512)), 39e-9)
    ens = rough.PolsEnsemble.uniform(m, count=49, margin_px=64)
    assert len(ens) == 49
    sub = ens.subset(16)
    assert len(sub) == 16
    with pytest.raises(ValueError):
        rough.PolsEnsemble([(600, 10)], m.shape)
    with pytest.raises(ValueError):
        rough.pols_grid(m, count=50)


def test_ensemble_stats_interval():
    med, (lo, hi) = rough.ensemble_stats(np.arange(101.0))
    assert med == 50.0
    assert lo < med < hi


def test_topography_round_trip(tmp_path):
    m = rough.TopographyMap(np.arange(12.0).reshape(3, 4) * 1e-9, 39e-9)
    rough.save_topography(m, tmp_path / "t.f64")
    back = rough.load_topography(tmp_path / "t.f64")
    assert back.pitch == m.pitch
    assert np.array_equal(back.heights, m.heights)


def test_roundness_stats():
    mean, std = rough.roundness_stats([0, 90, 180], [1.0, 1.1, 0.9])
    assert mean == pytest.approx(1.0)
    assert std > 0
