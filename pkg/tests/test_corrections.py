"""Artifact estimators: injection-recovery of interference, drift
lines, bending power law, hydro leakage removal, and stochastic
binning."""
import numpy as np
import pytest

from fomlab import hydrodynamics as hydro
from fomlab.analysis.corrections import (bending_correct, drift_correct,
                                         estimate_interference,
                                         hydro_leakage_correct,
                                         stochastic_noise)
from fomlab.exceptions import InsufficientDataError


def test_interference_injection_recovery():
    rng = np.random.default_rng(3)
    d = np.geomspace(5e-7, 5e-6, 400)
    lam = 860e-9
    y = 1.0 * np.sin(4 * np.pi * d / lam + 0.7) + \
        0.3 * np.sin(8 * np.pi * d / lam + 2.1)
    y += 0.01 * rng.standard_normal(len(d))
    tot, (a1, a2) = estimate_interference(d, y, lam=lam)
    assert tot == pytest.approx(1.3, rel=0.05)
    assert a1 > a2


def test_interference_needs_span():
    d = np.linspace(5.0e-7, 5.5e-7, 50)
    with pytest.raises(InsufficientDataError):
        estimate_interference(d, np.zeros_like(d))


def test_drift_lines_track_slow_d0():
    rng = np.random.default_rng(3)
    t = np.arange(10) * 1000.0
    d0 = 150e-9 + 3e-11 * t + 1e-10 * rng.standard_normal(10)
    lines, flags = drift_correct(t, d0)
    pred = np.array([a + b * tt for (a, b), tt in zip(lines, t)])
    assert np.abs(pred - d0).max() < 3e-10
    assert flags == []


def test_drift_global_fallback_for_short_campaigns():
    lines, flags = drift_correct([0.0, 100.0], [1e-9, 2e-9])
    assert "drift-global-fallback" in flags
    assert lines[0] == lines[1]


def test_bending_power_law_recovery():
    sep = np.geomspace(6e-8, 1e-6, 30)
    bend = 2e-25 / sep**2.8
    g = 1 / 700e-9
    adj, p = bending_correct(sep, bend * g, g)
    assert p == pytest.approx(2.8, abs=1e-6)
    assert adj == pytest.approx(bend, rel=1e-9)


def test_bending_skips_without_signal():
    sep = np.geomspace(6e-8, 1e-6, 30)
    with pytest.warns(UserWarning, match="bending"):
        adj, p = bending_correct(sep, np.zeros_like(sep), 1.0)
    assert np.all(adj == 0.0)
    assert np.isnan(p)


def test_hydro_leakage_removed(probe):
    # synthesize channels containing a known gradient plus the hydro
    # leak through the cantilever phase lag, and check it comes back out
    params = hydro.HydroParams.from_far_field_q(
        probe.k, probe.omega1, probe.Q_far, R=probe.R)
    omega_pz = 2 * np.pi * 211.0
    d = np.geomspace(60e-9, 1e-6, 25)
    dd = np.full_like(d, 8e-9)
    grad_true = 1e-21 / d**2
    f_h = np.array([hydro.hydro_force_amplitude(x, omega_pz * a, params)
                    for x, a in zip(d, dd)])
    phi = np.array([hydro.phase_lag(x, omega_pz, probe.k, probe.omega1,
                                    params) for x in d])
    s_i = probe.gamma / probe.k * (grad_true * dd +
                                   f_h * np.sin(0.5 * phi))
    s_q = probe.gamma / probe.k * f_h
    grad, unc = hydro_leakage_correct(d, s_i, s_q, dd, probe, params,
                                      omega_pz)
    assert grad == pytest.approx(grad_true, rel=1e-9)
    assert np.all(unc > 0)


def test_stochastic_noise_matches_standard_error():
    rng = np.random.default_rng(3)
    d = np.repeat(np.linspace(6e-8, 1e-7, 20), 30)
    sigma = 5e-6
    v = sigma * rng.standard_normal(len(d))
    centers, err, _flags = stochastic_noise(d, v)
    assert err.mean() == pytest.approx(sigma / np.sqrt(30), rel=0.2)
    assert len(centers) == len(err)


def test_stochastic_noise_merges_sparse_bins():
    d = np.array([1e-9, 1.1e-9, 50e-9, 50.5e-9, 51e-9, 52e-9, 53e-9])
    _c, _e, flags = stochastic_noise(d, np.ones_like(d))
    assert "bin-merged" in flags
