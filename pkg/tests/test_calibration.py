"""Calibration fits on noiseless synthetic campaigns: parameter
recovery, the kappa -> (k, gamma) split, and the documented error
paths."""
import numpy as np
import pytest

from fomlab.analysis import calibration as cal
from fomlab.constants import EPS0
from fomlab.exceptions import InsufficientDataError
from fomlab.simulator import (GroundTruth, ProbeParams, ProtocolConfig,
                              ZERO_NOISE, simulate_campaign, simulate_run)


@pytest.fixture(scope="module")
def truth(gold_gradient):
    return GroundTruth(ProbeParams(), gold_gradient)


@pytest.fixture(scope="module")
def ideal_campaign(truth):
    runs, _m = simulate_campaign(truth, ProtocolConfig(), ZERO_NOISE,
                                 n_runs=4, seed=3)
    return runs


def test_fit_s2omega_recovers_kappa_and_d0(truth, ideal_campaign, cap):
    probe = truth.probe
    fr = cal.fit_s2omega(ideal_campaign[0], cap,
                         gamma_est=probe.gamma)
    # the Casimir force bends the lever by ~2 nm at the closest points,
    # which the electrostatic-only model absorbs as a small kappa bias
    assert fr.kappa == pytest.approx(probe.kappa, rel=3e-3)
    assert fr.d0 == pytest.approx(truth.d0, abs=3e-9)
    assert fr.residual_rms < 1e-2


def test_fit_s2omega_needs_span(truth, cap):
    rng = np.random.default_rng(0)
    run = simulate_run(truth, ProtocolConfig(), ZERO_NOISE, rng)
    run.points = [p for p in run.points if p["d_pz"] - truth.d0 > 2e-6]
    with pytest.raises(InsufficientDataError):
        cal.fit_s2omega(run, cap)


def test_parabola_curvature_matches_cpp(truth, ideal_campaign, cpp_model):
    probe = truth.probe
    d_pz, curv, v0 = cal.fit_parabolas(ideal_campaign[0])
    assert len(d_pz) >= 4
    # curvature/delta_d = 2 kappa C''/R at the true gap; skip the
    # closest points where Casimir bending shifts the gap by ~2 nm
    far = d_pz - truth.d0 > 150e-9
    expect = 2 * probe.kappa / probe.R * cpp_model(d_pz[far] - truth.d0)
    assert curv[far] == pytest.approx(expect, rel=2e-2)
    assert v0 == pytest.approx(truth.V0, abs=2e-3)


def test_fit_cpp_recovers_kappa(truth, ideal_campaign, cpp_model):
    probe = truth.probe
    d_pz, curv, _v0 = cal.fit_parabolas(ideal_campaign[0])
    fr = cal.fit_cpp(d_pz, curv, cpp_model, probe.R)
    assert fr.kappa == pytest.approx(probe.kappa, rel=2e-2)
    assert fr.d0 == pytest.approx(truth.d0, abs=3e-9)


def test_fit_cpp_needs_points(cpp_model, probe):
    with pytest.raises(InsufficientDataError):
        cal.fit_cpp([1e-7], [1.0], cpp_model, probe.R)


def test_separate_k_gamma_identity():
    R = 40e-6
    k_true, gamma_true = 0.1, 1.0 / 700e-9
    kappa = gamma_true * R / (2 * k_true)
    s4 = gamma_true * np.pi**2 * EPS0**2 * R**2 / (8 * k_true**2)
    k, gamma = cal.separate_k_gamma(kappa, s4, R)
    assert k == pytest.approx(k_true, rel=1e-12)
    assert gamma == pytest.approx(gamma_true, rel=1e-12)
    # and the definition closes: kappa = gamma R/(2k)
    assert gamma * R / (2 * k) == pytest.approx(kappa, rel=1e-12)


def test_separate_k_gamma_validation():
    with pytest.raises(ValueError):
        cal.separate_k_gamma(-1.0, 1.0, 40e-6)
    with pytest.raises(ValueError):
        cal.separate_k_gamma(1.0, 0.0, 40e-6)


def test_fit_s4omega_no_channel(truth, ideal_campaign):
    with pytest.raises(InsufficientDataError):
        cal.fit_s4omega(ideal_campaign[0], truth.d0)


def test_calibrate_campaign_noiseless(truth, ideal_campaign, cap,
                                      cpp_model):
    probe = truth.probe
    res = cal.calibrate_campaign(ideal_campaign, cap, cpp_model, probe.R)
    assert res.kappa == pytest.approx(probe.kappa, rel=1e-2)
    assert res.k == pytest.approx(probe.k, rel=1e-2)
    assert res.gamma == pytest.approx(probe.gamma, rel=1e-2)
    assert len(res.kappa_per_run) == 4
    assert "no-calibration-run" not in res.flags


def test_calibration_result_round_trip(tmp_path):
    r = cal.CalibrationResult(kappa=285.0, d0=1e-9, k=0.1, gamma=1.4e6)
    path = tmp_path / "cal.json"
    r.to_json(path)
    import json
    back = json.loads(path.read_text())
    assert back["kappa"] == 285.0
    with pytest.raises(ValueError):
        cal.CalibrationResult(kappa=-1.0, d0=0.0, k=0.1, gamma=1.0)
