"""Uncertainty budget assembly: quadrature total, crossover location,
CSV export, and input validation."""
import numpy as np
import pytest

from fomlab import hydrodynamics as hydro
from fomlab.analysis.budget import UncertaintyBudget, build_budget


@pytest.fixture()
def simple_budget():
    d = np.geomspace(60e-9, 300e-9, 12)
    contributions = {
        "calibration": np.full_like(d, 1e-7),
        "separation": 1e-20 / d**2,
        "stochastic": np.full_like(d, 2e-7),
        "hydrodynamic": np.full_like(d, 1e-7),
        "interference": np.zeros_like(d),
        "electrostatic": np.zeros_like(d),
    }
    return UncertaintyBudget(d, contributions)


def test_total_is_quadrature_sum(simple_budget):
    b = simple_budget
    manual = np.sqrt(sum(np.asarray(c) ** 2
                         for c in b.contributions.values()))
    assert b.total == pytest.approx(manual)


def test_crossover_where_separation_meets_far_terms(simple_budget):
    x = simple_budget.crossover()
    # separation term 1e-20/d^2 equals the far-field quadrature sum
    # sqrt(2e-7^2 + 1e-7^2) at d = 2.11e-7
    expect = np.sqrt(1e-20 / np.hypot(2e-7, 1e-7))
    assert x == pytest.approx(expect, rel=1e-3)


def test_crossover_nan_when_no_crossing():
    d = np.geomspace(60e-9, 300e-9, 5)
    b = UncertaintyBudget(d, {
        "separation": np.full_like(d, 1.0),
        "hydrodynamic": np.full_like(d, 0.1),
        "interference": np.zeros_like(d),
        "stochastic": np.zeros_like(d),
    })
    assert np.isnan(b.crossover())


def test_negative_contribution_rejected():
    d = np.array([1e-7, 2e-7])
    with pytest.raises(ValueError, match="negative"):
        UncertaintyBudget(d, {"stochastic": np.array([1.0, -1.0])})


def test_write_csv_round_trip(simple_budget, tmp_path):
    path = tmp_path / "budget.csv"
    simple_budget.write_csv(path)
    rows = path.read_text().strip().splitlines()
    header = rows[0].split(",")
    assert header[0] == "d_m" and header[-1] == "total"
    assert len(rows) == 1 + len(simple_budget.separations)
    last = [float(v) for v in rows[-1].split(",")]
    assert last[-1] == pytest.approx(simple_budget.total[-1], rel=1e-6)


def test_build_budget_shapes_and_absences(probe, gold_gradient):
    d = np.geomspace(60e-9, 300e-9, 10)
    b = build_budget(d, gold_gradient, probe)
    assert set(b.contributions) == {
        "calibration", "separation", "interference", "hydrodynamic",
        "stochastic", "electrostatic"}
    assert set(b.absent) == {"interference", "hydrodynamic", "stochastic",
                             "electrostatic"}
    # calibration term is the stated fraction of the model gradient
    assert b.contributions["calibration"] == pytest.approx(
        0.05 * gold_gradient(d))
    # separation term uses F'': for a ~d^-4 gradient, sigma_d * 4 F'/d
    approx_fpp = 4.0 * gold_gradient(d) / d
    assert b.contributions["separation"] == pytest.approx(
        2e-9 * approx_fpp, rel=0.15)


def test_build_budget_with_all_sources(probe, gold_gradient):
    d = np.geomspace(60e-9, 300e-9, 10)
    params = hydro.HydroParams.from_far_field_q(
        probe.k, probe.omega1, probe.Q_far, R=probe.R)
    b = build_budget(d, gold_gradient, probe, hydro_params=params,
                     interference_pressure=1.0,
                     stochastic=np.full_like(d, 1e-7),
                     electrostatic=np.full_like(d, 1e-8))
    assert b.absent == []
    assert np.all(b.contributions["hydrodynamic"] > 0)
    assert b.contributions["interference"][0] == pytest.approx(
        2 * np.pi * probe.R)
    assert np.isfinite(b.crossover())
