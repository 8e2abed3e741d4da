"""Dielectric models: Kramers-Kronig rotation against an independent
fine-grid oracle, the Drude closed form, and file ingestion."""
import json

import numpy as np
import pytest
from scipy.integrate import quad

from fomlab import dielectric as dl


def kk_oracle(energies, eps2, xi):
    """Trapezoid KK rotation on the raw tabulated grid (no resampling)."""
    w = np.asarray(energies)
    return 1.0 + 2.0 / np.pi * np.trapezoid(w * eps2 / (w**2 + xi**2), w)


def test_drude_closed_form_matches_quadrature():
    p = dl.DRUDE_MAIN
    for xi in (0.01, 0.1, 1.0, 5.0):
        # eps''_Drude(w) = wp^2 wt / (w (w^2 + wt^2)); the KK integral of
        # w eps'' has no 1/w singularity and quad handles it directly
        val, _err = quad(
            lambda w: p.omega_p**2 * p.omega_tau /
            ((w**2 + p.omega_tau**2) * (w**2 + xi**2)),
            0.0, np.inf)
        expected = dl.drude_eps_imaginary_axis(p, xi) - 1.0
        assert 2.0 / np.pi * val == pytest.approx(expected, rel=1e-8)


def test_drude_tail_converges_to_full_drude():
    p = dl.DRUDE_MAIN
    xi = np.array([0.05, 0.5, 2.0])
    tail = dl._drude_kk_tail(p, xi, 1e6)
    full = dl.drude_eps_imaginary_axis(p, xi) - 1.0
    assert tail == pytest.approx(full, rel=1e-5)


def test_gold_model_against_raw_grid_oracle():
    m = dl.gold_model()
    for xi in (0.2, 1.0, 4.0):
        total = 1.0 + dl._drude_kk_tail(dl.DRUDE_MAIN, np.array([xi]),
                                        m.drude_cutoff)[0] - 1.0
        for ds in m.datasets:
            lo = max(ds.e_min, m.drude_cutoff)
            sel = ds.energies >= lo
            total += kk_oracle(ds.energies[sel], ds.eps_imag[sel], xi) - 1.0
        assert m.eps_iaxis(xi) == pytest.approx(1.0 + total, rel=5e-3)


def test_gold_model_monotone_decreasing():
    m = dl.gold_model()
    xi = np.geomspace(1e-3, 1e2, 40)
    e = m.eps_iaxis(xi)
    assert np.all(np.diff(e) < 0)
    assert np.all(e > 1.0)


def test_grid_refinement_stable():
    m = dl.gold_model()
    xi = np.array([0.1, 1.0, 10.0])
    coarse = m.eps_iaxis(xi, _ppd=200)
    fine = m.eps_iaxis(xi, _ppd=1200)
    assert np.max(np.abs(coarse / fine - 1.0)) < 1e-3


def test_water_model_static_limit_and_uv_decay():
    w = dl.water_model()
    assert 60.0 < w.eps_iaxis(1e-7) < 90.0
    assert w.eps_iaxis(1e2) < 1.2


def test_optical_csv_nk_conversion(tmp_path):
    p = tmp_path / "nk.csv"
    p.write_text("energy_eV,n,k\n1.0,0.2,3.0\n2.0,1.5,2.0\n")
    ds = dl.load_optical_csv(p)
    assert ds.eps_imag == pytest.approx([2 * 0.2 * 3.0, 2 * 1.5 * 2.0])


def test_optical_csv_bad_header_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("frequency,loss\n1.0,2.0\n")
    with pytest.raises(ValueError, match="header"):
        dl.load_optical_csv(p)


def test_model_json_round_trip(tmp_path):
    (tmp_path / "t.csv").write_text(
        "energy_eV,eps2\n0.5,40\n1.0,12\n5.0,1.1\n")
    doc = {
        "files": [{"path": "t.csv"}],
        "drude": {"omega_p": 8.84, "omega_tau": 0.042},
        "label": "test-gold",
    }
    (tmp_path / "m.json").write_text(json.dumps(doc))
    m = dl.load_model_json(tmp_path / "m.json")
    assert m.label == "test-gold"
    assert m.eps_iaxis(1.0) > 1.0


def test_dataset_validation():
    with pytest.raises(ValueError):
        dl.OpticalDataset(np.array([2.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        dl.OpticalDataset(np.array([1.0, 2.0]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        dl.DrudeParams(-1.0, 0.1)
