"""Permittivity models on the imaginary frequency axis.

A metal model combines tabulated optical-loss data (eps'' on the real axis)
with an analytic Drude extension below the lowest tabulated energy. The
imaginary-axis permittivity follows from the Kramers-Kronig rotation

    eps(i xi) = 1 + (2/pi) int_0^inf w eps''(w) / (w^2 + xi^2) dw,

where the portion of the integral below the Drude cutoff is done in closed
form and the tabulated portion by trapezoid quadrature on a log-spaced grid.
All energies are photon energies in eV.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "OpticalDataset",
    "DrudeParams",
    "DielectricModel",
    "drude_eps_imaginary_axis",
    "load_optical_csv",
    "load_model_json",
    "gold_model",
    "water_static_model",
    "water_model",
    "vacuum_model",
    "DRUDE_MAIN",
    "DRUDE_ALT",
    "EPS_WATER_STATIC",
]

#: static relative permittivity of water at 303 K
EPS_WATER_STATIC = 77.0


@dataclass(frozen=True)
class OpticalDataset:
    """Tabulated imaginary permittivity eps''(w) on a photon-energy grid."""

    energies: np.ndarray
    eps_imag: np.ndarray
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        k = np.asarray(self.eps_imag, dtype=float)
        if e.ndim != 1 or e.shape != k.shape or len(e) < 2:
            raise ValueError("energies and eps_imag must be matching 1-D arrays")
        if np.any(e <= 0) or np.any(np.diff(e) <= 0):
            raise ValueError("energies must be strictly increasing and positive")
        if np.any(k < 0):
            raise ValueError("eps_imag must be non-negative")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "eps_imag", k)

    @property
    def e_min(self):
        return float(self.energies[0])

    @property
    def e_max(self):
        return float(self.energies[-1])


@dataclass(frozen=True)
class DrudeParams:
    """Drude parameters (eV): plasma frequency and relaxation rate."""

    omega_p: float
    omega_tau: float

    def __post_init__(self):
        if self.omega_p <= 0 or self.omega_tau <= 0:
            raise ValueError("Drude parameters must be positive")


#: the two reference Drude parameter sets carried through the force stage
DRUDE_MAIN = DrudeParams(8.84, 0.042)
DRUDE_ALT = DrudeParams(8.50, 0.050)


def drude_eps_imaginary_axis(p: DrudeParams, xi):
    """Drude permittivity on the imaginary axis: 1 + wp^2/(xi (xi + wt))."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise ValueError("xi must be positive")
    return 1.0 + p.omega_p**2 / (xi * (xi + p.omega_tau))


def _drude_kk_tail(p: DrudeParams, xi, e_cut):
    """Closed-form KK contribution of the Drude eps'' from 0 to e_cut.

    (2/pi) int_0^Ec wp^2 wt / ((w^2 + wt^2)(w^2 + xi^2)) dw, which for
    Ec -> inf reduces to the full Drude imaginary-axis form minus 1.
    """
    wt = p.omega_tau
    xi = np.asarray(xi, dtype=float)
    # nudge off the removable singularity at xi == wt
    xi = np.where(np.isclose(xi, wt, rtol=1e-9, atol=0.0), wt * (1 + 1e-7), xi)
    pref = p.omega_p**2 * wt / (xi**2 - wt**2)
    val = pref * (np.arctan(e_cut / wt) / wt - np.arctan(e_cut / xi) / xi)
    return 2.0 / np.pi * val


class DielectricModel:
    """Permittivity model evaluated on the imaginary axis.

    Exactly one of three behaviors applies, in priority order:

    * ``static_eps`` set: constant permittivity (used for water in
      electrostatics).
    * ``iaxis_table`` set: log-log interpolation of a tabulated eps(i xi).
    * otherwise: KK rotation of the tabulated datasets plus the analytic
      Drude tail below ``drude_cutoff``.

    Instances are immutable after construction and safe to share across
    threads.
    """

    def __init__(self, datasets=(), drude: DrudeParams | None = None,
                 static_eps: float | None = None, iaxis_table=None,
                 drude_cutoff: float | None = None, label: str = "",
                 points_per_decade: int = 400):
        self.datasets = tuple(datasets)
        self.drude = drude
        self.static_eps = static_eps
        self.label = label
        self.points_per_decade = int(points_per_decade)
        self.iaxis_table = iaxis_table
        if static_eps is None and iaxis_table is None and not self.datasets:
            raise ValueError("model needs datasets, a static value, or a table")
        for a, b in zip(self.datasets, self.datasets[1:]):
            if b.e_min < a.e_max:
                raise ValueError("dataset energy ranges must be ordered and disjoint")
        if self.datasets:
            self.drude_cutoff = (
                float(drude_cutoff) if drude_cutoff is not None
                else self.datasets[0].e_min
            )
            self._grid, self._ke = self._merged_grid(self.points_per_decade)
        else:
            self.drude_cutoff = drude_cutoff

    def _merged_grid(self, ppd):
        """Log-spaced quadrature grid with eps'' interpolated onto it."""
        gs, ks = [], []
        for ds in self.datasets:
            lo, hi = max(ds.e_min, self.drude_cutoff), ds.e_max
            if hi <= lo:
                continue
            n = max(int(np.log10(hi / lo) * ppd), 8)
            g = np.geomspace(lo, hi, n)
            k = np.interp(np.log(g), np.log(ds.energies), ds.eps_imag)
            gs.append(g)
            ks.append(k)
        if not gs:
            raise ValueError("datasets do not cover any range above the cutoff")
        return np.concatenate(gs), np.concatenate(ks)

    def eps_iaxis(self, xi, _ppd=None):
        """Permittivity eps(i xi); xi in eV, scalar or array."""
        xi = np.asarray(xi, dtype=float)
        scalar = xi.ndim == 0
        xi = np.atleast_1d(xi)
        if np.any(xi <= 0):
            raise ValueError("xi must be positive")
        if self.static_eps is not None:
            out = np.full_like(xi, float(self.static_eps))
        elif self.iaxis_table is not None:
            tx, te = self.iaxis_table
            out = np.exp(np.interp(np.log(xi), np.log(tx), np.log(te)))
        else:
            if _ppd is None:
                g, k = self._grid, self._ke
            else:
                g, k = self._merged_grid(_ppd)
            w = g[None, :]
            integrand = w * k[None, :] / (w**2 + xi[:, None] ** 2)
            out = 1.0 + 2.0 / np.pi * np.trapezoid(integrand, g, axis=1)
            if self.drude is not None:
                out = out + _drude_kk_tail(self.drude, xi, self.drude_cutoff)
        return float(out[0]) if scalar else out

    def __call__(self, xi):
        return self.eps_iaxis(xi)


def load_optical_csv(path, label=None) -> OpticalDataset:
    """Read optical data CSV with columns energy_eV,eps2 or energy_eV,n,k."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [c.strip() for c in rows[0]]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    if header[:2] == ["energy_eV", "eps2"]:
        e, k2 = data[:, 0], data[:, 1]
    elif header[:3] == ["energy_eV", "n", "k"]:
        e = data[:, 0]
        k2 = 2.0 * data[:, 1] * data[:, 2]
    else:
        raise ValueError(f"unrecognized optical CSV header {header} in {path}")
    return OpticalDataset(e, k2, label or path.stem)


def load_model_json(path) -> DielectricModel:
    """Build a DielectricModel from a JSON description.

    Keys: "files" (list of {path, range: [lo, hi]}), "drude": {omega_p,
    omega_tau}, "drude_cutoff", "static_eps", "label". File paths are
    resolved relative to the JSON document.
    """
    path = Path(path)
    spec = json.loads(path.read_text())
    datasets = []
    for entry in spec.get("files", []):
        ds = load_optical_csv(path.parent / entry["path"])
        if "range" in entry:
            lo, hi = entry["range"]
            m = (ds.energies >= lo) & (ds.energies <= hi)
            ds = OpticalDataset(ds.energies[m], ds.eps_imag[m], ds.label)
        datasets.append(ds)
    drude = None
    if "drude" in spec:
        drude = DrudeParams(spec["drude"]["omega_p"], spec["drude"]["omega_tau"])
    return DielectricModel(
        datasets,
        drude=drude,
        static_eps=spec.get("static_eps"),
        drude_cutoff=spec.get("drude_cutoff"),
        label=spec.get("label", path.stem),
    )


def _data_path(name):
    return resources.files("fomlab") / "data" / name


def gold_model(drude: DrudeParams | str = "main", drude_cutoff=None) -> DielectricModel:
    """Bundled gold model: measured-range table, UV reference table, Drude tail.

    drude may be "main" (8.84/0.042 eV), "alt" (7.50/0.061 eV) or explicit
    DrudeParams.
    """
    if isinstance(drude, str):
        drude = {"main": DRUDE_MAIN, "alt": DRUDE_ALT}[drude]
    vis = load_optical_csv(_data_path("gold_eps2_visible.csv"), "gold visible/NIR")
    uv = load_optical_csv(_data_path("gold_eps2_uv.csv"), "gold UV reference")
    return DielectricModel(
        [vis, uv], drude=drude, drude_cutoff=drude_cutoff,
        label=f"gold wp={drude.omega_p} wt={drude.omega_tau}",
    )


def water_static_model() -> DielectricModel:
    """Water as a fixed static permittivity (electrostatics only)."""
    return DielectricModel(static_eps=EPS_WATER_STATIC, label="water static")


# Debye relaxations (strength, rate eV) and Lorentz oscillators
# (center eV, strength, width eV) for liquid water; oscillator-model
# parameterization widely used for dispersion-force work.
_WATER_DEBYE = [(0.47, 6.84e-6), (72.62, 7.98e-5)]
_WATER_LORENTZ = [
    (8.46e-4, 2.59e-1, 3.92e-4),
    (4.19e-3, 1.04, 7.43e-3),
    (2.12e-2, 1.62, 2.60e-2),
    (6.25e-2, 5.55e-1, 3.98e-2),
    (8.49e-2, 2.38e-1, 2.99e-2),
    (2.04e-1, 1.34e-2, 8.43e-3),
    (4.18e-1, 7.17e-2, 3.41e-2),
    (8.34, 4.47e-2, 0.75),
    (9.50, 3.27e-2, 1.12),
    (10.41, 4.66e-2, 1.26),
    (11.67, 6.67e-2, 1.58),
    (12.95, 7.42e-2, 1.65),
    (14.13, 9.30e-2, 1.86),
    (15.50, 7.79e-2, 2.22),
    (17.17, 7.9e-2, 2.7),
    (18.89, 4.18e-2, 2.82),
    (21.45, 1.07e-1, 6.87),
    (30.06, 1.33e-1, 18.28),
    (49.45, 5.66e-2, 36.28),
]


def _water_eps_iaxis(xi):
    eps = np.ones_like(xi)
    for c, inv_tau in _WATER_DEBYE:
        eps = eps + c / (1.0 + xi / inv_tau)
    for w0, c, g in _WATER_LORENTZ:
        eps = eps + c * w0**2 / (w0**2 + xi * g + xi**2)
    return eps


def water_model() -> DielectricModel:
    """Water eps(i xi) for Casimir stacks (tabulated oscillator model)."""
    xi = np.geomspace(1e-7, 1e3, 600)
    return DielectricModel(
        iaxis_table=(xi, _water_eps_iaxis(xi)), label="water oscillator model"
    )


def vacuum_model() -> DielectricModel:
    """Vacuum / air gap (eps = 1)."""
    return DielectricModel(static_eps=1.0, label="vacuum")
