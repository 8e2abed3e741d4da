"""Finite-temperature Lifshitz pressure between layered half-spaces, the
PFA sphere-plate conversion, and the force-calculation uncertainty sources
(optical data spread, water-layer sweep, patch-potential ingestion,
shake-amplitude ratchet bias).

Sign convention: attractive pressure and attractive force gradients are
returned as positive magnitudes.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss

from .constants import Constants, DEFAULT_CONSTANTS, EV_TO_RAD_S
from .dielectric import DielectricModel, gold_model, vacuum_model, water_model
from .exceptions import ConvergenceError, InsufficientDataError
from .kernels import lifshitz_terms

__all__ = [
    "LayerStack",
    "ForceCurve",
    "lifshitz_pressure",
    "sphere_plate_gradient",
    "gradient_curve",
    "gold_air_stack",
    "gold_water_stack",
    "water_layer_sweep",
    "drude_set_uncertainty",
    "ratchet_bias",
    "patch_potential_ingest",
]

#: tiny photon energy (eV) standing in for xi = 0 when sampling permittivity;
#: for Drude metals this realizes the n = 0 TM limit r -> 1 smoothly.
_XI0_EV = 1e-9

_MATSUBARA_BLOCK = 64
_MATSUBARA_CAP = 40_000
_TAIL_TOL = 1e-6


def _panel_nodes(edges=(0.0, 2.0, 6.0, 20.0, 60.0), order=24):
    """Gauss-Legendre nodes/weights on log-spaced panels of u = 2 d (k - k_min)."""
    x, w = leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges, edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


_U_NODES, _U_WEIGHTS = _panel_nodes()


@dataclass(frozen=True)
class LayerStack:
    """Layered half-spaces facing each other across a gap medium.

    Each side is a sequence of (DielectricModel, thickness_m) pairs ordered
    from the gap inward; the last entry must use thickness None
    (semi-infinite substrate).
    """

    side_a: tuple
    side_b: tuple
    gap: DielectricModel = field(default_factory=vacuum_model)

    def __post_init__(self):
        for side in (self.side_a, self.side_b):
            if not side:
                raise ValueError("each side needs at least a substrate")
            *finite, (last_m, last_t) = side
            if last_t is not None:
                raise ValueError("outermost layer must be semi-infinite")
            for _m, t in finite:
                if t is None or t <= 0:
                    raise ValueError("inner layer thicknesses must be positive")

    def _side_eps(self, side, xi_ev):
        eps = np.column_stack([m.eps_iaxis(xi_ev) for m, _t in side])
        thick = np.array([t if t is not None else -1.0 for _m, t in side])
        return np.ascontiguousarray(eps), thick


def gold_air_stack(drude="main") -> LayerStack:
    """Bare gold half-spaces across an air (vacuum) gap."""
    au = gold_model(drude)
    return LayerStack(((au, None),), ((au, None),))


def gold_water_stack(d_w: float, drude="main") -> LayerStack:
    """Gold half-spaces each carrying a water layer of thickness d_w."""
    au = gold_model(drude)
    if d_w <= 0:
        return LayerStack(((au, None),), ((au, None),))
    w = water_model()
    side = ((w, d_w), (au, None))
    return LayerStack(side, side)


def lifshitz_pressure(stack: LayerStack, d: float,
                      T: float | None = None,
                      constants: Constants = DEFAULT_CONSTANTS,
                      u_nodes=None, u_weights=None) -> float:
    """Attractive Casimir pressure (N/m^2, positive) between the stacks.

    Matsubara sum with the n = 0 term halved; truncated when a whole block
    contributes less than 1e-6 of the running total.
    """
    if d <= 0:
        raise ValueError("separation must be positive")
    T = constants.T if T is None else T
    if u_nodes is None:
        u_nodes, u_weights = _U_NODES, _U_WEIGHTS
    xi1_ev = 2 * np.pi * constants.k_B * T / constants.hbar / EV_TO_RAD_S
    total = 0.0
    n0 = 0
    while n0 < _MATSUBARA_CAP:
        n = np.arange(n0, n0 + _MATSUBARA_BLOCK)
        xi_ev = np.where(n == 0, _XI0_EV, n * xi1_ev)
        xi_c = (n * xi1_ev) * EV_TO_RAD_S / constants.c  # rad/m; exact 0 for n=0
        eps_gap = stack.gap.eps_iaxis(xi_ev)
        eps_a, t_a = stack._side_eps(stack.side_a, xi_ev)
        eps_b, t_b = stack._side_eps(stack.side_b, xi_ev)
        terms = lifshitz_terms(d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b,
                               u_nodes, u_weights)
        if n0 == 0:
            terms[0] *= 0.5
        block = float(np.sum(terms))
        total += block
        n0 += _MATSUBARA_BLOCK
        if n0 > _MATSUBARA_BLOCK and abs(block) < _TAIL_TOL * abs(total):
            break
    else:
        raise ConvergenceError(
            f"Matsubara sum not converged after {n0} terms",
            achieved=abs(block) / abs(total),
        )
    return constants.k_B * T / np.pi * total


def sphere_plate_gradient(pressure, R: float, d: float) -> float:
    """PFA force gradient dF/dd = 2 pi R F_pp(d) (N/m).

    ``pressure`` is either a parallel-plate pressure value (N/m^2) or a
    callable d -> pressure.
    """
    p = pressure(d) if callable(pressure) else pressure
    return 2 * np.pi * R * p


@dataclass
class ForceCurve:
    """Force-gradient (or pressure) values on an increasing separation grid."""

    separations: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.separations = np.asarray(self.separations, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.separations) <= 0):
            raise ValueError("separations must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    def __call__(self, d):
        """Log-log interpolation (power-law segments) onto d."""
        sign = np.sign(self.values[0])
        return sign * np.exp(
            np.interp(np.log(d), np.log(self.separations),
                      np.log(np.abs(self.values)))
        )

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["d_m", "value", "label"])
            for d, v in zip(self.separations, self.values):
                w.writerow([f"{d:.9g}", f"{v:.9g}", self.label])

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        data = np.array([[float(r[0]), float(r[1])] for r in rows[1:]])
        label = rows[1][2] if len(rows[1]) > 2 else ""
        return cls(data[:, 0], data[:, 1], label)


def gradient_curve(stack: LayerStack, R: float, separations,
                   T: float | None = None, label: str = "") -> ForceCurve:
    """Sphere-plate Casimir force gradient via the PFA on a grid."""
    vals = [sphere_plate_gradient(lifshitz_pressure(stack, d, T), R, d)
            for d in separations]
    return ForceCurve(np.asarray(separations), np.asarray(vals), label)


def water_layer_sweep(R: float, separations, thicknesses=(0.75e-9, 1.5e-9, 2.25e-9),
                      drude="main", T: float | None = None):
    """Water-layer force uncertainty from the three-thickness sweep.

    Separations are gold-to-gold, so each water layer narrows the actual
    gap by d_w per side and the force grows monotonically with d_w.
    Returns (curves, uncertainty ForceCurve); uncertainty at each
    separation is |F_lo - F_mid|/2 + |F_hi - F_mid|/2.
    """
    if len(thicknesses) != 3:
        raise ValueError("exactly three thicknesses are required")
    lo, mid, hi = sorted(thicknesses)
    separations = np.asarray(separations, dtype=float)
    if separations.min() <= 2 * hi:
        raise ValueError("separations must exceed twice the water thickness")
    curves = {}
    for dw in (lo, mid, hi):
        c = gradient_curve(gold_water_stack(dw, drude), R,
                           separations - 2 * dw, T,
                           label=f"d_w={dw*1e9:.2f}nm")
        curves[dw] = ForceCurve(separations, c.values, c.label)
    unc = 0.5 * np.abs(curves[lo].values - curves[mid].values) + \
        0.5 * np.abs(curves[hi].values - curves[mid].values)
    return curves, ForceCurve(np.asarray(separations), unc, "water layer")


def drude_set_uncertainty(R: float, separations, T: float | None = None):
    """Optical-property uncertainty: gradient difference between the two
    reference Drude parameter sets."""
    main = gradient_curve(gold_air_stack("main"), R, separations, T, "drude main")
    alt = gradient_curve(gold_air_stack("alt"), R, separations, T, "drude alt")
    diff = np.abs(main.values - alt.values)
    return main, alt, ForceCurve(np.asarray(separations), diff, "optical data")


def ratchet_bias(chi: float) -> float:
    """Fractional overestimate of a d^-4 force gradient from finite shake
    amplitude: 2.5 chi^2."""
    if not 0 <= chi < 1:
        raise ValueError("chi must lie in [0, 1)")
    return 2.5 * chi**2


def patch_potential_ingest(path):
    """Per-separation spread of tabulated patch-potential force-gradient
    realizations (CSV: d_m, dFdd_1, dFdd_2, ...).

    Returns a ForceCurve of the sample standard deviation (ddof=1) across
    realizations.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    if data.shape[1] < 3:
        raise InsufficientDataError(
            "need at least two patch-potential realizations"
        )
    std = np.std(data[:, 1:], axis=1, ddof=1)
    return ForceCurve(data[:, 0], std, Path(path).stem)
