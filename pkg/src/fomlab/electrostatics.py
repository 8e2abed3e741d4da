"""Sphere-plate electrostatics: exact capacitance derivatives, PFA and other
approximations, the log-log interpolator used for fitting, modulation force
components, and the water-layer / second-order corrections.

The exact capacitance gradient comes from the bispherical solution

    C' = 4 pi eps0 sum_n [coth(a) - n coth(n a)] / sinh(n a),
    cosh(a) = 1 + d/R.

Note the prefactor: it is 4 pi eps0 (no radius factor), which is what makes
C'/C'_PFA -> 1 at contact; the n = 1 term of the sum vanishes identically,
so the far-field limit is carried by the n = 2 term. C'' is the term-wise
analytic d-derivative using da/dd = 1/(R sinh a), which stays accurate at
d/R << 1 where finite differences cancel catastrophically.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import EPS0
from .exceptions import ConvergenceError
from .kernels import cap_series_sums

__all__ = [
    "SpherePlateGeometry",
    "VoltageState",
    "CapInterpolator",
    "cprime_exact",
    "cdoubleprime_exact",
    "cprime_pfa",
    "cdoubleprime_pfa",
    "cprime_far",
    "cprime_chen",
    "cprime_de",
    "build_interpolator",
    "CppInterpolator",
    "build_cpp_interpolator",
    "electrostatic_force_components",
    "f_4omega_amplitude",
    "second_order_delta",
    "second_order_delta_feedback",
    "water_factor",
    "water_corrected_cprime",
    "water_corrected_cdoubleprime",
    "MAX_SERIES_TERMS",
]

MAX_SERIES_TERMS = 10_000_000


@dataclass(frozen=True)
class SpherePlateGeometry:
    """Surface-to-surface separation d and sphere radius R (m)."""

    d: float
    R: float

    def __post_init__(self):
        if self.d <= 0 or self.R <= 0:
            raise ValueError("d and R must be positive")

    @property
    def x(self) -> float:
        """Aspect ratio d/R."""
        return self.d / self.R

    @property
    def alpha(self) -> float:
        """Bispherical parameter: cosh(alpha) = 1 + d/R."""
        return float(np.arccosh(1.0 + self.d / self.R))


@dataclass(frozen=True)
class VoltageState:
    """Drive voltages of the modulation protocol.

    V0 is the force-minimizing (contact) potential, V0_cpp the force-gradient
    minimizing potential seen by the DC parabola sweeps.
    """

    V_AC: float = 0.0
    V_DC: float = 0.0
    V0: float = 0.0
    V0_cpp: float = 0.0
    omega_A: float = 2 * np.pi * 77.0

    def __post_init__(self):
        if self.V_AC < 0:
            raise ValueError("V_AC must be non-negative")


def _series(g: SpherePlateGeometry, rel_tol: float):
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    s, s_alpha, n, ok = cap_series_sums(g.alpha, rel_tol, MAX_SERIES_TERMS)
    if not ok:
        raise ConvergenceError(
            f"capacitance series not converged after {n} terms at d/R={g.x:.3e}",
            achieved=rel_tol,
        )
    return s, s_alpha


def cprime_exact(g: SpherePlateGeometry, rel_tol: float = 1e-9) -> float:
    """Exact capacitance gradient dC/dd (F/m); negative."""
    s, _ = _series(g, rel_tol)
    return 4 * np.pi * EPS0 * s


def cdoubleprime_exact(g: SpherePlateGeometry, rel_tol: float = 1e-9) -> float:
    """Exact second capacitance derivative d2C/dd2 (F/m^2); positive."""
    _, s_alpha = _series(g, rel_tol)
    return 4 * np.pi * EPS0 * s_alpha / (g.R * np.sinh(g.alpha))


def cprime_pfa(g: SpherePlateGeometry) -> float:
    """Proximity-force approximation C' = -2 pi eps0 R / d."""
    return -2 * np.pi * EPS0 * g.R / g.d


def cdoubleprime_pfa(g: SpherePlateGeometry) -> float:
    """PFA second derivative C'' = 2 pi eps0 R / d^2."""
    return 2 * np.pi * EPS0 * g.R / g.d**2


def cprime_far(g: SpherePlateGeometry) -> float:
    """Leading far-field term of the exact series (n = 2; n = 1 vanishes)."""
    a = g.alpha
    return 4 * np.pi * EPS0 * (1 / np.tanh(a) - 2 / np.tanh(2 * a)) / np.sinh(2 * a)


# Polynomial fit of the exact sphere-plate electrostatic force,
# F = 2 pi eps0 V^2 sum_n c_n (d/R)^(n-1) (Chen et al.); kept only as a
# named reference curve for the approximation-comparison plot.
_CHEN_COEFFS = (
    -0.5, -1.18260, 22.2375, -571.366, 9595.23, -90200.5, 383084.0, -300357.0
)


def cprime_chen(g: SpherePlateGeometry) -> float:
    x = g.x
    acc = sum(c * x ** (n - 1) for n, c in enumerate(_CHEN_COEFFS))
    return 4 * np.pi * EPS0 * acc


def cprime_de(g: SpherePlateGeometry) -> float:
    """Gradient-corrected PFA reference curve.

    Leading small-d/R correction to the PFA ratio, extracted from the exact
    series: C'/C'_PFA = 1 + (x/3) ln x - 0.505 x + O(x^2 ln x).
    """
    x = g.x
    return cprime_pfa(g) * (1.0 + x * np.log(x) / 3.0 - 0.505 * x)


class CapInterpolator:
    """Log-log linear interpolation of the exact C' on a node grid.

    Inside the node range: linear interpolation of log(-C'/(eps0 R)) versus
    log(d/R). Below the range the PFA form is used, above it the leading
    far-field term, so evaluation is defined for every d > 0.
    """

    def __init__(self, R: float, x_nodes: np.ndarray, logc_nodes: np.ndarray):
        self.R = float(R)
        self.log_x = np.log(np.asarray(x_nodes, dtype=float))
        if np.any(np.diff(self.log_x) <= 0):
            raise ValueError("nodes must be strictly increasing in d/R")
        self.log_c = np.asarray(logc_nodes, dtype=float)
        self.x_min = float(x_nodes[0])
        self.x_max = float(x_nodes[-1])

    @property
    def node_count(self) -> int:
        return len(self.log_x)

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        scalar = d.ndim == 0
        d = np.atleast_1d(d)
        x = d / self.R
        out = np.empty_like(x)
        lo = x < self.x_min
        hi = x > self.x_max
        mid = ~(lo | hi)
        if np.any(mid):
            logc = np.interp(np.log(x[mid]), self.log_x, self.log_c)
            out[mid] = -EPS0 * self.R * np.exp(logc)
        if np.any(lo):
            out[lo] = -2 * np.pi * EPS0 * self.R / d[lo]
        if np.any(hi):
            out[hi] = [
                cprime_far(SpherePlateGeometry(di, self.R)) for di in d[hi]
            ]
        return float(out[0]) if scalar else out


def build_interpolator(R: float, x_range=(1e-3, 10.0), node_count: int = 43,
                       rel_tol: float = 1e-9) -> CapInterpolator:
    """Tabulate the exact series at log-spaced nodes in d/R."""
    x_nodes = np.geomspace(x_range[0], x_range[1], node_count)
    logc = np.array([
        np.log(-cprime_exact(SpherePlateGeometry(x * R, R), rel_tol) / (EPS0 * R))
        for x in x_nodes
    ])
    return CapInterpolator(R, x_nodes, logc)


class CppInterpolator:
    """Log-log linear interpolation of the exact C'' (positive).

    Outside the node range the end-interval power law is extended, which
    matches the PFA d^-2 behavior at small d/R.
    """

    def __init__(self, R: float, x_nodes, logc_nodes):
        self.R = float(R)
        self.log_x = np.log(np.asarray(x_nodes, dtype=float))
        self.log_c = np.asarray(logc_nodes, dtype=float)

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        scalar = d.ndim == 0
        lx = np.log(np.atleast_1d(d) / self.R)
        out = np.interp(lx, self.log_x, self.log_c)
        lo = lx < self.log_x[0]
        hi = lx > self.log_x[-1]
        if np.any(lo):
            s = (self.log_c[1] - self.log_c[0]) / \
                (self.log_x[1] - self.log_x[0])
            out[lo] = self.log_c[0] + s * (lx[lo] - self.log_x[0])
        if np.any(hi):
            s = (self.log_c[-1] - self.log_c[-2]) / \
                (self.log_x[-1] - self.log_x[-2])
            out[hi] = self.log_c[-1] + s * (lx[hi] - self.log_x[-1])
        out = EPS0 / self.R * np.exp(out)
        return float(out[0]) if scalar else out


def build_cpp_interpolator(R: float, x_range=(2e-4, 2.0),
                           node_count: int = 120,
                           rel_tol: float = 1e-9) -> CppInterpolator:
    """Tabulate the exact C'' at log-spaced nodes in d/R."""
    x_nodes = np.geomspace(x_range[0], x_range[1], node_count)
    logc = np.array([
        np.log(cdoubleprime_exact(SpherePlateGeometry(x * R, R), rel_tol)
               * R / EPS0)
        for x in x_nodes
    ])
    return CppInterpolator(R, x_nodes, logc)


def electrostatic_force_components(g: SpherePlateGeometry, v: VoltageState,
                                   cprime: float | None = None):
    """(F_DC, F_a, F_b): static force and the amplitudes at w_A and 2 w_A (N).

    F_DC = C'/2 ((V_DC+V0)^2 + V_AC^2/2); F_a = C' V_AC (V_DC+V0);
    F_b = C' V_AC^2 / 4.
    """
    cp = cprime_exact(g) if cprime is None else cprime
    dv = v.V_DC + v.V0
    f_dc = 0.5 * cp * (dv**2 + 0.5 * v.V_AC**2)
    f_a = cp * v.V_AC * dv
    f_b = 0.25 * cp * v.V_AC**2
    return f_dc, f_a, f_b


def f_4omega_amplitude(g: SpherePlateGeometry, v: VoltageState, k: float,
                       cprime: float | None = None,
                       cdoubleprime: float | None = None) -> float:
    """Amplitude of the electrostatic force at 4 w_A: C'' C' V_AC^4 / (32 k)."""
    if k <= 0:
        raise ValueError("spring constant must be positive")
    cp = cprime_exact(g) if cprime is None else cprime
    cpp = cdoubleprime_exact(g) if cdoubleprime is None else cdoubleprime
    return cp * cpp * v.V_AC**4 / (32.0 * k)


def second_order_delta(g: SpherePlateGeometry, V_AC: float, k: float) -> float:
    """Second-order oscillation parameter delta = eps0 pi R V_AC^2 / (k d^2)."""
    delta = EPS0 * np.pi * g.R * V_AC**2 / (k * g.d**2)
    if delta >= 1.0:
        warnings.warn(f"second-order expansion invalid: delta={delta:.3g} >= 1")
    return delta


def second_order_delta_feedback(d: float, S_set: float, gamma: float) -> float:
    """Feedback-loop form delta ~= 2 S_set / (gamma d), valid when V_AC is
    servoed to hold the 2 w_A signal at S_set."""
    delta = 2.0 * S_set / (gamma * d)
    if delta >= 1.0:
        warnings.warn(f"second-order expansion invalid: delta={delta:.3g} >= 1")
    return delta


def water_factor(d: float, d_w: float, eps_w: float) -> float:
    """Relative capacitance increase W from a water layer of thickness d_w.

    W = 1 / (1 + (d_w/d)(1/eps_w - 1)); C' scales by W and C'' by W^2.
    """
    if d_w < 0:
        raise ValueError("water thickness must be non-negative")
    if eps_w <= 1:
        raise ValueError("eps_w must exceed 1")
    denom = d + d_w * (1.0 / eps_w - 1.0)
    if denom <= 0:
        raise ValueError("effective gap closed by the water layer")
    return d / denom


def water_corrected_cprime(g: SpherePlateGeometry, d_w: float, eps_w: float,
                           cprime: float | None = None) -> float:
    cp = cprime_exact(g) if cprime is None else cprime
    return water_factor(g.d, d_w, eps_w) * cp


def water_corrected_cdoubleprime(g: SpherePlateGeometry, d_w: float, eps_w: float,
                                 cdoubleprime: float | None = None) -> float:
    cpp = cdoubleprime_exact(g) if cdoubleprime is None else cdoubleprime
    return water_factor(g.d, d_w, eps_w) ** 2 * cpp
