"""Fundamental limits of the force-modulation measurement range.

Closed forms use the perfect-conductor Casimir force:
    d_min      = (hbar c pi^3 R / (120 k))^(1/4)      (jump to contact)
    F_min      = 2 sqrt(k k_B T B / (omega1 Q))       (thermal floor)
    F'_min     = F_min / delta_d
    d_max      = (pi^3 hbar c R chi / (120 F_min))^(1/3)
The last line equates the perfect-conductor gradient pi^3 hbar c R/(120 d^4)
with F'_min at delta_d = chi d.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import HBAR, C_LIGHT, K_B, T_CHAMBER

__all__ = ["LimitReport", "limits", "fm_shift"]


@dataclass(frozen=True)
class LimitReport:
    d_min: float          # m
    F_min: float          # N
    Fprime_min: float     # N/m, at the far-field shake amplitude
    d_max: float          # m, against the supplied gradient curve if any
    d_max_bound: float    # m, perfect-conductor closed form

    def __post_init__(self):
        if self.d_min >= self.d_max:
            raise ValueError("d_min must lie below d_max")


def limits(probe, B: float = 1.0, chi: float = 0.15,
           T: float = T_CHAMBER, far_amplitude: float = 48e-9,
           gradient_curve=None) -> LimitReport:
    """Measurement-range limits for a probe (ProbeParams-like object).

    gradient_curve, if given, is a callable d -> dF/dd (N/m) used for a
    material-specific d_max; the perfect-conductor bound is always
    reported alongside.
    """
    if B <= 0 or not 0 < chi < 1:
        raise ValueError("need B > 0 and 0 < chi < 1")
    k, R = probe.k, probe.R
    d_min = (HBAR * C_LIGHT * np.pi**3 * R / (120.0 * k)) ** 0.25
    f_min = 2.0 * np.sqrt(k * K_B * T * B / (probe.omega1 * probe.Q_far))
    fp_min = f_min / far_amplitude
    d_max_bound = (np.pi**3 * HBAR * C_LIGHT * R * chi /
                   (120.0 * f_min)) ** (1.0 / 3.0)
    d_max = d_max_bound
    if gradient_curve is not None:
        # solve gradient(d) = F_min/(chi d) by bisection on a log grid
        grid = np.geomspace(d_min, 20e-6, 400)
        excess = np.array([gradient_curve(d) - f_min / (chi * d)
                           for d in grid])
        idx = np.nonzero(excess <= 0)[0]
        if len(idx) and idx[0] > 0:
            i = idx[0]
            f = excess[i - 1] / (excess[i - 1] - excess[i])
            d_max = float(np.exp(np.log(grid[i - 1]) * (1 - f) +
                                 np.log(grid[i]) * f))
    return LimitReport(float(d_min), float(f_min), float(fp_min),
                       float(d_max), float(d_max_bound))


def fm_shift(f_gradient, probe) -> float:
    """Frequency-modulation resonance shift -(omega1/2k) dF/dd (rad/s)."""
    return -probe.omega1 / (2.0 * probe.k) * f_gradient
