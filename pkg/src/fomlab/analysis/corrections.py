"""Run-to-run corrections and artifact estimators: drift, cantilever
bending, hydrodynamic phase leakage, optical interference, and
stochastic noise binning."""
from __future__ import annotations

import warnings

import numpy as np

from .. import hydrodynamics as hydro
from ..exceptions import InsufficientDataError

__all__ = [
    "drift_correct", "bending_correct", "hydro_leakage_correct",
    "estimate_interference", "stochastic_noise",
]


def drift_correct(times, d0s):
    """Per-run linear d0(t) from a 5-run sliding window.

    For run i the window covers runs i-2..i+2 (clipped at the ends).
    Returns ([(intercept, slope)] per run, flags). With fewer than 5
    runs a single global line is used and flagged.
    """
    times = np.asarray(times, dtype=float)
    d0s = np.asarray(d0s, dtype=float)
    flags = []
    if len(times) < 5:
        flags.append("drift-global-fallback")
        if len(times) >= 2:
            b, a = np.polyfit(times, d0s, 1)
        else:
            a, b = d0s[0], 0.0
        return [(float(a), float(b))] * len(times), flags
    lines = []
    for i in range(len(times)):
        lo = max(0, min(i - 2, len(times) - 5))
        sl = slice(lo, lo + 5)
        b, a = np.polyfit(times[sl], d0s[sl], 1)
        lines.append((float(a), float(b)))
    return lines, flags


def bending_correct(separations, deflections, gamma):
    """Separation adjustments from the static-deflection channel.

    Deflection (V) divides by gamma to give a bending distance; a
    power law A d^-p is fit to the detectable points and evaluated at
    every separation. Returns (adjustments (m), fitted exponent p).
    """
    separations = np.asarray(separations, dtype=float)
    bend = np.asarray(deflections, dtype=float) / gamma
    good = bend > 0
    if np.count_nonzero(good) < 3:
        warnings.warn("bending fit skipped: too few positive deflections")
        return np.zeros_like(separations), float("nan")
    try:
        slope, intercept = np.polyfit(np.log(separations[good]),
                                      np.log(bend[good]), 1)
    except np.linalg.LinAlgError:
        warnings.warn("bending power-law fit failed; no adjustment applied")
        return np.zeros_like(separations), float("nan")
    p = -slope
    adj = np.exp(intercept) * separations ** slope
    return adj, float(p)


def hydro_leakage_correct(d, s_i, s_q, delta_d, probe, hydro_params,
                          omega_pz, theta_ref_err=np.deg2rad(0.2)):
    """Remove the hydrodynamic imprint from the in-phase channel.

    The quadrature channel supplies F_H; the cantilever's own phase lag
    phi_c contributes F_H sin(phi_c/2), which is subtracted, while the
    reference-phase error contributes |F_H sin(dtheta)| to the budget.
    Returns (corrected gradient (N/m), per-point uncertainty (N/m)).
    """
    d = np.asarray(d, dtype=float)
    s_i = np.asarray(s_i, dtype=float)
    s_q = np.asarray(s_q, dtype=float)
    delta_d = np.asarray(delta_d, dtype=float)
    f_h = probe.k / probe.gamma * s_q
    phi_c = np.array([hydro.phase_lag(x, omega_pz, probe.k, probe.omega1,
                                      hydro_params) for x in d])
    grad = probe.k / probe.gamma * s_i / delta_d
    grad = grad - f_h * np.sin(0.5 * phi_c) / delta_d
    unc = (np.abs(f_h * np.sin(theta_ref_err)) +
           np.abs(f_h) * np.abs(np.sin(0.5 * phi_c))) / delta_d
    return grad, unc


def _fit_sine(d, y, k_spatial):
    """Linear LSQ of y ~ A sin(k d) + B cos(k d); returns amplitude, phase."""
    s, c = np.sin(k_spatial * d), np.cos(k_spatial * d)
    m = np.column_stack([s, c])
    coef, *_ = np.linalg.lstsq(m, y, rcond=None)
    a, b = coef
    return float(np.hypot(a, b)), float(np.arctan2(b, a)), m @ coef


def estimate_interference(d, residual, lam=860e-9, d_min=500e-9):
    """Interference amplitude from the far-separation residual signal.

    residual: force-gradient data minus the smooth model, in N/m^2
    (pressure-equivalent, i.e. gradient / 2 pi R). Sine components at
    lambda/2 and lambda/4 are fit one at a time; the amplitudes sum to
    the reported estimate. Returns (total, (a_half, a_quarter)).
    """
    d = np.asarray(d, dtype=float)
    residual = np.asarray(residual, dtype=float)
    sel = d > d_min
    if np.ptp(d[sel]) < lam:
        raise InsufficientDataError(
            "need at least two lambda/2 periods beyond d_min")
    x, y = d[sel], residual[sel] - residual[sel].mean()
    a1, _p1, fit1 = _fit_sine(x, y, 4 * np.pi / lam)
    a2, _p2, _ = _fit_sine(x, y - fit1, 8 * np.pi / lam)
    return a1 + a2, (a1, a2)


def stochastic_noise(d, values, bin_width=2e-9, min_per_bin=5):
    """Standard error of the data within narrow separation bins.

    Returns (bin centers, std/sqrt(N) per bin, flags). Bins with fewer
    than min_per_bin points are merged with their neighbor and flagged.
    """
    d = np.asarray(d, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(d)
    d, values = d[order], values[order]
    edges = np.arange(d.min(), d.max() + bin_width, bin_width)
    idx = np.digitize(d, edges)
    flags = []
    groups = []
    current = []
    for b in np.unique(idx):
        current.extend(np.nonzero(idx == b)[0])
        if len(current) >= min_per_bin:
            groups.append(np.array(current))
            current = []
        else:
            flags.append("bin-merged")
    if current:
        if groups:
            groups[-1] = np.concatenate([groups[-1], current])
        else:
            groups.append(np.array(current))
    centers = np.array([d[g].mean() for g in groups])
    err = np.array([values[g].std(ddof=1) / np.sqrt(len(g))
                    if len(g) > 1 else 0.0 for g in groups])
    return centers, err, flags
