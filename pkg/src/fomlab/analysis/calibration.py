"""Electrostatic calibration fits: sensitivity/offset from the 2wA
signal, curvature parabolas and the C''-based separation, and the
4wA-based split of kappa into k and gamma.

The relative piezo displacements are treated as exact; only the origin
d0 (and the sensitivity) are free.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import least_squares

from ..constants import EPS0
from ..exceptions import ConvergenceError, InsufficientDataError

__all__ = [
    "FitResult", "CalibrationResult", "fit_s2omega", "fit_parabolas",
    "fit_cpp", "fit_s4omega", "separate_k_gamma", "calibrate_campaign",
]


@dataclass
class FitResult:
    kappa: float          # gamma R/(2k) sensitivity
    d0: float             # absolute position offset (m)
    cov: np.ndarray       # 2x2 covariance of (kappa, d0)
    residual_rms: float
    n_points: int
    flags: list = field(default_factory=list)


@dataclass
class CalibrationResult:
    kappa: float
    d0: float
    k: float
    gamma: float
    kappa_per_run: list = field(default_factory=list)
    d0_per_run: list = field(default_factory=list)
    t_per_run: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if min(self.kappa, self.k, self.gamma) <= 0:
            raise ValueError("kappa, k, gamma must be positive")

    def to_json(self, path=None):
        payload = asdict(self)
        text = json.dumps(payload, indent=1, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _lm_fit(resid_fn, x0, what):
    sol = least_squares(resid_fn, x0, method="lm", xtol=1e-12, ftol=1e-12)
    if not sol.success:
        raise ConvergenceError(f"{what} fit failed: {sol.message}",
                               achieved=float(np.linalg.norm(sol.fun)))
    m, n = sol.jac.shape
    jtj = sol.jac.T @ sol.jac
    s2 = 2 * sol.cost / max(m - n, 1)
    try:
        cov = s2 * np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.full((n, n), np.nan)
    return sol, cov


def fit_s2omega(run, cap, S_set=None, gamma_est=None,
                weights=None) -> FitResult:
    """(kappa, d0) from the 2wA electrostatic signal of one run.

    cap is a C' model callable (d -> F/m, negative), e.g. a
    CapInterpolator. When gamma_est is given, two corrections enter the
    model: the second-order oscillation factor
    1 + 2 pi eps0 kappa V_AC^2/(gamma_est d^2), and the static
    electrostatic bending |S_2wA|/gamma_est subtracted from the gap
    (the signal itself measures the DC attraction bending the lever).
    """
    pts = [p for p in run.points if "S_2wA" in p]
    d_pz = np.array([p["d_pz"] for p in pts])
    off = float(np.mean(run.null_samples)) if run.null_samples else 0.0
    s_meas = np.abs(np.array([p["S_2wA"] for p in pts]) - off)
    vac = np.array([p["V_AC"] for p in pts])
    y = s_meas / vac**2
    span_req = 3.0 if run.calibration else 10.0
    if len(d_pz) < 10 or d_pz.max() / d_pz.min() < span_req:
        raise InsufficientDataError(
            "need >= 10 points spanning a decade in separation")
    if S_set is None:
        S_set = run.meta.get("S_set", 0.0)
    R = cap.R
    w = np.ones_like(y) if weights is None else np.asarray(weights)

    def model(p):
        kappa, d0 = p
        d = d_pz - d0
        if np.any(d <= 0):
            return np.full_like(y, 1e6)
        if gamma_est is None:
            return kappa / (2 * R) * np.abs(cap(d))
        # gap, bending, and the second-order factor are interdependent
        # at large V_AC; iterate to the joint fixed point
        g = d
        delta = np.zeros_like(d)
        for _ in range(16):
            delta = 2 * np.pi * EPS0 * kappa * vac**2 / (gamma_est * g**2)
            g = d - s_meas / (gamma_est * (1.0 + delta))
            if np.any(g <= 0):
                return np.full_like(y, 1e6)
        return kappa / (2 * R) * np.abs(cap(g)) * (1.0 + delta)

    def resid(p):
        return w * (model(p) / y - 1.0)

    # starting guesses from the PFA: kappa from the farthest point,
    # d0 from the per-point separations it implies
    kappa0 = y[np.argmax(d_pz)] * d_pz.max() / (np.pi * EPS0)
    d0_0 = float(np.median(d_pz - kappa0 * np.pi * EPS0 / y))
    sol, cov = _lm_fit(resid, [kappa0, d0_0], "S_2wA")
    kappa, d0 = sol.x
    flags = []
    if not (-d_pz.min() < d0 < d_pz.min()):
        flags.append("d0-outside-piezo-range")
    return FitResult(float(kappa), float(d0), cov,
                     float(np.sqrt(np.mean(sol.fun**2))), len(y), flags)


def fit_parabolas(run):
    """Per-separation quadratic fits of the step-3 voltage sweeps.

    Returns (d_pz, curvature/delta_d, V0_cpp) arrays; curvature is the
    second V-derivative of the signal, so curvature/delta_d =
    gamma C''/k = 2 kappa C''/R for an ideal instrument.
    """
    d_pz, curv, v0 = [], [], []
    for p in run.points:
        if "parabola_V" not in p:
            continue
        V = np.asarray(p["parabola_V"])
        S = np.asarray(p["parabola_S"])
        if len(V) < 5:
            raise InsufficientDataError("parabola needs >= 5 voltage points")
        a2, a1, _a0 = np.polyfit(V, S, 2)
        if a2 <= 0:
            raise ValueError(
                f"negative parabola curvature at d_pz={p['d_pz']:.3e}; "
                "check data orientation")
        vertex = -a1 / (2.0 * a2)
        if len(V) >= 7:
            # a quartic absorbs the static-bending distortion of the
            # sweep; the second derivative at the vertex is unbiased
            c = np.polyfit(V, S, 4)
            dc = np.polyder(c)
            roots = np.roots(dc)
            roots = roots[np.isreal(roots)].real
            if len(roots):
                vertex = roots[np.argmin(np.abs(roots - vertex))]
            cc = np.polyval(np.polyder(dc), vertex)
            if cc > 0:
                d_pz.append(p["d_pz"])
                curv.append(cc / p["delta_d"])
                v0.append(-vertex)
                continue
        d_pz.append(p["d_pz"])
        curv.append(2.0 * a2 / p["delta_d"])
        v0.append(-vertex)
    return np.array(d_pz), np.array(curv), np.array(v0)


def fit_cpp(d_pz, curv_over_dd, cpp_model, R) -> FitResult:
    """(kappa, d0) from aligned curvature data.

    cpp_model maps separation to C'' (F/m^2, positive). The model is
    curvature/delta_d = (2 kappa/R) C''(d_pz - d0).
    """
    d_pz = np.asarray(d_pz, dtype=float)
    y = np.asarray(curv_over_dd, dtype=float)
    if len(d_pz) < 4:
        raise InsufficientDataError("need >= 4 curvature points")

    def resid(p):
        kappa, d0 = p
        d = d_pz - d0
        if np.any(d <= 0):
            return np.full_like(y, 1e6)
        return (2 * kappa / R) * cpp_model(d) / y - 1.0

    kappa0 = y[np.argmax(d_pz)] * d_pz.max() ** 2 / (4 * np.pi * EPS0)
    sol, cov = _lm_fit(resid, [kappa0, 0.0], "C''")
    return FitResult(float(sol.x[0]), float(sol.x[1]), cov,
                     float(np.sqrt(np.mean(sol.fun**2))), len(y), [])


def fit_s4omega(run, d0, cap=None, cpp_model=None, gamma_est=None,
                kappa=None) -> float:
    """Amplitude of the 4wA harmonic, normalized so that s4 =
    gamma pi^2 eps0^2 R^2/(8 k^2) for an ideal instrument.

    With cap and cpp_model the exact-series shape |C'(g)| C''(g) is
    used; otherwise the PFA shape V^4/d^3. gamma_est (with kappa)
    removes static bending and the second-order gap shift using the
    measured 2wA signal; d0 is held fixed from the prior C' fit.
    """
    pts = [p for p in run.points if "S_4wA" in p]
    if not pts:
        raise InsufficientDataError("run has no 4wA channel")
    d = np.array([p["d_pz"] for p in pts]) - d0
    vac = np.array([p["V_AC"] for p in pts])
    g = d
    if gamma_est is not None:
        s2 = np.abs(np.array([p["S_2wA"] for p in pts]))
        for _ in range(16):
            if kappa is not None:
                delta = 2 * np.pi * EPS0 * kappa * vac**2 / \
                    (gamma_est * g**2)
            else:
                delta = 0.0
            g = d - s2 / (gamma_est * (1.0 + delta))
    y = np.abs(np.array([p["S_4wA"] for p in pts]))
    if cap is not None and cpp_model is not None:
        shape = np.abs(cap(g)) * cpp_model(g) / \
            (4 * np.pi**2 * EPS0**2 * cap.R**2)
    else:
        shape = 1.0 / g**3
    x = vac**4 * shape
    s4 = float(np.dot(x, y) / np.dot(x, x))
    # signal-to-noise guard: the model must explain most of the variance
    resid = y - s4 * x
    if np.sum(resid**2) > 0.5 * np.sum(y**2):
        raise InsufficientDataError("4wA signal below the noise floor")
    return s4


def separate_k_gamma(kappa, s4, R):
    """Split kappa = gamma R/(2k) using the 4wA amplitude.

    With s4 the fitted coefficient of V^4/d^3 (gamma pi^2 eps0^2 R^2 /
    (8 k^2) for an ideal instrument):
        k = (pi^2 eps0^2 R / 4) (kappa / s4),  gamma = 2 k kappa / R,
    so kappa = gamma R/(2k) holds identically.
    """
    if kappa <= 0 or s4 <= 0:
        raise ValueError("kappa and s4 must be positive")
    k = (np.pi**2 * EPS0**2 * R / 4.0) * kappa / s4
    gamma = 2.0 * k * kappa / R
    return float(k), float(gamma)


def calibrate_campaign(runs, cap, cpp_model, R, gamma_est=None,
                       drift_window=None) -> CalibrationResult:
    """Full calibration over a campaign.

    Per-run (kappa, d0) from the 2wA fits; pooled parabola curvatures
    aligned by per-run d0 and fit to C''; k and gamma from the last
    calibration run's 4wA channel.
    """
    from .corrections import drift_correct

    kappas, d0s, times, flags = [], [], [], []
    for run in runs:
        fr = fit_s2omega(run, cap, gamma_est=gamma_est)
        kappas.append(fr.kappa)
        d0s.append(fr.d0)
        times.append(run.t_start)
        flags.extend(fr.flags)
    kappas, d0s, times = map(np.array, (kappas, d0s, times))

    lines, dflags = drift_correct(times, d0s)
    flags.extend(dflags)

    # pool parabolas, aligning runs by their drift-corrected d0
    all_d, all_c = [], []
    for i, run in enumerate(runs):
        if run.calibration:
            continue
        try:
            d_pz, curv, _v0 = fit_parabolas(run)
        except InsufficientDataError:
            continue
        if len(d_pz) == 0:
            continue
        a, b = lines[i]
        all_d.append(d_pz - (a + b * run.t_start) + np.median(d0s))
        all_c.append(curv)
    if not all_d:
        raise InsufficientDataError("no parabola data in campaign")
    cpp_fit = fit_cpp(np.concatenate(all_d), np.concatenate(all_c),
                      cpp_model, R)

    kappa = float(np.median(kappas))
    cal_runs = [r for r in runs if r.calibration]
    if cal_runs:
        run = cal_runs[-1]
        # the bending and second-order corrections need gamma, which is
        # itself an output; iterate the whole chain to self-consistency
        g_est = gamma_est
        for _ in range(40):
            fr = fit_s2omega(run, cap, gamma_est=g_est)
            s4 = fit_s4omega(run, fr.d0, cap=cap, cpp_model=cpp_model,
                             gamma_est=g_est, kappa=fr.kappa)
            k, gamma = separate_k_gamma(fr.kappa, s4, R)
            if g_est is not None and abs(gamma / g_est - 1.0) < 1e-6:
                break
            g_est = gamma
    else:
        flags.append("no-calibration-run")
        k, gamma = float("nan"), float("nan")
    return CalibrationResult(
        kappa=kappa, d0=cpp_fit.d0, k=k, gamma=gamma,
        kappa_per_run=list(kappas), d0_per_run=list(d0s),
        t_per_run=list(times), flags=flags)
