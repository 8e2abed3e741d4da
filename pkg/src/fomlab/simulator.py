"""Forward model of the force-modulation measurement campaign.

Synthesizes approach/retract runs with the three-step per-separation
protocol, shake-amplitude ratcheting, feedback loops, noise, drift,
optical interference, and instrument artifacts. Demodulation is modeled
with amplitude/phase algebra; a small time-domain lock-in engine is
provided as a validation oracle.

Signal conventions (all LIA outputs in volts):
    S_I  = (gamma/k) (dF_es/dd + dF_C/dd) delta_d   (+ artifacts)
    S_Q  = (gamma/k) F_H(v)
    S_2wA = gamma C' V_AC^2 (1 + delta)/(4 k)
    S_4wA = gamma C' C'' V_AC^4 / (32 k^2)
Attractive gradients are positive throughout, so the clean in-phase
signal is positive while C'-derived signals are negative.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .constants import EPS0
from . import hydrodynamics as hydro
from .casimir import ForceCurve
from .electrostatics import SpherePlateGeometry, cprime_exact, cdoubleprime_exact
from .exceptions import ConfigurationError, ContactError

__all__ = [
    "ProbeParams",
    "ProtocolConfig",
    "NoiseConfig",
    "GroundTruth",
    "RunRecord",
    "ratchet_schedule",
    "simulate_run",
    "simulate_campaign",
    "kelvin_loop",
    "ZERO_NOISE",
    "SLD_NOISE",
    "LASER_NOISE",
    "timedomain_lockin",
    "write_campaign",
    "read_campaign",
]


@dataclass(frozen=True)
class ProbeParams:
    """Cantilever/sphere properties (Table-of-typical-probe defaults)."""

    k: float = 0.1                      # N/m
    gamma: float = 1.0 / 700e-9         # V/m (1/gamma = 700 nm/V)
    R: float = 40e-6                    # m
    omega1: float = 2 * np.pi * 10e3    # rad/s
    Q_far: float = 100.0
    L: float = 250e-6                   # metadata
    W: float = 33e-6                    # metadata

    def __post_init__(self):
        if min(self.k, self.gamma, self.R, self.omega1, self.Q_far) <= 0:
            raise ValueError("probe parameters must be positive")

    @property
    def kappa(self) -> float:
        """Combined sensitivity gamma R / (2 k) (V m / N-equivalent)."""
        return self.gamma * self.R / (2 * self.k)


#: default ratchet table: (minimum separation, shake amplitude), both m.
#: chi = delta_d / d stays below 0.15 at every entry.
DEFAULT_RATCHET = (
    (320e-9, 48e-9),
    (267e-9, 40e-9),
    (214e-9, 32e-9),
    (160e-9, 24e-9),
    (107e-9, 16e-9),
    (54e-9, 8e-9),
    (27e-9, 4e-9),
)


@dataclass(frozen=True)
class ProtocolConfig:
    """Drive frequencies, set points, separation schedule, and ratcheting."""

    omega_pz: float = 2 * np.pi * 211.0
    omega_A: float = 2 * np.pi * 77.0
    S_set: float = 1e-3                 # 2wA amplitude set point (V)
    d_start: float = 5e-6
    d_stop: float = 60e-9
    points_per_decade: int = 24
    ratchet: tuple = DEFAULT_RATCHET
    chi_max: float = 0.15
    bandwidth: float = 1.0              # detection bandwidth (Hz)
    V_AC_cal: float = 8.0               # calibration-run drive (V)
    theta_ref: float = 0.0              # LIA reference phase (rad)
    parabola_min_d: float = 110e-9      # step 3 stops below this
    parabola_points: int = 9
    d_stop_cal: float = 1.2e-6          # closest approach with V_AC_cal
    dwell: float = 15.0                 # seconds per separation point

    def __post_init__(self):
        if self.d_stop >= self.d_start:
            raise ConfigurationError("d_stop must be below d_start")
        for d_min, dd in self.ratchet:
            if dd / d_min > self.chi_max + 1e-12:
                raise ConfigurationError(
                    f"ratchet entry ({d_min}, {dd}) violates chi_max")

    def schedule(self):
        """Approach separations (decreasing) then retract (increasing)."""
        n = int(np.ceil(np.log10(self.d_start / self.d_stop)
                        * self.points_per_decade))
        approach = np.geomspace(self.d_start, self.d_stop, n)
        return np.concatenate([approach, approach[::-1][1:]])


@dataclass(frozen=True)
class NoiseConfig:
    """Noise, drift, and artifact magnitudes. Zero everything for an
    ideal instrument."""

    n_d: float = 2.3e-7                 # detector noise density (V/rtHz)
    lia_offset: float = -180e-6         # LIA output offset (V)
    lia_offset_drift: float = 0.05      # fractional wander per campaign
    ac_coupling: float = 10e-6          # offset into the Kelvin loop (V)
    interference_amp: float = 1.0       # primary fringe (N/m^2); SLD preset
    interference_amp2: float = 0.3      # lambda/4 harmonic (N/m^2)
    interference_lambda: float = 860e-9
    interference_phase: float = 0.7
    interference_phase2: float = 2.1
    drift_rate: float = 50e-9 / 3600.0  # initial d0 drift (m/s)
    drift_tau: float = 6 * 3600.0       # drift decay time constant (s)
    sens_drift: float = 0.10            # gamma drift over the campaign
    kappa_jitter: float = 0.01          # run-to-run sensitivity jitter
    theta_ref_err: float = np.deg2rad(0.2)  # reference phase error (rad)
    phase_leak_frac: float = 1.0        # fraction of the phi_c/2 lag leaking

    def __post_init__(self):
        for name in ("n_d", "ac_coupling", "interference_amp",
                     "interference_amp2", "drift_tau", "sens_drift",
                     "kappa_jitter"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


ZERO_NOISE = NoiseConfig(
    n_d=0.0, lia_offset=0.0, lia_offset_drift=0.0, ac_coupling=0.0,
    interference_amp=0.0, interference_amp2=0.0, drift_rate=0.0,
    sens_drift=0.0, kappa_jitter=0.0, theta_ref_err=0.0,
    phase_leak_frac=0.0,
)

#: low-coherence source: the default fringe level
SLD_NOISE = NoiseConfig()

#: coherent laser source: roughly tenfold stronger fringes
LASER_NOISE = NoiseConfig(interference_amp=10.0, interference_amp2=3.0)


class GroundTruth:
    """Physics state feeding the simulator.

    Capacitance derivatives come from dense log-log tables of the exact
    series; the Casimir gradient is a precomputed ForceCurve (so a whole
    campaign needs only one Lifshitz sweep).
    """

    def __init__(self, probe: ProbeParams, casimir_gradient: ForceCurve,
                 hydro_params: hydro.HydroParams | None = None,
                 V0: float = 30e-3, d0: float = 150e-9,
                 d_w: float = 0.0, eps_w: float = 77.0,
                 campaign_duration: float = 13 * 3600.0,
                 bending: bool = True):
        self.probe = probe
        self.casimir = casimir_gradient
        self.hydro = hydro_params or hydro.HydroParams.from_far_field_q(
            probe.k, probe.omega1, probe.Q_far, R=probe.R)
        self.V0 = V0
        self.d0 = d0
        self.d_w = d_w
        self.eps_w = eps_w
        self.campaign_duration = campaign_duration
        self.bending = bending
        x = np.geomspace(2e-4, 1.0, 120)
        cp = np.array([cprime_exact(SpherePlateGeometry(xi * probe.R, probe.R))
                       for xi in x])
        cpp = np.array([cdoubleprime_exact(SpherePlateGeometry(xi * probe.R, probe.R))
                        for xi in x])
        self._log_x = np.log(x)
        self._log_cp = np.log(-cp)
        self._log_cpp = np.log(cpp)

    def _water(self, d):
        if self.d_w == 0.0:
            return 1.0
        return d / (d + self.d_w * (1.0 / self.eps_w - 1.0))

    def cprime(self, d):
        base = -np.exp(np.interp(np.log(d / self.probe.R),
                                 self._log_x, self._log_cp))
        return self._water(d) * base

    def cdoubleprime(self, d):
        base = np.exp(np.interp(np.log(d / self.probe.R),
                                self._log_x, self._log_cpp))
        return self._water(d) ** 2 * base

    def casimir_gradient(self, d):
        return self.casimir(d)

    def casimir_force(self, d):
        """Force from the gradient curve via its local power law."""
        eps = 1e-3
        p = -(np.log(self.casimir(d * (1 + eps))) -
              np.log(self.casimir(d * (1 - eps)))) / (2 * eps)
        return self.casimir(d) * d / max(p - 1.0, 0.5)


def ratchet_schedule(d, direction="approach", ratchet=DEFAULT_RATCHET,
                     far_amplitude=48e-9):
    """Shake amplitude for separation d (m).

    The amplitude is a pure function of separation, so on approach it
    only decreases and on retract it only increases.
    """
    if d <= 0:
        raise ValueError("separation must be positive")
    amp = None
    for d_min, dd in ratchet:
        if d >= d_min:
            amp = dd
            break
    if amp is None:
        amp = ratchet[-1][1]
    return min(amp, far_amplitude)


def kelvin_loop(d, cprime, V0_true, offset, probe: ProbeParams, V_AC):
    """Reported minimizing potential from the omega_A feedback loop.

    An extraneous offset voltage at the loop input shifts the null:
    V0_reported = V0 + offset k / (gamma C' V_AC), an artifact
    proportional to 1/C'.
    """
    if cprime >= 0:
        raise ValueError("C' must be negative")
    if V_AC <= 0:
        raise ValueError("V_AC must be positive for the loop to operate")
    return V0_true + offset * probe.k / (probe.gamma * cprime * V_AC)


@dataclass
class RunRecord:
    """One approach/retract run: per-separation channel records."""

    direction: str
    t_start: float
    calibration: bool
    points: list = field(default_factory=list)
    null_samples: list = field(default_factory=list)
    jtc: bool = False
    meta: dict = field(default_factory=dict)

    def to_jsonl(self, path):
        with open(path, "w") as fh:
            header = {k: v for k, v in asdict(self).items() if k != "points"}
            fh.write(json.dumps({"header": header}) + "\n")
            for p in self.points:
                fh.write(json.dumps(p) + "\n")

    @classmethod
    def from_jsonl(cls, path):
        with open(path) as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        rec = cls(**lines[0]["header"])
        rec.points = lines[1:]
        return rec

    def channel(self, name):
        return np.array([p[name] for p in self.points if name in p])


def _solve_vac(truth: GroundTruth, d, S_set, gamma_eff):
    """V_AC maintaining the 2wA set point, with the second-order term."""
    k = truth.probe.k
    cp = abs(truth.cprime(d))
    vac2 = 4 * k * S_set / (gamma_eff * cp)
    for _ in range(3):
        delta = EPS0 * np.pi * truth.probe.R * vac2 / (k * d**2)
        vac2 = 4 * k * S_set / (gamma_eff * cp * (1 + delta))
    return np.sqrt(vac2), delta


def _interference_pressure(d_pz, noise: NoiseConfig):
    lam = noise.interference_lambda
    return (noise.interference_amp *
            np.sin(4 * np.pi * d_pz / lam + noise.interference_phase) +
            noise.interference_amp2 *
            np.sin(8 * np.pi * d_pz / lam + noise.interference_phase2))


def simulate_run(truth: GroundTruth, protocol: ProtocolConfig,
                 noise: NoiseConfig, rng: np.random.Generator,
                 t_start: float = 0.0, calibration: bool = False) -> RunRecord:
    """Synthesize one approach/retract run.

    The run aborts and is flagged as a jump-to-contact event if the
    instantaneous gap closes or the JTC criterion k < dF/dd is met.
    """
    probe = truth.probe
    k, R = probe.k, probe.R
    sigma = noise.n_d * np.sqrt(protocol.bandwidth)
    run_jitter = 1.0 + noise.kappa_jitter * rng.standard_normal()
    rec = RunRecord(direction="approach-retract", t_start=t_start,
                    calibration=calibration,
                    meta={"S_set": protocol.S_set,
                          "V_AC_cal": protocol.V_AC_cal,
                          "kappa_jitter": run_jitter})

    lia_off = noise.lia_offset * (
        1.0 + noise.lia_offset_drift * rng.standard_normal())
    rec.null_samples = list(lia_off + sigma * rng.standard_normal(16))

    def origin(time):
        return truth.d0 + noise.drift_rate * noise.drift_tau * (
            1.0 - np.exp(-time / noise.drift_tau))

    # each run starts from a fresh touch-point estimate, so only the
    # drift accumulated within the run moves the true gap
    d0_run = origin(t_start)
    t = t_start
    schedule = protocol.schedule()
    n_approach = (len(schedule) + 1) // 2
    for idx, d_cmd in enumerate(schedule):
        direction = "approach" if idx < n_approach else "retract"
        if calibration and d_cmd < protocol.d_stop_cal:
            continue
        d0_t = origin(t)
        d_pz = d_cmd + d0_run            # logged piezo coordinate
        gap = d_pz - d0_t
        if gap <= 0:
            rec.jtc = True
            break
        # sensitivity drift attributed to gamma
        gamma_eff = probe.gamma * run_jitter * (
            1.0 + noise.sens_drift * t / truth.campaign_duration)

        bending = truth.casimir_force(gap) / k if truth.bending else 0.0
        gap -= bending
        if gap <= 0:
            rec.jtc = True
            break
        f_grad_c = truth.casimir_gradient(gap)
        if k < f_grad_c:
            rec.jtc = True
            break

        delta_d = ratchet_schedule(d_cmd, direction, protocol.ratchet)
        point = {"d_pz": d_pz, "t": t, "delta_d": delta_d,
                 "direction": direction}

        cp = truth.cprime(gap)
        cpp = truth.cdoubleprime(gap)

        # --- step 1: electrostatic drive at omega_A ---
        # the DC component of the AC drive force statically bends the
        # cantilever toward the plate; solve self-consistently
        g1 = gap
        for _ in range(16):
            if calibration:
                vac = protocol.V_AC_cal
                delta = EPS0 * np.pi * R * vac**2 / (k * g1**2)
            else:
                vac, delta = _solve_vac(truth, g1, protocol.S_set, gamma_eff)
            if not truth.bending:
                break
            g1 = gap - abs(truth.cprime(g1)) * vac**2 / (4 * k)
            if g1 <= 0:
                break
        if g1 <= 0 or k < 0.25 * truth.cdoubleprime(g1) * vac**2:
            rec.jtc = True
            rec.points.append(point)
            break
        cp1 = truth.cprime(g1)
        s_2wa = gamma_eff * cp1 * vac**2 * (1 + delta) / (4 * k)
        v0_rep = kelvin_loop(g1, cp1, truth.V0, noise.ac_coupling, probe, vac)
        point.update(
            V_AC=vac,
            S_2wA=s_2wa + sigma * rng.standard_normal() + lia_off,
            V0=v0_rep + (sigma / max(vac, 1e-6)) * rng.standard_normal(),
        )
        if calibration:
            s_4wa = gamma_eff * cp1 * truth.cdoubleprime(g1) * vac**4 / \
                (32 * k**2)
            point["S_4wA"] = s_4wa + sigma * rng.standard_normal()

        # --- step 2: force measurement at omega_pz ---
        v_resid = truth.V0 - v0_rep
        f_grad_es = 0.5 * cpp * v_resid**2
        f_grad = f_grad_c + f_grad_es
        phi_c = hydro.phase_lag(gap, protocol.omega_pz, k, probe.omega1,
                                truth.hydro)
        v_plate = protocol.omega_pz * delta_d
        f_h = hydro.hydro_force_amplitude(gap, v_plate, truth.hydro) + \
            truth.hydro.Gamma0 * v_plate
        interf = _interference_pressure(d_pz, noise) * 2 * np.pi * R
        phase_err = noise.theta_ref_err + noise.phase_leak_frac * 0.5 * phi_c
        s_i = (gamma_eff / k) * ((f_grad + interf) * delta_d +
                                 f_h * np.sin(phase_err))
        s_q = (gamma_eff / k) * f_h * np.cos(phase_err)
        defl = gamma_eff * (truth.casimir_force(gap) / k)
        point.update(
            S_I=s_i + lia_off + sigma * rng.standard_normal(),
            S_Q=s_q + sigma * rng.standard_normal(),
            deflection=defl + 4 * sigma * rng.standard_normal(),
        )

        # --- step 3: voltage parabolas (suppressed close in) ---
        if d_cmd >= protocol.parabola_min_d and not calibration:
            # sweep range set for a constant parabola signal variation
            # of about S_set; the swept DC voltage statically bends the
            # cantilever, which slightly distorts the parabola
            span = np.sqrt(2 * protocol.S_set * k /
                           (gamma_eff * cpp * delta_d))
            v_dc = -v0_rep + np.linspace(-span, span,
                                         protocol.parabola_points)
            if truth.bending:
                g_v = gap - 0.5 * np.abs(cp) * (v_dc + truth.V0)**2 / k
            else:
                g_v = np.full_like(v_dc, gap)
            s_par = (gamma_eff / k) * (
                0.5 * truth.cdoubleprime(g_v) * (v_dc + truth.V0)**2 +
                truth.casimir_gradient(g_v) + interf
            ) * delta_d
            s_par = s_par + lia_off + sigma * rng.standard_normal(len(v_dc))
            point["parabola_V"] = list(v_dc)
            point["parabola_S"] = list(s_par)

        rec.points.append(point)
        t += protocol.dwell
    rec.meta["t_end"] = t
    return rec


def simulate_campaign(truth: GroundTruth, protocol: ProtocolConfig,
                      noise: NoiseConfig, n_runs: int = 30,
                      seed: int = 0, cal_every: int = 0):
    """A sequence of runs sharing one drift clock.

    cal_every = 0 places a single calibration run at the end (current
    practice); n > 0 makes every n-th run a calibration run.
    """
    rng = np.random.default_rng(seed)
    runs = []
    t = 0.0
    for i in range(n_runs):
        if cal_every > 0:
            calibration = (i % cal_every == cal_every - 1)
        else:
            calibration = (i == n_runs - 1)
        rec = simulate_run(truth, protocol, noise, rng, t_start=t,
                           calibration=calibration)
        runs.append(rec)
        t = rec.meta["t_end"] + 60.0
    manifest = {
        "n_runs": n_runs,
        "seed": seed,
        "duration_s": t,
        "probe": asdict(truth.probe),
        "protocol": {k: (list(v) if isinstance(v, tuple) else v)
                     for k, v in asdict(protocol).items()},
        "noise": asdict(noise),
    }
    return runs, manifest


def write_campaign(runs, manifest, outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, rec in enumerate(runs):
        rec.to_jsonl(outdir / f"run_{i:03d}.jsonl")
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True))


def read_campaign(outdir):
    outdir = Path(outdir)
    manifest = json.loads((outdir / "manifest.json").read_text())
    runs = [RunRecord.from_jsonl(p)
            for p in sorted(outdir.glob("run_*.jsonl"))]
    return runs, manifest


def timedomain_lockin(force_of_gap, d, delta_d, omega, harmonics=(1,),
                      cycles=64, samples_per_cycle=256):
    """Quasi-static time-domain oracle.

    The gap follows d + delta_d sin(omega t); the cantilever deflection
    tracks F/k instantaneously (omega << omega1). Returns the complex
    amplitude of each requested harmonic of F(gap(t)), so callers can
    check the analytic demodulation algebra against a sampled waveform.
    """
    n = cycles * samples_per_cycle
    t = np.arange(n) / samples_per_cycle          # time in cycles
    gap = d + delta_d * np.sin(2 * np.pi * t)
    f = force_of_gap(gap)
    out = []
    for h in harmonics:
        ref = np.exp(-2j * np.pi * h * t)
        out.append(2.0 * np.mean(f * ref))
    return out if len(out) > 1 else out[0]
