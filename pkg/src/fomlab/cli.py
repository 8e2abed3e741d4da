"""Command-line front end: reproducible workflows over the physics and
analysis modules, emitting figure-ready CSV/JSON data.

All randomness flows from the single --seed; with a fixed seed and
config the outputs are byte-identical between invocations.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import casimir, electrostatics as es, hydrodynamics as hydro
from . import roughness as rough
from .analysis import (build_budget, calibrate_campaign, estimate_interference,
                       limits, recover_gradient, stochastic_noise)
from .exceptions import FomlabError
from .simulator import (GroundTruth, NoiseConfig, ProbeParams,
                        ProtocolConfig, read_campaign, simulate_campaign,
                        write_campaign, ZERO_NOISE)

CONFIG_DIR_ENV = "FOMLAB_CONFIG_DIR"

CONFIG_KEYS = ("probe", "protocol", "noise", "physics", "seed", "out")


def _fmt(x):
    return f"{x:.9g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def _load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        base = os.environ.get(CONFIG_DIR_ENV)
        if base and not p.is_absolute():
            p = Path(base) / p
    cfg = json.loads(Path(p).read_text())
    unknown = sorted(set(cfg) - set(CONFIG_KEYS))
    if unknown:
        raise FomlabError(
            f"unknown config keys {unknown}; valid keys: {list(CONFIG_KEYS)}")
    return cfg


def _probe_from(cfg, args):
    kw = dict(cfg.get("probe", {}))
    for name in ("k", "gamma", "R", "Q_far"):
        v = getattr(args, f"probe_{name}".lower(), None)
        if v is not None:
            kw[name] = v
    return ProbeParams(**kw)


def _outdir(args):
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- subcommands ---

def cmd_limits(args, cfg):
    probe = _probe_from(cfg, args)
    grad = None
    if args.material == "gold":
        grid = np.geomspace(30e-9, 5e-6, 60)
        grad = casimir.gradient_curve(casimir.gold_air_stack(), probe.R, grid)
    rep = limits(probe, B=args.bandwidth, chi=args.chi,
                 gradient_curve=grad)
    payload = {
        "d_min_m": rep.d_min, "F_min_N": rep.F_min,
        "Fprime_min_N_per_m": rep.Fprime_min,
        "d_max_m": rep.d_max, "d_max_bound_m": rep.d_max_bound,
    }
    out = _outdir(args)
    _write_json(out / "limits.json", payload)
    for k, v in sorted(payload.items()):
        print(f"{k} = {_fmt(v)}")
    return 0


def cmd_capacitance(args, cfg):
    probe = _probe_from(cfg, args)
    lo, hi = args.ratio_range
    interp = es.build_interpolator(probe.R, x_range=(lo, hi),
                                   node_count=args.nodes)
    x = np.geomspace(lo, hi, args.count)
    rows = []
    for xi in x:
        g = es.SpherePlateGeometry(xi * probe.R, probe.R)
        exact = es.cprime_exact(g)
        rows.append((xi, exact, es.cprime_pfa(g), interp(g.d)))
    out = _outdir(args)
    _write_csv(out / "capacitance.csv",
               ["d_over_R", "cprime_exact", "cprime_pfa", "cprime_interp"],
               rows)
    print(f"wrote {out / 'capacitance.csv'} ({len(rows)} rows)")
    return 0


def cmd_lifshitz(args, cfg):
    probe = _probe_from(cfg, args)
    if args.d_w > 0:
        stack = casimir.gold_water_stack(args.d_w, drude=args.drude)
    else:
        stack = casimir.gold_air_stack(drude=args.drude)
    d = np.geomspace(args.d_min, args.d_max, args.count)
    rows = []
    for di in d:
        p = casimir.lifshitz_pressure(stack, di)
        rows.append((di, p, casimir.sphere_plate_gradient(p, probe.R, di)))
    out = _outdir(args)
    _write_csv(out / "lifshitz.csv",
               ["d_m", "pressure_N_per_m2", "gradient_N_per_m"], rows)
    print(f"wrote {out / 'lifshitz.csv'} ({len(rows)} rows)")
    return 0


def cmd_hydro(args, cfg):
    probe = _probe_from(cfg, args)
    p = hydro.HydroParams(b=args.slip, R=probe.R)
    d = np.geomspace(args.d_min, args.d_max, args.count)
    omega = 2 * np.pi * args.freq
    rows = [(di, hydro.damping(di, p),
             hydro.phase_lag(di, omega, probe.k, probe.omega1, p),
             hydro.quality_factor(di, probe.k, probe.omega1, p))
            for di in d]
    out = _outdir(args)
    _write_csv(out / "hydro.csv",
               ["d_m", "damping_kg_per_s", "phase_lag_rad", "Q"], rows)
    print(f"wrote {out / 'hydro.csv'} ({len(rows)} rows)")
    return 0


def cmd_roughness(args, cfg):
    if args.map:
        m = rough.load_topography(args.map)
    else:
        m = rough.load_topography(
            Path(__file__).parent / "data" / "sphere_topography.f64")
    residual, R_fit, _center = rough.remove_sphere_fit(m, args.r_guess)
    roughness = rough.separate_roughness(residual)
    pols_list = rough.pols_grid(roughness, count=args.pols)
    d = np.geomspace(args.d_min, args.d_max, args.count)
    offsets = rough.separation_offsets(roughness, pols_list, R_fit, d,
                                       stride=args.stride)
    med, (lo, hi) = rough.ensemble_stats(offsets)
    out = _outdir(args)
    _write_csv(out / "roughness_offsets.csv", ["pols_index", "offset_m"],
               list(enumerate(offsets)))
    _write_json(out / "roughness.json", {
        "R_fit_m": R_fit, "rms_m": float(roughness.heights.std()),
        "offset_median_m": med, "offset_interval_m": [lo, hi],
        "offset_std_m": float(np.std(offsets)),
    })
    print(f"R_fit = {_fmt(R_fit)} m, offset std = "
          f"{_fmt(float(np.std(offsets)))} m over {len(offsets)} POLS")
    return 0


def _campaign_truth(probe, cfg, noise):
    phys = cfg.get("physics", {})
    grid = np.geomspace(30e-9, 5e-6, 80)
    grad = casimir.gradient_curve(
        casimir.gold_air_stack(phys.get("drude", "main")), probe.R, grid)
    return GroundTruth(probe, grad,
                       V0=phys.get("V0", 30e-3),
                       d0=phys.get("d0", 150e-9),
                       d_w=phys.get("d_w", 0.0))


def cmd_simulate(args, cfg):
    probe = _probe_from(cfg, args)
    protocol = ProtocolConfig(**cfg.get("protocol", {}))
    noise = ZERO_NOISE if args.ideal else NoiseConfig(**cfg.get("noise", {}))
    truth = _campaign_truth(probe, cfg, noise)
    runs, manifest = simulate_campaign(truth, protocol, noise,
                                       n_runs=args.runs, seed=args.seed)
    out = _outdir(args)
    write_campaign(runs, manifest, out)
    # emit the directory on stdout so `simulate | analyze` composes
    print(out)
    return 0


def _analyze(campaign_dir, out):
    runs, manifest = read_campaign(campaign_dir)
    probe = ProbeParams(**{k: v for k, v in manifest["probe"].items()
                           if k in ("k", "gamma", "R", "omega1", "Q_far",
                                    "L", "W")})
    protocol = manifest["protocol"]
    cap = es.build_interpolator(probe.R)
    cpp = es.build_cpp_interpolator(probe.R)
    cal = calibrate_campaign(runs, cap, cpp, probe.R, gamma_est=probe.gamma)
    hp = hydro.HydroParams.from_far_field_q(probe.k, probe.omega1,
                                            probe.Q_far, R=probe.R)
    d, grad, unc = recover_gradient(runs, cal, probe, hp,
                                    protocol["omega_pz"], cap=cap)
    (Path(out) / "calibration.json").write_text(cal.to_json() + "\n")
    _write_csv(Path(out) / "gradient.csv",
               ["d_m", "dFdd_N_per_m", "hydro_unc_N_per_m"],
               list(zip(d, grad, unc)))
    return runs, manifest, probe, protocol, cal, hp, (d, grad, unc)


def cmd_analyze(args, cfg):
    campaign = args.campaign
    if campaign is None:
        campaign = sys.stdin.readline().strip()
    if not campaign:
        raise FomlabError("no campaign directory given (flag or stdin)")
    out = _outdir(args)
    _, _, _, _, cal, _, (d, grad, _u) = _analyze(campaign, out)
    print(cal.to_json())
    return 0


def cmd_budget(args, cfg):
    campaign = args.campaign
    if campaign is None:
        campaign = sys.stdin.readline().strip()
    out = _outdir(args)
    runs, manifest, probe, protocol, cal, hp, (d, grad, unc) = \
        _analyze(campaign, out)
    grid = np.geomspace(args.d_min, args.d_max, args.count)
    model = casimir.gradient_curve(casimir.gold_air_stack(), probe.R,
                                   np.geomspace(30e-9, 5e-6, 80))
    resid_p = (grad - model(d)) / (2 * np.pi * probe.R)
    try:
        amp, _parts = estimate_interference(d, resid_p)
    except FomlabError:
        amp = None
    sel = d < 1.1 * args.d_max
    cen, serr, _fl = stochastic_noise(d[sel], grad[sel])
    stoch = np.interp(grid, cen, serr)
    bud = build_budget(grid, model, probe, hp, protocol["omega_pz"],
                       interference_pressure=amp, stochastic=stoch)
    bud.write_csv(out / "budget.csv")
    _write_json(out / "budget.json", {
        "crossover_m": bud.crossover(),
        "interference_pressure_N_per_m2": amp,
        "absent": bud.absent, "notes": bud.notes,
    })
    print(f"crossover = {_fmt(bud.crossover())} m")
    return 0


def cmd_reproduce(args, cfg):
    """Desk-scale analogs of the headline figures, one directory each."""
    probe = _probe_from(cfg, args)
    out = _outdir(args)

    # force-gradient curves with the optical and water-layer spreads
    grid = np.geomspace(50e-9, 1e-6, 40)
    main, alt, opt_unc = casimir.drude_set_uncertainty(probe.R, grid)
    main.write_csv(out / "gradient_gold.csv")
    alt.write_csv(out / "gradient_gold_alt.csv")
    opt_unc.write_csv(out / "uncertainty_optical.csv")
    _curves, w_unc = casimir.water_layer_sweep(probe.R, grid)
    w_unc.write_csv(out / "uncertainty_water.csv")

    # capacitance model comparison
    ns = argparse.Namespace(ratio_range=(1e-3, 10.0), nodes=43, count=80,
                            out=str(out), **_probe_overrides(args))
    cmd_capacitance(ns, cfg)

    # hydrodynamic damping between the slip bounds
    for tag, b in (("slip_low", hydro.SLIP_LENGTH_LOW),
                   ("slip_high", hydro.SLIP_LENGTH_HIGH)):
        ns = argparse.Namespace(slip=b, d_min=60e-9, d_max=5e-6, count=60,
                                freq=211.0, out=str(out / tag),
                                **_probe_overrides(args))
        cmd_hydro(ns, cfg)

    # limits report
    ns = argparse.Namespace(bandwidth=1.0, chi=0.15, material="gold",
                            out=str(out), **_probe_overrides(args))
    cmd_limits(ns, cfg)

    # short closed-loop campaign, its calibration, and the budget
    camp = out / "campaign"
    ns = argparse.Namespace(runs=args.runs, seed=args.seed, ideal=False,
                            out=str(camp), **_probe_overrides(args))
    cmd_simulate(ns, cfg)
    ns = argparse.Namespace(campaign=str(camp), out=str(out),
                            d_min=60e-9, d_max=300e-9, count=40)
    cmd_budget(ns, cfg)
    return 0


def _probe_overrides(args):
    return {k: getattr(args, k, None)
            for k in ("probe_k", "probe_gamma", "probe_r", "probe_q_far")}


def _add_probe_flags(p):
    p.add_argument("--probe-k", type=float, dest="probe_k",
                   help="spring constant (N/m)")
    p.add_argument("--probe-gamma", type=float, dest="probe_gamma",
                   help="deflection sensitivity (V/m)")
    p.add_argument("--probe-R", type=float, dest="probe_r",
                   help="sphere radius (m)")
    p.add_argument("--probe-Q", type=float, dest="probe_q_far",
                   help="far-field quality factor")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="fomlab",
        description="force-modulation Casimir measurement laboratory")
    ap.add_argument("--config", help="JSON config file (searched in "
                    f"${CONFIG_DIR_ENV} if not found directly)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="output directory (default: cwd)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limits", help="measurement-range limits")
    _add_probe_flags(p)
    p.add_argument("--bandwidth", type=float, default=1.0)
    p.add_argument("--chi", type=float, default=0.15)
    p.add_argument("--material", default="gold",
                   choices=("gold", "perfect-conductor"))
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("capacitance", help="C' model comparison CSV")
    _add_probe_flags(p)
    p.add_argument("--ratio-range", type=float, nargs=2,
                   default=(1e-3, 10.0), metavar=("LO", "HI"))
    p.add_argument("--nodes", type=int, default=43)
    p.add_argument("--count", type=int, default=80)
    p.set_defaults(func=cmd_capacitance)

    p = sub.add_parser("lifshitz", help="Casimir pressure/gradient CSV")
    _add_probe_flags(p)
    p.add_argument("--drude", default="main", choices=("main", "alt"))
    p.add_argument("--d-w", type=float, default=0.0,
                   help="adsorbed water thickness (m)")
    p.add_argument("--d-min", type=float, default=50e-9)
    p.add_argument("--d-max", type=float, default=2e-6)
    p.add_argument("--count", type=int, default=40)
    p.set_defaults(func=cmd_lifshitz)

    p = sub.add_parser("hydro", help="squeeze-film damping CSV")
    _add_probe_flags(p)
    p.add_argument("--slip", type=float, default=hydro.SLIP_LENGTH_LOW)
    p.add_argument("--freq", type=float, default=211.0,
                   help="drive frequency (Hz)")
    p.add_argument("--d-min", type=float, default=60e-9)
    p.add_argument("--d-max", type=float, default=5e-6)
    p.add_argument("--count", type=int, default=60)
    p.set_defaults(func=cmd_hydro)

    p = sub.add_parser("roughness", help="topography offset ensemble")
    p.add_argument("--map", help="topography file (default: bundled)")
    p.add_argument("--r-guess", type=float, default=33e-6)
    p.add_argument("--pols", type=int, default=49)
    p.add_argument("--stride", type=int, default=4)
    p.add_argument("--d-min", type=float, default=60e-9)
    p.add_argument("--d-max", type=float, default=300e-9)
    p.add_argument("--count", type=int, default=8)
    p.set_defaults(func=cmd_roughness)

    p = sub.add_parser("simulate", help="synthesize a campaign")
    _add_probe_flags(p)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--ideal", action="store_true",
                   help="zero all noise and artifacts")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="calibrate and recover the gradient")
    p.add_argument("--campaign", help="campaign directory (or stdin)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("budget", help="uncertainty budget for a campaign")
    p.add_argument("--campaign", help="campaign directory (or stdin)")
    p.add_argument("--d-min", type=float, default=60e-9)
    p.add_argument("--d-max", type=float, default=300e-9)
    p.add_argument("--count", type=int, default=40)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("reproduce", help="regenerate the headline artifacts")
    _add_probe_flags(p)
    p.add_argument("--runs", type=int, default=12)
    p.set_defaults(func=cmd_reproduce)

    args = ap.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        # subcommand parsers may not define every shared flag default
        if not hasattr(args, "seed") or args.seed is None:
            args.seed = int(cfg.get("seed", 0))
        if args.out is None:
            args.out = cfg.get("out")
        return args.func(args, cfg)
    except FomlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
