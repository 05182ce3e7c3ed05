"""Command-line front end.

Subcommands: simulate, scan, preset, rates, gradient, modes.  All output is
CSV as specified in :mod:`gradcool.csvio` (provenance as '#' comment lines);
plots are optional static SVG.  Exit codes: 0 success, 1 configuration
error, 2 physics/runtime error (message names the error type).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .config import KNOWN_KEYS, load_run_config
from .csvio import config_hash, provenance_lines, write_csv
from .dynamics import evolve, initial_state
from .errors import ConfigError, GradCoolError
from .experiments import PRESET_IDS, SweepPlan, run_preset, run_sweep
from .model import ION_PRESETS, GradientSpec, SystemParams, build_dissipators, gradient_from_eta
from .modes import modes_for_chain
from .rates import adiabatic_rates, omega_eff_at_resonance, rate_formula, resonance_detuning
from .svgplot import line_chart

_AMU = 1.66053906660e-27


def _cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    params = cfg.system_params()
    integ = cfg.integrator_config()
    n_initial, kind, internal = cfg.initial_state_spec()
    model = build_dissipators(params, cfg.picture)
    rho0 = initial_state(model.space, n_initial, kind=kind, internal=internal)
    trace = evolve(model, rho0, integ)

    prov = cfg.as_flat_dict()
    comments = provenance_lines(prov)
    if cfg.values["delta"] == "resonance":
        comments.insert(0, f"delta=resonance resolved to {cfg.resolved_delta()!r}")
    header = ["t", "n_mean", "pop_e", "pop_D", "tail", "trace_defect"]
    rows = [
        (trace.times[k], trace.n_mean[k], trace.pop_e[k], trace.pop_D[k],
         trace.tail[k], trace.trace_defect[k])
        for k in range(len(trace.times))
    ]
    write_csv(args.out, header, rows, comments)
    if args.svg:
        line_chart(
            args.svg,
            trace.times,
            {"n_mean": np.maximum(trace.n_mean, 1e-12), "pop_e": np.maximum(trace.pop_e, 1e-12)},
            title="cooling trace",
            xlabel="t [1/nu]",
            ylabel="population",
            logy=True,
        )
    if not trace.valid:
        print("warning: trace normalization drifted beyond 1e-7; run flagged invalid", file=sys.stderr)
    return 0


def _cmd_rates(args) -> int:
    if args.delta == "resonance":
        delta = resonance_detuning(args.omega)
    else:
        try:
            delta = float(args.delta)
        except ValueError:
            raise ConfigError(f"--delta must be a number or 'resonance', got {args.delta!r}") from None
    p = SystemParams(
        omega=args.omega, delta=delta, gamma_plus=args.gamma, gamma_minus=args.gamma,
        eta=args.eta, order=1, n_max=4,
    )
    w = rate_formula(p) if args.gamma > 0 else 0.0
    oeff = omega_eff_at_resonance(args.omega)
    fields = {
        "W_formula": w,
        "delta": delta,
        "omega_eff": oeff,
    }
    if args.gamma > 0 and args.omega > 0:
        sr = adiabatic_rates(p)
        fields.update({"A_minus": sr.A_minus, "A_plus": sr.A_plus, "n_ss": sr.n_ss})
    else:
        fields.update({"A_minus": w, "A_plus": 0.0, "n_ss": 0.0})
    print(" ".join(f"{k}={v!r}" for k, v in fields.items()))
    print(f"# rate formula W = {w!r} nu at delta = {delta!r} nu (omega={args.omega}, "
          f"gamma={args.gamma}, eta={args.eta}); |Omega_eff| at resonance = {oeff!r} nu")
    return 0


def _cmd_scan(args) -> int:
    cfg = load_run_config(args.config) if args.config else None
    fixed = {}
    if cfg is not None:
        v = cfg.values
        fixed = {
            "gamma": v["gamma"], "eta": v["eta"], "phi": v["phi"],
            "order": v["order"], "n_max": v["n_max"], "nu": v["nu"],
        }
        if v["delta"] != "resonance":
            fixed["delta"] = v["delta"]
        if v["omega"]:
            fixed["omega"] = v["omega"]
    try:
        grid = tuple(float(tok) for tok in args.grid.split(","))
    except ValueError:
        raise ConfigError(f"--grid must be comma-separated reals, got {args.grid!r}") from None
    if args.vary not in ("omega", "gamma", "eta", "phi", "delta"):
        raise ConfigError(f"--vary must name a physical parameter, got {args.vary!r}")
    fixed.pop(args.vary, None)
    derived = {}
    for rule in args.derived or ():
        key, _, val = rule.partition("=")
        if val != "resonance" or key != "delta":
            raise ConfigError(f"unsupported derived rule {rule!r} (only delta=resonance)")
        derived["delta"] = "resonance"
        fixed.pop("delta", None)
    plan = SweepPlan(
        varying=args.vary, grid=grid, fixed=fixed, derived=derived,
        picture=cfg.picture if cfg else "original",
    )
    records = run_sweep(plan, jobs=args.jobs)
    header = [args.vary, "W_fit", "W_formula", "n_final", "omega_eff", "residual", "t_end", "error"]
    rows = [tuple(rec.get(k, "") for k in header) for rec in records]
    prov = {"command": "scan", "vary": args.vary, "grid": args.grid, **{f"fixed_{k}": v for k, v in fixed.items()},
            **{f"derived_{k}": v for k, v in derived.items()}}
    write_csv(args.out, header, rows, provenance_lines(prov))
    return 0


def _cmd_preset(args) -> int:
    result = run_preset(args.preset, jobs=args.jobs)
    write_csv(args.out, result.header, result.rows, provenance_lines(result.provenance))
    return 0


def _cmd_gradient(args) -> int:
    if args.table1:
        result = run_preset("table1_gradients")
        write_csv(args.out or sys.stdout, result.header, result.rows,
                  provenance_lines(result.provenance))
        return 0
    if args.ion:
        mass = ION_PRESETS[args.ion]["mass_kg"]
        wavelength = ION_PRESETS[args.ion]["wavelength_m"]
    else:
        if args.mass_amu is None or args.wavelength_nm is None:
            raise ConfigError("either --ion or both --mass-amu and --wavelength-nm are required")
        mass = args.mass_amu * _AMU
        wavelength = args.wavelength_nm * 1e-9
    if args.trap_freq_hz is None or args.trap_freq_hz <= 0:
        raise ConfigError("--trap-freq-hz must be positive")
    spec = GradientSpec(
        ion_mass=mass, wavelength=wavelength,
        trap_freq=2 * np.pi * args.trap_freq_hz, angle_theta=args.theta,
    )
    grad = gradient_from_eta(spec, args.eta)
    eta = spec.eta_laser if args.eta is None else args.eta
    print(f"dB_dx_T_per_m={grad!r} eta={eta!r} eta_laser={spec.eta_laser!r}")
    return 0


def _cmd_modes(args) -> int:
    spec = modes_for_chain(args.n_ions)
    header = ["mode", "freq_over_nu"] + [f"M_ion{i + 1}" for i in range(args.n_ions)]
    rows = [
        (n + 1, spec.mode_freqs[n], *[spec.mode_matrix[i, n] for i in range(args.n_ions)])
        for n in range(args.n_ions)
    ]
    prov = {"command": "modes", "n_ions": args.n_ions,
            "per_mode_truncation": ",".join(str(t) for t in spec.per_mode_truncation)}
    write_csv(args.out or sys.stdout, header, rows, provenance_lines(prov))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradcool",
        description="Magnetic-gradient laser-cooling simulator (frequencies in nu, time in 1/nu)",
    )
    parser.add_argument("--version", action="version", version=f"gradcool {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate one master-equation run from a config file")
    p_sim.add_argument("config", help=f"key=value file; keys: {', '.join(sorted(KNOWN_KEYS))}")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--svg", help="optional SVG plot path (log population axis)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_rates = sub.add_parser("rates", help="analytic rate quantities at given parameters")
    p_rates.add_argument("--omega", type=float, required=True)
    p_rates.add_argument("--gamma", type=float, default=5.0)
    p_rates.add_argument("--eta", type=float, default=0.1)
    p_rates.add_argument("--delta", default="resonance", help="number or 'resonance'")
    p_rates.set_defaults(func=_cmd_rates)

    p_scan = sub.add_parser("scan", help="sweep one parameter over a grid")
    p_scan.add_argument("--config", help="base config supplying the fixed parameters")
    p_scan.add_argument("--vary", required=True)
    p_scan.add_argument("--grid", required=True, help="comma-separated values")
    p_scan.add_argument("--derived", action="append", help="e.g. delta=resonance")
    p_scan.add_argument("--jobs", type=int, default=1)
    p_scan.add_argument("--out", required=True)
    p_scan.set_defaults(func=_cmd_scan)

    p_preset = sub.add_parser("preset", help="regenerate a published figure/table dataset")
    p_preset.add_argument("preset", help=f"one of: {', '.join(PRESET_IDS)}")
    p_preset.add_argument("--out", required=True)
    p_preset.add_argument("--jobs", type=int, default=1)
    p_preset.set_defaults(func=_cmd_preset)

    p_grad = sub.add_parser("gradient", help="magnetic gradient fulfilling the matched condition")
    p_grad.add_argument("--ion", choices=sorted(ION_PRESETS))
    p_grad.add_argument("--mass-amu", type=float)
    p_grad.add_argument("--wavelength-nm", type=float)
    p_grad.add_argument("--trap-freq-hz", type=float)
    p_grad.add_argument("--theta", type=float, default=0.0)
    p_grad.add_argument("--eta", type=float, help="target eta_eff (default: the laser eta)")
    p_grad.add_argument("--table1", action="store_true", help="print all four tabulated rows")
    p_grad.add_argument("--out")
    p_grad.set_defaults(func=_cmd_gradient)

    p_modes = sub.add_parser("modes", help="normal modes of an N-ion chain")
    p_modes.add_argument("--n-ions", type=int, required=True)
    p_modes.add_argument("--out")
    p_modes.set_defaults(func=_cmd_modes)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map to config-error code 1
        if exc.code not in (0, None):
            return 1
        return 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return 1
    except GradCoolError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
