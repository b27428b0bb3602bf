"""Command-line front end.

Subcommands:

    simulate-lti   Monte Carlo study of the constant-parameter plant
    simulate-ltv   same with bounded sinusoidal parameter drift
    estimate       run one estimator over a dataset CSV
    analyze-pe     excitation/stability diagnostics for a dataset CSV
    sweep-lambda   forgetting-factor sweep of averaged final widths

Options can come from a flat key=value file via --config; explicit
flags always override the file.  Outputs are plain CSV/text files under
--out and are byte-identical for identical configuration and seed,
regardless of worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .data import Dataset
from .experiment import (
    estimate_from_csv,
    lambda_sweep,
    run_experiment,
    write_experiment,
)
from .pe import analyze
from .simulate import (
    REFERENCE_DRIFT_RADIUS,
    REFERENCE_THETA,
    SimConfig,
    generate_lti,
    generate_ltv,
)

__all__ = ["main", "build_parser"]


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _parse_modes(text: str) -> tuple:
    modes = []
    for part in text.split(","):
        part = part.strip()
        if part == "exact":
            modes.append(None)
        else:
            try:
                modes.append(int(part))
            except ValueError:
                raise argparse.ArgumentTypeError(
                    f"modes must be 'exact' or integers, got {part!r}"
                )
    return tuple(modes)


def _parse_mode(text: str):
    return None if text.strip() == "exact" else int(text)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


_SIM_DEFAULTS = {
    "theta_true": REFERENCE_THETA,
    "n_a": 2,
    "n_b": 2,
    "noise_half_width": 0.2,
    "horizon": 200,
    "runs": 100,
    "lam": 0.99,
    "p0_scale": 1000.0,
    "prior_radius": 4.0,
    "modes": (20, 50, None),
    "monotonic": True,
    "workers": 1,
}

_LTV_OVERRIDES = {
    "lam": 0.1,
    "modes": (5, None),
    "drift_radius": REFERENCE_DRIFT_RADIUS,
    "drift_period": 30.0,
}

_CONVERTERS = {
    "theta_true": _parse_floats,
    "n_a": int,
    "n_b": int,
    "noise_half_width": float,
    "horizon": int,
    "runs": int,
    "lam": float,
    "p0_scale": float,
    "prior_radius": float,
    "modes": _parse_modes,
    "monotonic": _parse_bool,
    "workers": int,
    "drift_radius": _parse_floats,
    "drift_period": float,
    "lambdas": _parse_floats,
}


def _add_sim_arguments(sub: argparse.ArgumentParser, ltv: bool) -> None:
    S = argparse.SUPPRESS
    sub.add_argument("--seed", type=int, required=True, help="base seed; run k uses seed+k")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--config", help="flat key=value file; flags override it")
    sub.add_argument("--theta-true", dest="theta_true", type=_parse_floats, default=S,
                     help=f"true parameters (default {','.join(map(str, REFERENCE_THETA))})")
    sub.add_argument("--na", dest="n_a", type=int, default=S, help="output lags (default 2)")
    sub.add_argument("--nb", dest="n_b", type=int, default=S, help="input lags (default 2)")
    sub.add_argument("--noise-half-width", dest="noise_half_width", type=float, default=S,
                     help="noise bound a, v in [-a, a] (default 0.2)")
    sub.add_argument("--horizon", type=int, default=S, help="steps per run (default 200)")
    sub.add_argument("--runs", type=int, default=S, help="Monte Carlo runs (default 100)")
    sub.add_argument("--lambda", dest="lam", type=float, default=S,
                     help=f"forgetting factor (default {0.1 if ltv else 0.99})")
    sub.add_argument("--p0-scale", dest="p0_scale", type=float, default=S,
                     help="P(0) = p0_scale * I (default 1000)")
    sub.add_argument("--prior-radius", dest="prior_radius", type=float, default=S,
                     help="prior box half-width around 0 (default 4)")
    sub.add_argument("--modes", type=_parse_modes, default=S,
                     help="comma list of windows, 'exact' for full memory "
                          f"(default {'5,exact' if ltv else '20,50,exact'})")
    sub.add_argument("--monotonic", type=_parse_bool, default=S,
                     help="refine boxes by running intersection (default true)")
    sub.add_argument("--workers", type=int, default=S,
                     help="parallel processes for the runs (default 1)")
    sub.add_argument("--write-datasets", action="store_true",
                     help="also write each run's dataset CSV")
    if ltv:
        sub.add_argument("--drift-radius", dest="drift_radius", type=_parse_floats,
                         default=S,
                         help="per-component drift bound "
                              f"(default {','.join(map(str, REFERENCE_DRIFT_RADIUS))})")
        sub.add_argument("--drift-period", dest="drift_period", type=float, default=S,
                         help="sinusoid period of the drift (default 30)")


def _effective_config(args, ltv: bool) -> SimConfig:
    defaults = dict(_SIM_DEFAULTS)
    if ltv:
        defaults.update(_LTV_OVERRIDES)
    effective = dict(defaults)
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in defaults:
                raise ValueError(
                    f"unknown config key '{key}' (valid: {', '.join(sorted(defaults))})"
                )
            effective[key] = _CONVERTERS[key](raw)
    for key in defaults:
        if hasattr(args, key):
            effective[key] = getattr(args, key)
    return SimConfig(seed=args.seed, **effective)


def _read_config_file(path) -> dict:
    data = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}: line {lineno}: expected key=value")
            data[key.strip()] = value.strip()
    return data


def _cmd_simulate(args, ltv: bool) -> int:
    config = _effective_config(args, ltv)
    result = run_experiment(config)
    os.makedirs(args.out, exist_ok=True)
    paths = write_experiment(result, args.out)
    if args.write_datasets:
        for run in range(config.runs):
            seed = config.seed + run
            ds = generate_ltv(config, seed) if config.is_ltv else generate_lti(config, seed)
            ds.to_csv(os.path.join(args.out, f"dataset_run{run:03d}.csv"))
    for avg in result.averages:
        width = (avg.mono_upper if config.monotonic else avg.upper)[-1] - (
            avg.mono_lower if config.monotonic else avg.lower
        )[-1]
        joined = ", ".join(format(w, ".6g") for w in width)
        print(f"{avg.label}: final averaged width [{joined}]")
    ok = result.all_contained
    print(f"containment audit over {config.runs} runs: {'PASS' if ok else 'FAIL'}")
    print(f"wrote {len(paths)} files to {args.out}")
    return 0 if ok else 1


def _cmd_estimate(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "estimates.csv")
    audit = estimate_from_csv(
        args.input,
        out_path,
        lam=args.lam,
        p0_scale=args.p0_scale,
        prior_radius=args.prior_radius,
        m=args.m,
        monotonic=args.monotonic,
    )
    print(f"wrote {out_path}")
    if audit is None:
        print("no true trajectory in input; containment not audited")
        return 0
    refined = "n/a" if audit.refined_contained is None else str(audit.refined_contained)
    print(
        f"containment audit: raw={audit.raw_contained} refined={refined} "
        f"inconsistent_steps={audit.inconsistent_steps}"
    )
    return 0 if audit.raw_contained and audit.refined_contained is not False else 1


def _cmd_analyze_pe(args) -> int:
    dataset = Dataset.from_csv(args.input)
    noise_radius = np.maximum(np.abs(dataset.v_low), np.abs(dataset.v_high))
    report = analyze(
        dataset.X,
        lam=args.lam,
        P0=args.p0_scale * np.eye(dataset.n),
        T=args.window,
        noise_radius=noise_radius,
    )
    os.makedirs(args.out, exist_ok=True)
    txt_path = os.path.join(args.out, "pe_report.txt")
    csv_path = os.path.join(args.out, "pe_report.csv")
    with open(txt_path, "w", newline="") as fh:
        fh.write(report.to_kv_text())
    with open(csv_path, "w", newline="") as fh:
        fh.write(report.to_csv_text())
    sys.stdout.write(report.to_kv_text())
    print(f"wrote {txt_path} and {csv_path}")
    return 0


def _cmd_sweep(args) -> int:
    config = _effective_config(args, ltv=False)
    sweep = lambda_sweep(config, args.lambdas)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "sweep.csv")
    sweep.to_csv(path)
    for row in sweep.rows:
        joined = ", ".join(format(w, ".6g") for w in row.final_width)
        print(f"lambda={row.lam:g} {row.label}: final averaged width [{joined}]")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ivrls",
        description="Guaranteed interval estimates around recursive least squares.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate-lti", help="Monte Carlo study, constant parameters")
    _add_sim_arguments(sim, ltv=False)
    sim.set_defaults(func=lambda a: _cmd_simulate(a, ltv=False))

    ltv = sub.add_parser("simulate-ltv", help="Monte Carlo study, drifting parameters")
    _add_sim_arguments(ltv, ltv=True)
    ltv.set_defaults(func=lambda a: _cmd_simulate(a, ltv=True))

    est = sub.add_parser("estimate", help="run one estimator over a dataset CSV")
    est.add_argument("--in", dest="input", required=True, help="dataset CSV path")
    est.add_argument("--out", required=True, help="output directory")
    est.add_argument("--lambda", dest="lam", type=float, default=0.99,
                     help="forgetting factor (default 0.99)")
    est.add_argument("--p0-scale", dest="p0_scale", type=float, default=1000.0,
                     help="P(0) = p0_scale * I (default 1000)")
    est.add_argument("--prior-radius", dest="prior_radius", type=float, default=4.0,
                     help="prior box half-width around 0 (default 4)")
    est.add_argument("--m", type=_parse_mode, default=None,
                     help="truncation window, or 'exact' (default exact)")
    est.add_argument("--monotonic", type=_parse_bool, default=True,
                     help="refine boxes by running intersection (default true)")
    est.set_defaults(func=_cmd_estimate)

    pe = sub.add_parser("analyze-pe", help="excitation diagnostics for a dataset CSV")
    pe.add_argument("--in", dest="input", required=True, help="dataset CSV path")
    pe.add_argument("--out", required=True, help="output directory")
    pe.add_argument("--lambda", dest="lam", type=float, default=0.99,
                    help="forgetting factor (default 0.99)")
    pe.add_argument("--p0-scale", dest="p0_scale", type=float, default=1000.0,
                    help="P(0) = p0_scale * I (default 1000)")
    pe.add_argument("--window", type=int, default=None,
                    help="excitation window T (default 2n)")
    pe.set_defaults(func=_cmd_analyze_pe)

    sweep = sub.add_parser("sweep-lambda", help="forgetting-factor sweep")
    _add_sim_arguments(sweep, ltv=False)
    sweep.add_argument("--lambdas", type=_parse_floats, required=True,
                       help="comma list of forgetting factors")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
