"""Command-line interface.

Subcommands:
  simulate      run one frame-comparison scenario from a JSON config
  sweep         run a scenario over its sweep axes (parallel workers)
  map-spectral  print the collective-mode parameters for an underdamped bath
  validate      run the cross-module oracle and invariant suites

Exit codes: 0 success, 1 configuration error, 2 numerical-guard abort,
3 validation failure. The RCJC_THREADS environment variable caps sweep
parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .evolve import NumericalGuardError
from .scenarios import ConfigError, load_config, run_comparison, run_sweep, validate
from .spectral import UnderdampedSD, eval_underdamped, map_to_rc, reconstruct_sb


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="run a frame-comparison scenario")
    p.add_argument("--config", required=True, help="path to a JSON scenario config")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--integrator", choices=["rk4", "spectral", "both"], default=None,
                   help="override the lab-frame integrator")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="run a scenario over its sweep axes")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--no-figures", action="store_true")


def _add_map_spectral(sub):
    p = sub.add_parser("map-spectral",
                       help="collective-mode parameters of an underdamped bath")
    p.add_argument("--pi-alpha", type=float, required=True,
                   help="pi * alpha in units of omega0")
    p.add_argument("--gamma", type=float, required=True,
                   help="spectral width Gamma in units of omega0")
    p.add_argument("--omega0", type=float, default=1.0, help="peak frequency")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _add_validate(sub):
    p = sub.add_parser("validate", help="run the self-validation suites")
    p.add_argument("--strict", action="store_true",
                   help="tighten algebraic bounds tenfold")


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.integrator:
        cfg["integrator"] = args.integrator
    if args.no_figures:
        cfg["figures"] = False
    art = run_comparison(cfg, out_dir=args.out)
    print(f"wrote {art.out_dir}")
    print(f"  tau_n = {art.summary['tau_n']:.6g}, g_n = {art.summary['g_n']:.6g}")
    print(f"  max 1-F = {art.summary['max_infidelity']:.3e}, "
          f"max tail = {art.summary['max_tail']:.2e}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.no_figures:
        cfg["figures"] = False
    rows = run_sweep(cfg, out_dir=args.out, jobs=args.jobs)
    failed = [r for r in rows if r[3] is not None]
    print(f"sweep finished: {len(rows) - len(failed)}/{len(rows)} points succeeded")
    for _, overrides, _, err in failed:
        print(f"  failed {overrides}: {err}")
    return 0


def _cmd_map_spectral(args) -> int:
    sd = UnderdampedSD(alpha=args.pi_alpha / math.pi, Gamma=args.gamma,
                       omega0=args.omega0)
    rc = map_to_rc(sd)
    grid = np.logspace(-2, 1, 50) * args.omega0
    err = 0.0
    if args.gamma > 0:
        err = float(np.max(np.abs(
            (reconstruct_sb(rc, grid) - eval_underdamped(sd, grid))
            / eval_underdamped(sd, grid))))
    out = {
        "lam": rc.lam,
        "Omega": rc.Omega,
        "gamma_residual": rc.residual.gamma,
        "lamb_dicke": 2.0 * rc.lam / rc.Omega,
        "roundtrip_max_rel_err": err,
    }
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"lam = {out['lam']:.12g}")
        print(f"Omega = {out['Omega']:.12g}")
        print(f"gamma (residual) = {out['gamma_residual']:.12g}")
        print(f"2 lam / Omega = {out['lamb_dicke']:.12g}")
        print(f"round-trip max rel err = {out['roundtrip_max_rel_err']:.3e}")
    return 0


def _cmd_validate(args) -> int:
    _, ok = validate(strict=args.strict, verbose=True)
    return 0 if ok else 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rcjc",
        description="spin-boson to multiphoton Jaynes-Cummings frame simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_sweep(sub)
    _add_map_spectral(sub)
    _add_validate(sub)
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "map-spectral":
            return _cmd_map_spectral(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
