"""Command-line entry point.

Exit status: 0 success, 1 usage/validation/parse error, 2 when a
verification subcommand ran but its check failed.
"""
import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import csvio
from .config import load_config
from .equilibria import classify_regime, equilibrium_set
from .errors import NsfdError, ValidationError
from .lyapunov import check_monotone
from .simulate import compute_monitors, run, with_lyapunov
from .sweep import SweepGrid, run_sweep, sweep_summary

OUTPUT_DIR_ENV = "NSFD_HIV_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


def _fmt(x):
    return "%.12g" % x


def _fmt_state(state):
    if state is None:
        return "absent"
    return "(" + ", ".join(_fmt(u) for u in state) + ")"


def _resolve_output(cfg_path, cfg, override, suffix):
    target = override or cfg.output
    if target == "-":
        return "-"
    if target is None:
        target = Path(cfg_path).stem + suffix
    target = Path(target)
    if not target.is_absolute():
        target = Path(os.environ.get(OUTPUT_DIR_ENV) or ".") / target
    return target


def _load(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return path, load_config(path)


def _need_steps(cfg):
    if cfg.n_steps is None:
        raise ValidationError("steps", "one of steps or t_end is required")
    return cfg.n_steps


def _simulate(cfg_path, cfg, target=None):
    steps = _need_steps(cfg)
    init = cfg.initial_data(base_dir=Path(cfg_path).parent)
    traj = run(cfg.params, init, steps)
    if cfg.omega:
        traj = replace(traj, monitors=compute_monitors(traj))
    target = target or cfg.lyapunov
    if target is not None:
        traj = with_lyapunov(traj, target)
    return traj


def cmd_simulate(args):
    path, cfg = _load(args.config)
    traj = _simulate(path, cfg)
    out = _resolve_output(path, cfg, args.output, ".csv")
    nbytes = csvio.emit_csv(traj, out)
    if out != "-":
        print(f"wrote {nbytes} bytes to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_equilibria(args):
    _, cfg = _load(args.config)
    eqs = equilibrium_set(cfg.params)
    regime = classify_regime(eqs.numbers, eqs)
    print(f"R0 = {_fmt(eqs.numbers.r0)}")
    print(f"R1 = {_fmt(eqs.numbers.r1)}")
    print(f"E0 = {_fmt_state(eqs.e0)}")
    print(f"E* = {_fmt_state(eqs.e_star)}")
    print(f"Ebar = {_fmt_state(eqs.e_bar)}")
    print(f"regime = {regime.kind.value}")
    print(f"attractor = {_fmt_state(regime.predicted_attractor)}")
    return EXIT_OK


def cmd_lyapunov(args):
    path, cfg = _load(args.config)
    traj = _simulate(path, cfg, target=args.target)
    out = _resolve_output(path, cfg, args.output, ".csv")
    csvio.emit_csv(traj, out)
    verdict = check_monotone(traj.lyapunov)
    print(f"target = {args.target}")
    print(f"final value = {traj.lyapunov.values[-1]:.6e}")
    if traj.lyapunov.y_order is not None:
        w = traj.lyapunov.y_order
        print(f"Y* < Ybar: {w.holds} (Y*={_fmt(w.y_star)}, Ybar={_fmt(w.y_bar)})")
    print(verdict.describe())
    return EXIT_OK if verdict.ok else EXIT_CHECK_FAILED


def cmd_sweep(args):
    path, cfg = _load(args.config)
    if cfg.beta_values is None or cfg.c_values is None:
        raise ValidationError("beta_values", "sweep needs beta_values and c_values")
    grid = SweepGrid(cfg.params, cfg.beta_values, cfg.c_values, cfg.tau_values,
                     sim_budget=cfg.sim_budget, tol=cfg.tol, window=cfg.window)
    init = cfg.initial_state() if cfg.history_file is None else cfg.initial_data(path.parent)
    if init is None:
        raise ValidationError("initial", "no initial condition given")
    cells = run_sweep(grid, init, workers=args.workers)
    out = _resolve_output(path, cfg, args.output, "_sweep.csv")
    csvio.emit_sweep_csv(cells, out)
    summary = sweep_summary(cells)
    print(f"cells = {summary.total}, counted = {summary.counted}, "
          f"near-threshold = {summary.near_threshold}, errors = {summary.errors}")
    print(f"agreement = {summary.agreement_rate:.4f}")
    for cell in summary.disagreeing:
        print(f"disagree: beta={_fmt(cell.beta)} c={_fmt(cell.c)} tau={_fmt(cell.tau)} "
              f"predicted={cell.predicted} observed={cell.observed}")
    ok = summary.counted > 0 and not summary.disagreeing
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nsfd-hiv",
        description="NSFD simulation of a delayed HIV model with CTL response.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a trajectory and write CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equilibria", help="print equilibria, R0, R1 and regime")
    p.add_argument("config")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("lyapunov", help="run and check Lyapunov monotonicity")
    p.add_argument("config")
    p.add_argument("--target", required=True, choices=("e0", "estar", "ebar"))
    p.add_argument("-o", "--output", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("sweep", help="scan a (beta, c) grid and compare regimes")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output path, '-' for stdout")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (NsfdError, OSError) as exc:
        print(f"nsfd-hiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
