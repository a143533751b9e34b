"""Command-line front end.

Exit codes: 0 completed, 1 usage or configuration error, 2 run ended in a
recorded blow-up, 3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import ConfigError, apply_overrides, load_config
from .model import Scheme
from .output import write_convergence_csv, write_run_dir
from .runloop import STATUS_BLOW_UP, STATUS_COMPLETED, STATUS_NONCONVERGENCE
from .runner import execute, execute_convergence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BLOW_UP = 2
EXIT_NONCONVERGENCE = 3

_STATUS_EXIT = {
    STATUS_COMPLETED: EXIT_OK,
    STATUS_BLOW_UP: EXIT_BLOW_UP,
    STATUS_NONCONVERGENCE: EXIT_NONCONVERGENCE,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="icefloe", description="1-D sea-ice solver")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one configured simulation")
    run.add_argument("config", help="path to a key=value config file")
    run.add_argument("--out", default="icefloe_out", help="output directory")
    run.add_argument(
        "--set", dest="overrides", action="append", default=[],
        metavar="KEY=VALUE", help="override a config key (repeatable)",
    )

    conv = sub.add_parser("converge", help="grid-refinement verification study")
    conv.add_argument("--scheme", choices=["cd", "weno"], required=True)
    conv.add_argument("--cells", type=int, default=50, help="coarsest resolution")
    conv.add_argument("--dt", type=float, default=1e-4, help="time step, s")
    conv.add_argument("--horizon", type=float, default=5.0, help="final time, s")
    conv.add_argument("--out", default=".", help="output directory")
    return parser


def _print_rows(rows):
    print(f"{'cells':>6} {'dx_m':>10} {'err_u':>12} {'rate':>7} "
          f"{'err_h':>12} {'rate':>7} {'err_a':>12} {'rate':>7}")
    for r in rows:
        def fmt_rate(x):
            return f"{x:7.4f}" if x is not None else " " * 7

        print(
            f"{r.n_cells:>6} {r.dx:>10.0f} {r.err_u:>12.4e} {fmt_rate(r.rate_u)} "
            f"{r.err_h:>12.4e} {fmt_rate(r.rate_h)} {r.err_a:>12.4e} {fmt_rate(r.rate_a)}"
        )


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = apply_overrides(text, args.overrides)
    spec = load_config(text)

    if spec.scenario == "mms":
        rows = execute_convergence(spec)
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"convergence_{spec.scheme.value}.csv")
        write_convergence_csv(rows, path)
        _print_rows(rows)
        print(f"wrote {path}")
        return EXIT_OK

    result = execute(spec)
    from .config import build_grid

    write_run_dir(result, spec, build_grid(spec), args.out)
    print(f"status: {result.status}")
    print(f"end time: {result.state.time:g} s after {result.n_steps_done} steps")
    if result.blowup_time is not None:
        print(f"blow-up recorded; last finite time {result.blowup_time:g} s")
    ex = result.extrema
    print(
        f"extrema: h in [{ex['min_h']:.6g}, {ex['max_h']:.6g}], "
        f"A in [{ex['min_a']:.6g}, {ex['max_a']:.6g}]"
    )
    print(f"outputs in {args.out}")
    return _STATUS_EXIT.get(result.status, EXIT_USAGE)


def _cmd_converge(args) -> int:
    from .mms import convergence_study

    scheme = Scheme.CD if args.scheme == "cd" else Scheme.WENO
    rows = convergence_study(
        scheme,
        resolutions=(args.cells, 2 * args.cells, 4 * args.cells),
        dt=args.dt,
        horizon=args.horizon,
    )
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"convergence_{args.scheme}.csv")
    write_convergence_csv(rows, path)
    _print_rows(rows)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_converge(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
