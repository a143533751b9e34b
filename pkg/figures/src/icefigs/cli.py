"""render <run-dir> [--times t1,t2,...] [--format png|svg] [--out DIR]

Reads a solver run directory and writes its figures. The run directory
itself is never written to; figures go to --out (default: a sibling
"<run-dir>_figures" next to the input).
"""
from __future__ import annotations

import argparse
import os
import sys

from .plots import render_run
from .reader import ReaderError, read_run


def _parse_times(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="render figures from an icefloe run directory")
    parser.add_argument("run_dir", help="directory written by `icefloe run`")
    parser.add_argument("--times", type=_parse_times, default=None,
                        metavar="T1,T2,...",
                        help="snapshot times (s) to plot; default: the last one")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    parser.add_argument("--out", default=None,
                        help="output directory (default: <run-dir>_figures)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out
    if out_dir is None:
        out_dir = os.path.normpath(args.run_dir).rstrip(os.sep) + "_figures"
    try:
        data = read_run(args.run_dir)
        written = render_run(data, out_dir, fmt=args.format, times=args.times)
    except ReaderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not written:
        print(f"error: nothing to render in {args.run_dir}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
