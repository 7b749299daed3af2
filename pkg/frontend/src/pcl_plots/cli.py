"""Command line entry point: ``plots render --kind ... --in ... --out ...``."""

from __future__ import annotations

import argparse
import glob
import sys

from pcl_plots.csvio import SchemaError
from pcl_plots.render import render_bloch, render_sweep, render_timeseries


def _expand(patterns) -> list:
    paths = []
    for pattern in patterns:
        matches = sorted(glob.glob(pattern))
        paths.extend(matches if matches else [pattern])
    return paths


def cmd_render(args) -> int:
    paths = _expand(args.inputs)
    if args.kind == "timeseries":
        written = render_timeseries(paths, args.out)
    elif args.kind == "bloch":
        if len(paths) != 1:
            raise SchemaError("bloch rendering takes exactly one CSV")
        written = render_bloch(paths[0], args.out)
    else:
        written = render_sweep(paths, args.out)
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render simulator trajectory CSVs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from CSV input")
    p.add_argument("--kind", required=True,
                   choices=["timeseries", "bloch", "sweep"])
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input CSV paths or globs")
    p.add_argument("--out", required=True,
                   help="output stem; .png and .svg are written")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
