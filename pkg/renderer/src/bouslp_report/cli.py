"""Renderer CLI: bouslp-render render --input <dir> --out <dir>."""

from __future__ import annotations

import argparse
import sys

from bouslp_report.report import render_fields, render_report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bouslp-render")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    p = sub.add_parser("render", help="render figures and an index page")
    p.add_argument("--input", required=True, help="harness output directory")
    p.add_argument("--out", required=True, help="figure output directory")
    p.add_argument("--style-seed", type=int, default=0)
    f = sub.add_parser("fields", help="render field snapshot heatmaps")
    f.add_argument("snapshots", nargs="+", help="paths to .f64 snapshot files")
    f.add_argument("--out", required=True)
    f.add_argument("--style-seed", type=int, default=0)
    args = parser.parse_args(argv)

    try:
        if args.subcommand == "render":
            index = render_report(args.input, args.out, style_seed=args.style_seed)
            print(f"index: {index}")
        else:
            for path in render_fields(args.snapshots, args.out,
                                      style_seed=args.style_seed):
                print(path)
        return 0
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
