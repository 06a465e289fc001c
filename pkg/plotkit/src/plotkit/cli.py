"""plotkit command line: render figures from benchmark CSVs.

Subcommands:
  plotkit grid     --in medians.csv --x {N|p} --out fig.png
  plotkit classify --in scores.csv --out fig.png
"""

from __future__ import annotations

import argparse
import sys

from .panels import PanelSpec, PlotkitError, render_classification, render_grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    grid = sub.add_parser("grid", help="indices x linkages panel grid")
    grid.add_argument("--in", dest="input", required=True)
    grid.add_argument("--x", choices=["N", "p"], default="N")
    grid.add_argument("--out", required=True)

    cls = sub.add_parser("classify", help="paired accuracy/F1 panels")
    cls.add_argument("--in", dest="input", required=True)
    cls.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "grid":
            render_grid(args.input, PanelSpec(x=args.x), args.out)
        else:
            render_classification(args.input, args.out)
    except (PlotkitError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
