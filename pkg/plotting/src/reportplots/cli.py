"""Command line chart renderer for experiment summary CSVs."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .data import SummaryFormatError
from .render import FigureSpec, render


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render average-delay charts from a summary CSV.",
    )
    parser.add_argument("--summary", required=True, help="summary CSV path")
    parser.add_argument("--figure", required=True, choices=("q", "f"), help="x axis variable")
    parser.add_argument("--scenario", required=True, choices=("rvd", "vsn"))
    parser.add_argument(
        "--fixed",
        required=True,
        type=float,
        help="fixed value of the other sweep variable (f for --figure q, q for --figure f)",
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--controllers",
        help="comma separated series subset (default: every controller present)",
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    controllers = None
    if args.controllers:
        controllers = tuple(c.strip() for c in args.controllers.split(",") if c.strip())
    spec = FigureSpec(
        x_axis=args.figure,
        scenario=args.scenario,
        fixed=args.fixed,
        controllers=controllers,
    )
    try:
        result = render(args.summary, spec, args.out)
    except (SummaryFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if result.skipped:
        print(f"warning: {result.message}", file=sys.stderr)
        return 0
    for path in result.written:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
