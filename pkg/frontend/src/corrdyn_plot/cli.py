"""corrdyn-plot: render reproduction figures from corrdyn CSV files."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_SCHEMAS, FigureSpec, render_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrdyn-plot",
        description="Render a reproduction figure from corrdyn CSV output.",
    )
    parser.add_argument("--figure", required=True, choices=sorted(FIGURE_SCHEMAS))
    parser.add_argument(
        "--csv",
        required=True,
        nargs="+",
        help="input CSV files (fig4 takes one per variant; others take one)",
    )
    parser.add_argument("--out", required=True, help="output image (.svg or .pdf)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(figure_id=args.figure, input_csv_paths=tuple(args.csv), output_path=args.out)
    try:
        render_figure(spec)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
