"""Command-line entry point: ``plot <kind> --in run.csv --out fig.png``."""

from __future__ import annotations

import argparse
import sys

from .csvio import PlotInputError
from .recipes import KINDS, FigureRecipe
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a figure from casimir-sim CSV output files.",
    )
    parser.add_argument("kind", choices=KINDS, help="figure archetype")
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="CSV",
        help="input table; repeat to overlay several",
    )
    parser.add_argument("--out", required=True, metavar="IMAGE", help="output image path")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        recipe = FigureRecipe(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.out,
            title=args.title,
        )
        render(recipe)
    except (PlotInputError, ValueError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
