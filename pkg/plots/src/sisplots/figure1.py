"""Convergence figure: (ln tau)/N against N with the two asymptote lines."""

import argparse
import sys
from pathlib import Path

from ._render import FigureRecipe, PlotsError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", required=True,
                        help="figure1 CSV from the computation CLI")
    parser.add_argument("--out", required=True,
                        help="output path prefix; .png and .svg are written")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    recipe = FigureRecipe(kind="figure1", inputs={"data": args.data},
                          out=Path(args.out), dpi=args.dpi)
    try:
        for path in render(recipe):
            print(path)
    except PlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
