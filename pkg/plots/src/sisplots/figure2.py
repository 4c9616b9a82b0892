"""Contour figure: solid action contours with a dotted finite-N overlay."""

import argparse
import sys
from pathlib import Path

from ._render import FigureRecipe, PlotsError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bvp", required=True,
                        help="figure2_bvp CSV (connecting-orbit actions)")
    parser.add_argument("--finite", required=True,
                        help="figure2_finite CSV (finite-N slope estimates)")
    parser.add_argument("--out", required=True,
                        help="output path prefix; .png and .svg are written")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    recipe = FigureRecipe(kind="figure2",
                          inputs={"bvp": args.bvp, "finite": args.finite},
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
