"""Log-persistence figure: (1/2)ln N + ln tau lines with a fixed-slope
reference whose intercept is least-squares fitted to the simulated points."""

import argparse
import sys
from pathlib import Path

from ._render import FigureRecipe, PlotsError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--exact", required=True,
                        help="figure3_exact CSV (eigenvalue-route persistence)")
    parser.add_argument("--sim", required=True,
                        help="figure3_sim CSV (simulation estimates)")
    parser.add_argument("--theory", required=True,
                        help="figure3_theory CSV (closed-form action)")
    parser.add_argument("--out", required=True,
                        help="output path prefix; .png and .svg are written")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    recipe = FigureRecipe(
        kind="figure3",
        inputs={"exact": args.exact, "sim": args.sim, "theory": args.theory},
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
