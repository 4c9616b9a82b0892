"""Figure rendering for sispersist CSV artifacts.

Reads the CSV files the computation CLI emits and draws the three figure
kinds as PNG and SVG pairs. Strictly presentation: every number on a figure
comes verbatim from a CSV column, nothing is recomputed here and the
computation package is never imported.
"""

from ._render import FigureRecipe, PlotsError, fixed_slope_intercept, render

__all__ = ["FigureRecipe", "PlotsError", "fixed_slope_intercept", "render"]
