"""Figure recipes and the renderer behind the three scripts.

Each renderer draws only values read from the CSVs. The single derived
quantity on any figure is the reference-line intercept in the period-lines
figure, which is a display choice, not a model quantity: the slope is fixed
to the CSV's action value and the intercept is the least-squares fit of the
simulated points under that fixed slope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


class PlotsError(Exception):
    """Bad recipe or malformed CSV input."""


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    inputs: dict = field(default_factory=dict)
    out: Path = Path("figure")
    xlim: tuple | None = None
    ylim: tuple | None = None
    dpi: int = 150


_REQUIRED = {
    "figure1": {"data": ["N", "ln_tau_over_N", "action", "action_homog"]},
    "figure2": {
        "bvp": ["lambda1", "mu1", "action", "converged"],
        "finite": ["lambda1", "mu1", "action_estimate", "converged"],
    },
    "figure3": {
        "exact": ["N", "log_term"],
        "sim": ["N", "log_term", "variant", "period_kind"],
        "theory": ["action"],
    },
}


def load_table(path, required, role):
    path = Path(path)
    if not path.exists():
        raise PlotsError(f"{role} CSV not found: {path}")
    try:
        frame = pd.read_csv(path, comment="#")
    except pd.errors.EmptyDataError:
        raise PlotsError(f"{role} CSV is empty: {path}") from None
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise PlotsError(f"{role} CSV {path} lacks columns {missing}")
    if len(frame) == 0:
        raise PlotsError(f"{role} CSV has no data rows: {path}")
    for col in frame.columns:
        if col == "converged" and frame[col].dtype == object:
            frame[col] = frame[col].map({"true": True, "false": False})
    return frame


def fixed_slope_intercept(n, values, slope):
    """Least-squares intercept of values ~ slope*n + b with slope held fixed."""
    n = np.asarray(n, dtype=float)
    values = np.asarray(values, dtype=float)
    return float(np.mean(values - slope * n))


def _pivot(frame, value_col):
    """Grid of value_col over (mu1 rows, lambda1 columns), nan where absent
    or unconverged."""
    keep = frame.copy()
    keep.loc[~keep["converged"].astype(bool), value_col] = np.nan
    table = keep.pivot_table(index="mu1", columns="lambda1", values=value_col,
                             dropna=False)
    return (table.columns.to_numpy(dtype=float),
            table.index.to_numpy(dtype=float),
            table.to_numpy(dtype=float))


def _draw_figure1(tables, ax):
    data = tables["data"]
    ax.plot(data["N"], data["ln_tau_over_N"], "o", color="tab:blue",
            label="exact route")
    a = float(data["action"].iloc[0])
    a0 = float(data["action_homog"].iloc[0])
    ax.axhline(a, color="tab:red", lw=1.2,
               label=f"heterogeneous asymptote {a:.4f}")
    ax.axhline(a0, color="tab:gray", lw=1.2, ls="--",
               label=f"homogeneous asymptote {a0:.4f}")
    ax.set_xlabel("population size N")
    ax.set_ylabel(r"$(\ln\tau)/N$")
    ax.legend(loc="best", fontsize=8)


def _draw_figure2(tables, ax):
    xs, ys, solid = _pivot(tables["bvp"], "action")
    if np.all(np.isnan(solid)):
        raise PlotsError("bvp grid has no converged cells")
    lo, hi = np.nanmin(solid), np.nanmax(solid)
    levels = np.linspace(lo, hi, 9)[1:-1]
    cs = ax.contour(xs, ys, solid, levels=levels, colors="black",
                    linewidths=1.0)
    ax.clabel(cs, fmt="%.4f", fontsize=7)
    fx, fy, dotted = _pivot(tables["finite"], "action_estimate")
    if not np.all(np.isnan(dotted)):
        ax.contour(fx, fy, dotted, levels=levels, colors="tab:blue",
                   linestyles="dotted", linewidths=1.0)
    ax.plot([], [], color="black", lw=1.0, label="action (solid)")
    ax.plot([], [], color="tab:blue", ls=":", lw=1.0,
            label="finite-N estimate (dotted)")
    ax.set_xlabel(r"$\lambda_1$")
    ax.set_ylabel(r"$\mu_1$")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)


def _draw_figure3(tables, ax):
    exact = tables["exact"].sort_values("N")
    sim = tables["sim"]
    slope = float(tables["theory"]["action"].iloc[0])
    ax.plot(exact["N"], exact["log_term"], "-", color="black", lw=1.0,
            label="exact route")
    kinds = sim["period_kind"].unique()
    markers = {"infectivity": "o", "susceptibility": "s"}
    for variant, chunk in sim.groupby("variant"):
        for kind, sub in chunk.groupby("period_kind"):
            label = (f"{variant}, {kind} periods" if len(kinds) > 1
                     else f"simulated, {variant} side")
            sub = sub.sort_values("N")
            ax.plot(sub["N"], sub["log_term"],
                    markers.get(variant, "x"), ms=5, fillstyle="none",
                    label=label)
    b = fixed_slope_intercept(sim["N"], sim["log_term"], slope)
    span = np.array([min(exact["N"].min(), sim["N"].min()),
                     max(exact["N"].max(), sim["N"].max())], dtype=float)
    ax.plot(span, slope * span + b, color="tab:red", lw=1.2,
            label=f"slope {slope:.4f} reference")
    ax.set_xlabel("population size N")
    ax.set_ylabel(r"$\frac{1}{2}\ln N + \ln\tau$")
    ax.legend(loc="best", fontsize=8)


_DRAW = {
    "figure1": _draw_figure1,
    "figure2": _draw_figure2,
    "figure3": _draw_figure3,
}


def render(recipe: FigureRecipe):
    """Render one figure; returns the written (png, svg) paths."""
    if recipe.kind not in _DRAW:
        raise PlotsError(f"unknown figure kind {recipe.kind!r}")
    spec = _REQUIRED[recipe.kind]
    missing_roles = sorted(set(spec) - set(recipe.inputs))
    if missing_roles:
        raise PlotsError(f"{recipe.kind} needs CSVs for roles {missing_roles}")
    tables = {role: load_table(recipe.inputs[role], cols, role)
              for role, cols in spec.items()}

    fig, ax = plt.subplots(figsize=(5.2, 3.9), constrained_layout=True)
    try:
        _DRAW[recipe.kind](tables, ax)
        if recipe.xlim is not None:
            ax.set_xlim(*recipe.xlim)
        if recipe.ylim is not None:
            ax.set_ylim(*recipe.ylim)
        out = Path(recipe.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        png = out.with_suffix(".png")
        svg = out.with_suffix(".svg")
        fig.savefig(png, dpi=recipe.dpi)
        fig.savefig(svg)
    finally:
        plt.close(fig)
    return png, svg
