"""Batch front end: config in, CSV artifacts out.

Every subcommand is a thin composition of library calls; no numeric logic
lives here. Output files start with '#' comment lines recording the fully
resolved configuration (no timestamps), so re-running a command with the
same inputs and seed reproduces the files byte for byte.

Exit codes: 0 success, 1 numeric failure (partial results are still
written, with failure markers), 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    action_closed_form,
    action_homogeneous,
    endemic_equilibrium,
    saturation_root,
    staged_saturation_root,
    terminal_momentum,
    terminal_momentum_staged,
)
from .errors import (
    ConvergenceError,
    MixedHeterogeneityError,
    NoExtinctionsError,
    SpecError,
)
from .exact import finite_size_action_estimate, quasi_stationary
from .hamiltonian import action_grid, grid_spec, solve_extinction_path
from .model import (
    GroupStructure,
    ModelSpec,
    beta_for_r0,
    load_config,
    r0,
    spec_as_dict,
    validate,
)
from .montecarlo import SimConfig, duality_probe, estimate_tau
from .ordering import p_majorizes, spread_family

__all__ = ["main", "build_parser"]


# ---------------------------------------------------------------------------
# deterministic CSV output

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return format(v, ".12g")
    return str(value)


def _write_csv(path: Path, comments, columns, rows) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def _provenance(kind: str, spec: ModelSpec | None = None, **params) -> list:
    lines = [f"sispersist {__version__} {kind}"]
    if spec is not None:
        info = spec_as_dict(spec)
        for key in sorted(info):
            value = info[key]
            if isinstance(value, (list, tuple)):
                text = " ".join(_fmt(v) for v in value)
            else:
                text = _fmt(value)
            lines.append(f"spec.{key} = {text}")
    for key in sorted(params):
        lines.append(f"{key} = {_fmt(params[key])}")
    return lines


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_int_list(text: str):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise SpecError(f"expected a comma-separated integer list, got {text!r}") from exc
    if not values:
        raise SpecError("empty sweep list")
    return values


def _parse_float_list(text: str):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise SpecError(f"expected a comma-separated number list, got {text!r}") from exc
    if not values:
        raise SpecError("empty list")
    return values


# ---------------------------------------------------------------------------
# built-in demonstration specs

def _strong_infectivity_spec() -> ModelSpec:
    """Two equal groups with strongly spread infectivity, R0 = 1.5."""
    groups = GroupStructure(
        f=np.array([0.5, 0.5]),
        lam=np.array([100.0 / 51.0, 2.0 / 51.0]),
        mu=np.array([1.0, 1.0]),
    )
    return validate(ModelSpec(groups=groups, beta=1.5, gamma=1.0))


def _mild_infectivity_spec() -> ModelSpec:
    """Two equal groups with mildly spread infectivity, R0 = 1.2."""
    groups = GroupStructure(
        f=np.array([0.5, 0.5]),
        lam=np.array([5.0 / 3.0, 1.0 / 3.0]),
        mu=np.array([1.0, 1.0]),
    )
    return validate(ModelSpec(groups=groups, beta=1.2, gamma=1.0))


def _spec_from_args(args, default=None) -> ModelSpec:
    if args.config is not None:
        return load_config(args.config)
    if default is not None:
        return default
    raise SpecError("this subcommand needs --config")


def _with_stages(spec: ModelSpec, stages: int) -> ModelSpec:
    if stages == spec.stages:
        return spec
    return validate(ModelSpec(
        groups=spec.groups, beta=spec.beta, gamma=spec.gamma,
        stages=stages, population=spec.population,
    ))


def _parse_period(text: str, spec: ModelSpec):
    if text in ("exponential", "constant"):
        return text, spec
    if text == "erlang" or text.startswith("erlang:"):
        stages = spec.stages
        if ":" in text:
            stages = int(text.split(":", 1)[1])
        return "erlang", _with_stages(spec, stages)
    raise SpecError(
        f"unknown period kind {text!r}; use exponential, erlang[:s], or constant"
    )


def _period_label(kind: str, spec: ModelSpec) -> str:
    if kind == "erlang":
        return f"erlang:{spec.stages}"
    return kind


# ---------------------------------------------------------------------------
# subcommands

def cmd_action(args) -> int:
    spec = _spec_from_args(args)
    try:
        action = action_closed_form(spec)
    except MixedHeterogeneityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("use the bvp subcommand for mixed heterogeneity", file=sys.stderr)
        return 2
    g = spec.groups
    rows = [
        ("r0", r0(spec)),
        ("beta", spec.beta),
        ("gamma", spec.gamma),
        ("stages", spec.stages),
        ("action", action),
        ("action_homogeneous", action_homogeneous(r0(spec))),
    ]
    rows.append(("d_endemic", saturation_root(g.lam, g.mu, g.f, spec.beta, spec.gamma)))
    if spec.stages == 1:
        rows.append(("d_terminal", saturation_root(g.mu, g.lam, g.f, spec.beta, spec.gamma)))
    else:
        rows.append(("d_terminal", staged_saturation_root(
            g.mu, g.lam, g.f, spec.beta, spec.gamma, spec.stages)))
    y_star = endemic_equilibrium(spec)
    for i, v in enumerate(y_star, start=1):
        rows.append((f"y_star_{i}", v))
    if spec.stages == 1:
        theta = terminal_momentum(spec)
        for i, v in enumerate(theta, start=1):
            rows.append((f"theta_star_{i}", v))
    else:
        theta = terminal_momentum_staged(spec)
        for i in range(spec.k):
            for v in range(spec.stages):
                rows.append((f"theta_star_{i + 1}_{v + 1}", theta[i, v]))
    out = _out_dir(args)
    comments = _provenance("action", spec)
    _write_csv(out / "action.csv", comments, ["name", "value"], rows)
    print(f"action = {_fmt(action)}")
    return 0


def cmd_exact_tau(args) -> int:
    spec = _spec_from_args(args)
    if args.n_list is not None:
        n_list = _parse_int_list(args.n_list)
    elif spec.population is not None:
        n_list = [spec.population]
    else:
        raise SpecError("give --n-list or a population in the config")
    tol = args.tol if args.tol is not None else 1e-10
    rows = []
    prev = None
    for n in n_list:
        result = quasi_stationary(spec, population=n, tol_residual=tol)
        estimate = math.nan
        if prev is not None:
            estimate = finite_size_action_estimate(prev[1], prev[0], result.tau, n)
        rows.append((
            n, result.tau, math.log(result.tau) / n, estimate,
            result.residual_inf, result.iterations,
        ))
        prev = (n, result.tau)
        print(f"N={n} tau={_fmt(result.tau)}")
    out = _out_dir(args)
    comments = _provenance("exact-tau", spec, n_list=",".join(map(str, n_list)),
                           tol_residual=tol)
    _write_csv(
        out / "exact_tau.csv", comments,
        ["n", "tau", "ln_tau_over_n", "action_estimate", "residual", "iterations"],
        rows,
    )
    return 0


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    kind, spec = _parse_period(args.period, spec)
    if args.n_list is not None:
        n_list = _parse_int_list(args.n_list)
    elif spec.population is not None:
        n_list = [spec.population]
    else:
        raise SpecError("give --n-list or a population in the config")
    rows = []
    for n in n_list:
        config = SimConfig(
            spec=spec, n=n, period_kind=kind, replicates=args.replicates,
            t0=args.t0, tmax=args.tmax, seed=args.seed,
        )
        est = estimate_tau(config, threads=args.threads)
        rows.append((
            n, _period_label(kind, spec), est.tau_hat, est.extinct, est.survived,
            est.discarded, est.stderr, est.seed,
        ))
        print(f"N={n} tau_hat={_fmt(est.tau_hat)} stderr={_fmt(est.stderr)}")
    out = _out_dir(args)
    comments = _provenance(
        "simulate", spec, n_list=",".join(map(str, n_list)),
        period=_period_label(kind, spec), replicates=args.replicates,
        seed=args.seed, t0=args.t0, tmax=args.tmax,
    )
    _write_csv(
        out / "simulate.csv", comments,
        ["N", "period_kind", "tau_hat", "r", "m", "discarded", "stderr", "seed"],
        rows,
    )
    return 0


def cmd_bvp(args) -> int:
    spec = _spec_from_args(args)
    h_tol = args.tol if args.tol is not None else 1e-8
    path = solve_extinction_path(spec, mesh=args.mesh, h_tol=h_tol)
    out = _out_dir(args)
    comments = _provenance("bvp", spec, mesh=args.mesh, h_tol=h_tol)
    summary = [(
        path.action, path.action_backward, path.h_residual_max,
        path.endpoint_offsets[0], path.endpoint_offsets[1],
        path.endpoint_defects[0], path.endpoint_defects[1],
        path.horizon, path.mesh_size, path.newton_iterations, path.converged,
    )]
    _write_csv(
        out / "bvp.csv", comments,
        ["action", "action_backward", "h_residual_max", "offset_left",
         "offset_right", "defect_left", "defect_right", "horizon",
         "mesh_size", "newton_iterations", "converged"],
        summary,
    )
    k = spec.k
    columns = ["t"]
    columns += [f"y_{i + 1}" for i in range(k)]
    columns += [f"theta_{i + 1}" for i in range(k)]
    rows = [
        (path.t[i], *path.y[i], *path.theta[i])
        for i in range(path.t.shape[0])
    ]
    _write_csv(out / "bvp_path.csv", comments, columns, rows)
    print(f"action = {_fmt(path.action)} (backward {_fmt(path.action_backward)})")
    print(f"max |H| = {_fmt(path.h_residual_max)}")
    if not path.converged:
        print("solver did not reach tolerance", file=sys.stderr)
        return 1
    return 0


def _grid_rows(grid):
    rows = []
    for i, l1 in enumerate(grid.lam1_values):
        for j, m1 in enumerate(grid.mu1_values):
            rows.append((
                l1, m1, grid.betas[i, j], grid.actions[i, j],
                grid.h_residuals[i, j], bool(grid.converged[i, j]),
            ))
    return rows


def cmd_contour_grid(args) -> int:
    values = np.linspace(0.1, 1.9, args.grid)
    grid = action_grid(values, values, target_r0=args.r0, gamma=1.0,
                       threads=args.threads)
    out = _out_dir(args)
    comments = _provenance("contour-grid", None, grid=args.grid,
                           target_r0=args.r0, threads=args.threads)
    _write_csv(
        out / "contour_grid.csv", comments,
        ["lambda1", "mu1", "beta", "action", "h_residual_max", "converged"],
        _grid_rows(grid),
    )
    if not np.all(grid.converged):
        bad = int(np.size(grid.converged) - np.count_nonzero(grid.converged))
        print(f"{bad} grid cells failed to converge", file=sys.stderr)
        return 1
    return 0


def cmd_figure1(args) -> int:
    spec = _spec_from_args(args, default=_strong_infectivity_spec())
    n_list = (_parse_int_list(args.n_list) if args.n_list is not None
              else list(range(100, 651, 50)))
    action = action_closed_form(spec)
    homog = action_homogeneous(r0(spec))
    rows = []
    for n in n_list:
        result = quasi_stationary(spec, population=n)
        rows.append((n, math.log(result.tau) / n, action, homog))
        print(f"N={n} ln(tau)/N={_fmt(rows[-1][1])}")
    out = _out_dir(args)
    comments = _provenance("figure1", spec, n_list=",".join(map(str, n_list)))
    _write_csv(
        out / "figure1.csv", comments,
        ["N", "ln_tau_over_N", "action", "action_homog"],
        rows,
    )
    return 0


def cmd_figure2(args) -> int:
    values = np.linspace(0.1, 1.9, args.grid)
    grid = action_grid(values, values, target_r0=args.r0, gamma=1.0,
                       threads=args.threads)
    out = _out_dir(args)
    comments = _provenance("figure2", None, grid=args.grid, target_r0=args.r0,
                           finite_grid=args.finite_grid, n_pair=args.n_pair,
                           threads=args.threads)
    _write_csv(
        out / "figure2_bvp.csv", comments,
        ["lambda1", "mu1", "beta", "action", "h_residual_max", "converged"],
        _grid_rows(grid),
    )
    n1, n2 = _parse_int_list(args.n_pair)
    fine = np.linspace(0.1, 1.9, args.finite_grid)
    status = 0

    def finite_cell(pair):
        l1, m1 = pair
        cell = grid_spec(float(l1), float(m1), args.r0, 1.0)
        try:
            tau1 = quasi_stationary(cell, population=n1).tau
            tau2 = quasi_stationary(cell, population=n2).tau
            return (l1, m1, cell.beta, n1, n2,
                    finite_size_action_estimate(tau1, n1, tau2, n2), True)
        except ConvergenceError:
            return (l1, m1, cell.beta, n1, n2, math.nan, False)

    pairs = [(l1, m1) for l1 in fine for m1 in fine]
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(finite_cell, pairs))
    else:
        rows = [finite_cell(p) for p in pairs]
    # row order is the loop order of `pairs`, independent of scheduling
    if any(not r[-1] for r in rows):
        status = 1
    _write_csv(
        out / "figure2_finite.csv", comments,
        ["lambda1", "mu1", "beta", "n1", "n2", "action_estimate", "converged"],
        rows,
    )
    if not np.all(grid.converged):
        bad = int(np.size(grid.converged) - np.count_nonzero(grid.converged))
        print(f"{bad} grid cells failed to converge", file=sys.stderr)
        status = 1
    return status


def cmd_figure3(args) -> int:
    spec = _spec_from_args(args, default=_mild_infectivity_spec())
    action = action_closed_form(spec)
    out = _out_dir(args)

    exact_ns = (_parse_int_list(args.exact_n_list) if args.exact_n_list is not None
                else list(range(200, 601, 50)))
    exact_rows = []
    for n in exact_ns:
        result = quasi_stationary(spec, population=n)
        exact_rows.append((n, result.tau, 0.5 * math.log(n) + math.log(result.tau)))
        print(f"exact N={n} tau={_fmt(result.tau)}")
    comments = _provenance(
        "figure3", spec, exact_n_list=",".join(map(str, exact_ns)),
        n_list=args.n_list or "200,300,400,500,600",
        replicates=args.replicates, seed=args.seed,
    )
    _write_csv(out / "figure3_exact.csv", comments, ["N", "tau", "log_term"],
               exact_rows)
    _write_csv(out / "figure3_theory.csv", comments, ["action"], [(action,)])

    sim_ns = (_parse_int_list(args.n_list) if args.n_list is not None
              else [200, 300, 400, 500, 600])
    sim_rows = []
    for n in sim_ns:
        config = SimConfig(spec=spec, n=n, period_kind="constant",
                           replicates=args.replicates, seed=args.seed)
        probe = duality_probe(config, threads=args.threads)
        for variant, est in (("infectivity", probe.forward),
                             ("susceptibility", probe.swapped)):
            sim_rows.append((
                n, est.period_kind, est.tau_hat, est.extinct, est.survived,
                est.discarded, est.stderr, est.seed, variant,
                0.5 * math.log(n) + math.log(est.tau_hat),
            ))
        print(f"simulated N={n} ratio={_fmt(probe.ratio)}"
              f" (stderr {_fmt(probe.ratio_stderr)})")
    _write_csv(
        out / "figure3_sim.csv", comments,
        ["N", "period_kind", "tau_hat", "r", "m", "discarded", "stderr",
         "seed", "variant", "log_term"],
        sim_rows,
    )
    return 0


def cmd_order_check(args) -> int:
    if args.config is not None:
        base_spec = load_config(args.config)
        weights = base_spec.f
        gamma = base_spec.gamma
        target = r0(base_spec)
    else:
        weights = np.array([0.5, 0.5])
        gamma = 1.0
        target = args.r0
    epsilons = _parse_float_list(args.epsilons)
    k = weights.shape[0]
    direction = np.zeros(k)
    direction[0] = 1.0 / (k * weights[0])
    direction[-1] = -1.0 / (k * weights[-1])
    family = spread_family(np.ones(k), weights, direction, epsilons)

    specs = []
    for vec in family:
        if args.variant == "infectivity":
            groups = GroupStructure(f=weights, lam=vec, mu=np.ones(k))
        else:
            groups = GroupStructure(f=weights, lam=np.ones(k), mu=vec)
        beta = beta_for_r0(groups, target, gamma)
        specs.append(validate(ModelSpec(groups=groups, beta=beta, gamma=gamma)))
    actions = [action_closed_form(s) for s in specs]

    rows = []
    all_consistent = True
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            ordered = p_majorizes(family[i], family[j], weights)
            consistent = (not ordered) or actions[i] >= actions[j] - 1e-12
            all_consistent = all_consistent and consistent
            rows.append((
                i, j, epsilons[i], epsilons[j], ordered,
                actions[i], actions[j], consistent,
            ))
    out = _out_dir(args)
    comments = _provenance(
        "order-check", None, variant=args.variant, target_r0=target,
        gamma=gamma, epsilons=args.epsilons,
        weights=" ".join(_fmt(w) for w in weights),
    )
    _write_csv(
        out / "order_check.csv", comments,
        ["i", "j", "eps_i", "eps_j", "p_majorized", "action_i", "action_j",
         "consistent"],
        rows,
    )
    if not all_consistent:
        print("action ordering violated", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=None, help="model config (TOML)")
    shared.add_argument("--out", default="out", help="output directory")
    shared.add_argument("--seed", type=int, default=0, help="root RNG seed")
    shared.add_argument("--threads", type=int, default=1, help="worker threads")
    shared.add_argument("--tol", type=float, default=None,
                        help="subcommand tolerance override")

    parser = argparse.ArgumentParser(
        prog="sispersist",
        description="Persistence times of heterogeneous SIS epidemics: "
                    "closed-form actions, exact eigenvalue route, connecting-"
                    "orbit solver, and Monte-Carlo estimation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"sispersist {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("action", parents=[shared],
                       help="closed-form action and equilibria for one spec")
    p.set_defaults(func=cmd_action)

    p = sub.add_parser("exact-tau", parents=[shared],
                       help="mean persistence time by the eigenvalue route")
    p.add_argument("--n-list", default=None, help="comma list of populations")
    p.set_defaults(func=cmd_exact_tau)

    p = sub.add_parser("simulate", parents=[shared],
                       help="Monte-Carlo persistence-time estimate")
    p.add_argument("--n-list", default=None, help="comma list of populations")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--period", default="exponential",
                   help="exponential, erlang[:s], or constant")
    p.add_argument("--t0", type=float, default=None, help="burn-in time")
    p.add_argument("--tmax", type=float, default=None, help="censoring time")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bvp", parents=[shared],
                       help="connecting-orbit action for one spec")
    p.add_argument("--mesh", type=int, default=400, help="collocation intervals")
    p.set_defaults(func=cmd_bvp)

    p = sub.add_parser("contour-grid", parents=[shared],
                       help="connecting-orbit action over a weight grid")
    p.add_argument("--grid", type=int, default=11, help="grid resolution")
    p.add_argument("--r0", type=float, default=1.2)
    p.set_defaults(func=cmd_contour_grid)

    p = sub.add_parser("figure1", parents=[shared],
                       help="exact ln(tau)/N against N with asymptote columns")
    p.add_argument("--n-list", default=None, help="comma list of populations")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("figure2", parents=[shared],
                       help="action contour grid plus finite-N slope grid")
    p.add_argument("--grid", type=int, default=11)
    p.add_argument("--finite-grid", type=int, default=11)
    p.add_argument("--n-pair", default="200,300",
                   help="two populations for the finite-N slope")
    p.add_argument("--r0", type=float, default=1.2)
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("figure3", parents=[shared],
                       help="constant-period simulation sweep with exact and "
                            "asymptotic references")
    p.add_argument("--n-list", default=None, help="simulated populations")
    p.add_argument("--exact-n-list", default=None, help="exact-route populations")
    p.add_argument("--replicates", type=int, default=2000)
    p.set_defaults(func=cmd_figure3)

    p = sub.add_parser("order-check", parents=[shared],
                       help="spread-ordered weight family and action ordering")
    p.add_argument("--epsilons", default="0,0.3,0.6")
    p.add_argument("--variant", choices=["infectivity", "susceptibility"],
                   default="infectivity")
    p.add_argument("--r0", type=float, default=1.5)
    p.set_defaults(func=cmd_order_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, NoExtinctionsError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
