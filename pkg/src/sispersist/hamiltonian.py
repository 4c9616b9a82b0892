"""Extinction paths of the scaled dynamics as Hamiltonian connecting orbits.

The large-population fluctuation theory turns the extinction exponent into
the action of a heteroclinic orbit: from the endemic fixed point (y*, 0) to
the extinct one (0, theta*) of the Hamiltonian flow. This module evaluates
the Hamiltonian and its equations of motion, and solves the connecting orbit
by Hermite-Simpson collocation with subspace boundary conditions at both
saddles. The action is then integrated along the discrete orbit two ways
(forward over theta dy and backward over y dtheta) as an internal check, and
works for fully mixed heterogeneity where no closed form exists.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .asymptotics import endemic_equilibrium, terminal_momentum
from .errors import ConvergenceError, SpecError
from .model import GroupStructure, ModelSpec, beta_for_r0, r0, validate

__all__ = [
    "hamiltonian",
    "hamiltonian_staged",
    "eom_rhs",
    "eom_jacobian",
    "equilibrium_eigenvalues",
    "ExtinctionPath",
    "solve_extinction_path",
    "ActionGrid",
    "grid_spec",
    "action_grid",
]


def hamiltonian(spec: ModelSpec, y, theta) -> float:
    """H(y, theta); zero along the extinction path and at both endpoints."""
    g = spec.groups
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    load = float(np.sum(g.lam * y))
    drive = float(np.sum(g.mu * (g.f - y) * np.expm1(theta)))
    decay = float(np.sum(y * np.expm1(-theta)))
    return spec.beta * load * drive + spec.gamma * decay


def hamiltonian_staged(spec: ModelSpec, y, theta) -> float:
    """Staged Hamiltonian; y and theta have shape (k, stages)."""
    g = spec.groups
    s = spec.stages
    y = np.asarray(y, dtype=float).reshape(g.k, s)
    theta = np.asarray(theta, dtype=float).reshape(g.k, s)
    per_group = y.sum(axis=1)
    load = float(np.sum(g.lam * per_group))
    drive = float(np.sum(g.mu * (g.f - per_group) * np.expm1(theta[:, 0])))
    hop = 0.0
    if s > 1:
        hop = float(np.sum(y[:, :-1] * np.expm1(theta[:, 1:] - theta[:, :-1])))
    out = float(np.sum(y[:, -1] * np.expm1(-theta[:, -1])))
    return spec.beta * load * drive + s * spec.gamma * (hop + out)


def _rhs_batch(spec: ModelSpec, y, theta):
    """Equations of motion for a batch: y, theta of shape (n, k)."""
    g = spec.groups
    e = np.exp(theta)
    ei = np.exp(-theta)
    load = y @ g.lam
    rem = g.f - y
    drive = (g.mu * rem * (e - 1.0)) @ np.ones(g.k)
    dy = spec.beta * load[:, None] * g.mu * rem * e - spec.gamma * y * ei
    dth = (
        -spec.beta * np.outer(drive, g.lam)
        + spec.beta * load[:, None] * g.mu * (e - 1.0)
        - spec.gamma * (ei - 1.0)
    )
    return dy, dth


def _jac_batch(spec: ModelSpec, y, theta):
    """Jacobian of the equations of motion, shape (n, 2k, 2k)."""
    g = spec.groups
    n, k = y.shape
    e = np.exp(theta)
    ei = np.exp(-theta)
    load = y @ g.lam
    rem = g.f - y
    growth = g.mu * rem * e                      # (n, k)
    b = spec.beta
    gy = b * growth[:, :, None] * g.lam[None, None, :]
    diag = b * load[:, None] * g.mu * e + spec.gamma * ei
    gy -= diag[:, :, None] * np.eye(k)
    gt = (b * load[:, None] * growth + spec.gamma * y * ei)[:, :, None] * np.eye(k)
    bump = g.mu * (e - 1.0)                      # (n, k)
    ky = b * (
        g.lam[None, :, None] * bump[:, None, :]
        + bump[:, :, None] * g.lam[None, None, :]
    )
    kt = -b * g.lam[None, :, None] * growth[:, None, :]
    kt += diag[:, :, None] * np.eye(k)
    top = np.concatenate([gy, gt], axis=2)
    bottom = np.concatenate([ky, kt], axis=2)
    return np.concatenate([top, bottom], axis=1)


def eom_rhs(spec: ModelSpec, y, theta):
    """Time derivatives (dy/dt, dtheta/dt) at a single phase point."""
    dy, dth = _rhs_batch(
        spec,
        np.asarray(y, dtype=float)[None, :],
        np.asarray(theta, dtype=float)[None, :],
    )
    return dy[0], dth[0]


def eom_jacobian(spec: ModelSpec, y, theta) -> np.ndarray:
    """Jacobian of the flow at a single phase point, shape (2k, 2k)."""
    return _jac_batch(
        spec,
        np.asarray(y, dtype=float)[None, :],
        np.asarray(theta, dtype=float)[None, :],
    )[0]


@dataclass(frozen=True, eq=False)
class _Frames:
    x_left: np.ndarray
    x_right: np.ndarray
    normal_left: np.ndarray      # complement of the unstable subspace at x_left
    normal_right: np.ndarray     # complement of the stable subspace at x_right
    rate_left: float
    rate_right: float
    eig_left: np.ndarray
    eig_right: np.ndarray


def _frames(spec: ModelSpec) -> _Frames:
    k = spec.k
    y_star = endemic_equilibrium(spec)
    th_star = terminal_momentum(spec)
    x_left = np.concatenate([y_star, np.zeros(k)])
    x_right = np.concatenate([np.zeros(k), th_star])
    j_left = eom_jacobian(spec, y_star, np.zeros(k))
    j_right = eom_jacobian(spec, np.zeros(k), th_star)
    _t, z_l, sdim_l = sla.schur(j_left, output="real", sort="rhp")
    if sdim_l != k:
        raise ConvergenceError(
            f"endemic point has {sdim_l} unstable directions, expected {k}"
        )
    _t, z_r, sdim_r = sla.schur(j_right, output="real", sort="lhp")
    if sdim_r != k:
        raise ConvergenceError(
            f"extinct point has {sdim_r} stable directions, expected {k}"
        )
    eig_l = sla.eigvals(j_left)
    eig_r = sla.eigvals(j_right)
    rate_l = float(np.min(eig_l.real[eig_l.real > 0]))
    rate_r = float(np.min(-eig_r.real[eig_r.real < 0]))
    return _Frames(
        x_left=x_left,
        x_right=x_right,
        normal_left=z_l[:, k:],
        normal_right=z_r[:, k:],
        rate_left=rate_l,
        rate_right=rate_r,
        eig_left=np.sort_complex(eig_l),
        eig_right=np.sort_complex(eig_r),
    )


def equilibrium_eigenvalues(spec: ModelSpec):
    """Flow eigenvalues at the endemic and extinct saddle points."""
    fr = _frames(spec)
    return fr.eig_left, fr.eig_right


@dataclass(eq=False)
class ExtinctionPath:
    t: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    action: float
    action_backward: float
    h_residual_max: float
    endpoint_offsets: tuple
    endpoint_defects: tuple
    horizon: float
    mesh_size: int
    newton_iterations: int
    converged: bool


def _residual_parts(spec, frames, t_nodes, x):
    h = np.diff(t_nodes)
    k2 = x.shape[1]
    k = k2 // 2
    with np.errstate(over="ignore", invalid="ignore"):
        f = np.empty_like(x)
        f[:, :k], f[:, k:] = _rhs_batch(spec, x[:, :k], x[:, k:])
        x_mid = 0.5 * (x[:-1] + x[1:]) + (h[:, None] / 8.0) * (f[:-1] - f[1:])
        f_mid = np.empty_like(x_mid)
        f_mid[:, :k], f_mid[:, k:] = _rhs_batch(spec, x_mid[:, :k], x_mid[:, k:])
        coll = x[1:] - x[:-1] - (h[:, None] / 6.0) * (f[:-1] + 4.0 * f_mid + f[1:])
    bc_l = frames.normal_left.T @ (x[0] - frames.x_left)
    bc_r = frames.normal_right.T @ (x[-1] - frames.x_right)
    res = np.concatenate([bc_l, coll.ravel(), bc_r])
    return res, (h, f, x_mid, f_mid)


def _jacobian_matrix(spec, frames, t_nodes, x, parts):
    h, f, x_mid, f_mid = parts
    m = h.shape[0]
    k2 = x.shape[1]
    k = k2 // 2
    a = _jac_batch(spec, x[:, :k], x[:, k:])
    a_mid = _jac_batch(spec, x_mid[:, :k], x_mid[:, k:])
    eye = np.eye(k2)
    d_mid_n = 0.5 * eye + (h[:, None, None] / 8.0) * a[:-1]
    d_mid_p = 0.5 * eye - (h[:, None, None] / 8.0) * a[1:]
    block_n = -eye - (h[:, None, None] / 6.0) * (a[:-1] + 4.0 * (a_mid @ d_mid_n))
    block_p = eye - (h[:, None, None] / 6.0) * (a[1:] + 4.0 * (a_mid @ d_mid_p))

    n_rows = k + m * k2 + k
    n_cols = (m + 1) * k2
    row_base = k + np.arange(m) * k2
    rows_block = (row_base[:, None, None] + np.arange(k2)[None, :, None])
    rows_block = np.broadcast_to(rows_block, (m, k2, k2))
    cols_n = (np.arange(m) * k2)[:, None, None] + np.arange(k2)[None, None, :]
    cols_n = np.broadcast_to(cols_n, (m, k2, k2))
    cols_p = cols_n + k2

    rows = [rows_block.ravel(), rows_block.ravel()]
    cols = [cols_n.ravel(), cols_p.ravel()]
    vals = [block_n.ravel(), block_p.ravel()]

    bc_rows_l = np.repeat(np.arange(k), k2)
    bc_cols_l = np.tile(np.arange(k2), k)
    rows.append(bc_rows_l)
    cols.append(bc_cols_l)
    vals.append(frames.normal_left.T.ravel())

    bc_rows_r = np.repeat(k + m * k2 + np.arange(k), k2)
    bc_cols_r = np.tile(m * k2 + np.arange(k2), k)
    rows.append(bc_rows_r)
    cols.append(bc_cols_r)
    vals.append(frames.normal_right.T.ravel())

    return sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_rows, n_cols),
    ).tocsc()


def _newton(spec, frames, t_nodes, x, tol, max_iter, step_cap=5.0):
    res, parts = _residual_parts(spec, frames, t_nodes, x)
    norm = np.linalg.norm(res)
    iterations = 0
    for _ in range(max_iter):
        if np.max(np.abs(res)) < tol:
            break
        iterations += 1
        jac = _jacobian_matrix(spec, frames, t_nodes, x, parts)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sp.linalg.MatrixRankWarning)
            try:
                step = spsolve(jac, -res)
            except RuntimeError:
                step = None
        accepted = False
        if step is not None and np.all(np.isfinite(step)):
            # cap the step so the line search starts inside the region where
            # the exponentials are representable
            inf = float(np.max(np.abs(step)))
            if inf > step_cap:
                step = step * (step_cap / inf)
            alpha = 1.0
            while alpha >= 1e-4:
                x_try = x + alpha * step.reshape(x.shape)
                res_try, parts_try = _residual_parts(spec, frames, t_nodes, x_try)
                norm_try = np.linalg.norm(res_try)
                if norm_try < (1.0 - 1e-4 * alpha) * norm or norm_try < tol:
                    x, res, parts, norm = x_try, res_try, parts_try, norm_try
                    accepted = True
                    break
                alpha *= 0.5
        if not accepted:
            # damped normal-equation step for the near-singular direction
            jtj = (jac.T @ jac).tocsc()
            rhs = -jac.T @ res
            nu = 1e-10 * max(1.0, norm)
            for _ in range(12):
                try:
                    step = spsolve(jtj + nu * sp.identity(jtj.shape[0], format="csc"), rhs)
                except RuntimeError:
                    step = None
                if step is not None and np.all(np.isfinite(step)):
                    inf = float(np.max(np.abs(step)))
                    if inf > step_cap:
                        step = step * (step_cap / inf)
                    x_try = x + step.reshape(x.shape)
                    res_try, parts_try = _residual_parts(spec, frames, t_nodes, x_try)
                    norm_try = np.linalg.norm(res_try)
                    if norm_try < norm:
                        x, res, parts, norm = x_try, res_try, parts_try, norm_try
                        accepted = True
                        break
                nu *= 10.0
            if not accepted:
                break
    return x, res, parts, iterations


def _hamiltonian_batch(spec, x):
    k = x.shape[1] // 2
    y = x[:, :k]
    theta = x[:, k:]
    g = spec.groups
    e1 = np.expm1(theta)
    load = y @ g.lam
    drive = ((g.f - y) * g.mu * e1) @ np.ones(k)
    decay = (y * np.expm1(-theta)) @ np.ones(k)
    return spec.beta * load * drive + spec.gamma * decay


def _actions(x, parts):
    h, f, x_mid, f_mid = parts
    k = x.shape[1] // 2
    phi = np.sum(x[:, k:] * f[:, :k], axis=1)
    phi_mid = np.sum(x_mid[:, k:] * f_mid[:, :k], axis=1)
    fwd = float(np.sum(h / 6.0 * (phi[:-1] + 4.0 * phi_mid + phi[1:])))
    psi = np.sum(x[:, :k] * f[:, k:], axis=1)
    psi_mid = np.sum(x_mid[:, :k] * f_mid[:, k:], axis=1)
    bwd = float(-np.sum(h / 6.0 * (psi[:-1] + 4.0 * psi_mid + psi[1:])))
    # truncated-tail corrections, linearized about the fixed points: past the
    # right endpoint theta is frozen so the missing integral of theta.dy is
    # -theta(T).y(T); past the left endpoint y is frozen in the by-parts form
    fwd -= float(np.dot(x[-1, k:], x[-1, :k]))
    bwd -= float(np.dot(x[0, :k], x[0, k:]))
    return fwd, bwd


def _sigmoid_guess(spec, frames, t_nodes):
    rate = min(frames.rate_left, frames.rate_right)
    horizon = t_nodes[-1]
    arg = np.clip(rate * (t_nodes - 0.5 * horizon), -700.0, 700.0)
    fade = 1.0 / (1.0 + np.exp(arg))
    k = spec.k
    x = np.empty((t_nodes.shape[0], 2 * k))
    x[:, :k] = frames.x_left[None, :k] * fade[:, None]
    x[:, k:] = frames.x_right[None, k:] * (1.0 - fade[:, None])
    return x


def _default_horizon(spec, frames, eps, scale):
    return (
        np.log(scale / eps) * (1.0 / frames.rate_left + 1.0 / frames.rate_right)
        + 10.0 / spec.gamma
    )


def _solve_once(spec, frames, t_nodes, x, newton_tol, h_tol, max_newton,
                refine_rounds, mesh_cap):
    total_newton = 0
    for round_idx in range(refine_rounds + 1):
        x, res, parts, iters = _newton(spec, frames, t_nodes, x, newton_tol,
                                       max_newton)
        total_newton += iters
        with np.errstate(over="ignore", invalid="ignore"):
            h_nodes = _hamiltonian_batch(spec, x)
            h_mids = _hamiltonian_batch(spec, parts[2])
        local = np.maximum(
            np.maximum(np.abs(h_nodes[:-1]), np.abs(h_nodes[1:])), np.abs(h_mids)
        )
        h_max = max(float(np.max(np.abs(h_nodes))), float(np.max(np.abs(h_mids))))
        if not np.isfinite(h_max):
            break
        bad = local > h_tol
        if not np.any(bad) or round_idx == refine_rounds:
            break
        if t_nodes.shape[0] + int(bad.sum()) > mesh_cap:
            break
        mids_t = 0.5 * (t_nodes[:-1] + t_nodes[1:])[bad]
        mids_x = 0.5 * (x[:-1] + x[1:])[bad]
        order = np.argsort(np.concatenate([t_nodes, mids_t]), kind="stable")
        t_nodes = np.concatenate([t_nodes, mids_t])[order]
        x = np.concatenate([x, mids_x], axis=0)[order]
    return t_nodes, x, res, parts, h_max, total_newton


def solve_extinction_path(
    spec: ModelSpec,
    mesh: int = 400,
    horizon: float | None = None,
    eps: float = 1e-6,
    newton_tol: float = 1e-12,
    h_tol: float = 1e-9,
    max_newton: int = 60,
    refine_rounds: int = 4,
    mesh_cap: int = 6000,
    guess=None,
    retries: int = 2,
) -> ExtinctionPath:
    """Solve the connecting orbit and integrate its action.

    The orbit is discretized by Hermite-Simpson collocation on a fixed
    horizon, with the endpoint offsets confined to the unstable subspace of
    the endemic point and the stable subspace of the extinct point. eps sets
    the intended endpoint offset through the horizon choice. Intervals whose
    Hamiltonian drift exceeds h_tol are split and the solve repeated, up to
    refine_rounds times; a path is accepted when the drift stays below
    10 * h_tol everywhere. A failed attempt is retried from a fresh guess on
    a longer horizon and denser mesh.
    """
    frames = _frames(spec)
    scale = float(np.max(np.abs(frames.x_left - frames.x_right)))
    accept_h = 10.0 * h_tol
    base_horizon = float(horizon) if horizon is not None else float(
        _default_horizon(spec, frames, eps, scale)
    )

    best = None
    total_newton = 0
    for attempt in range(retries + 1):
        if attempt == 0 and guess is not None:
            t_nodes = np.asarray(guess[0], dtype=float).copy()
            x = np.asarray(guess[1], dtype=float).copy()
            if x.shape != (t_nodes.shape[0], 2 * spec.k):
                raise SpecError("guess shape does not match the spec")
        else:
            grow = 1.4 ** attempt
            m = int(mesh * (1.0 + 0.5 * attempt))
            t_nodes = np.linspace(0.0, base_horizon * grow, m + 1)
            x = _sigmoid_guess(spec, frames, t_nodes)
        t_nodes, x, res, parts, h_max, iters = _solve_once(
            spec, frames, t_nodes, x, newton_tol, h_tol, max_newton,
            refine_rounds, mesh_cap,
        )
        total_newton += iters
        ok = bool(np.max(np.abs(res)) < 1e-9 and np.isfinite(h_max)
                  and h_max <= accept_h)
        if best is None or (np.isfinite(h_max) and h_max < best[3]):
            best = (t_nodes, x, res, h_max, parts)
        if ok:
            best = (t_nodes, x, res, h_max, parts)
            break

    t_nodes, x, res, h_max, parts = best
    k = spec.k
    off_l = float(np.linalg.norm(x[0] - frames.x_left))
    off_r = float(np.linalg.norm(x[-1] - frames.x_right))
    def_l = float(np.max(np.abs(frames.normal_left.T @ (x[0] - frames.x_left))))
    def_r = float(np.max(np.abs(frames.normal_right.T @ (x[-1] - frames.x_right))))
    fwd, bwd = _actions(x, parts)
    converged = bool(np.max(np.abs(res)) < 1e-9 and np.isfinite(h_max)
                     and h_max <= accept_h)
    return ExtinctionPath(
        t=t_nodes,
        y=x[:, :k],
        theta=x[:, k:],
        action=fwd,
        action_backward=bwd,
        h_residual_max=h_max,
        endpoint_offsets=(off_l, off_r),
        endpoint_defects=(def_l, def_r),
        horizon=float(t_nodes[-1]),
        mesh_size=int(t_nodes.shape[0] - 1),
        newton_iterations=total_newton,
        converged=converged,
    )


def grid_spec(lam1: float, mu1: float, target_r0: float = 1.2,
              gamma: float = 1.0) -> ModelSpec:
    """Two-group spec with weights (w, 2-w) on equal fractions.

    lam1 and mu1 must lie in (0, 2); beta is set to hit target_r0.
    """
    if not (0.0 < lam1 < 2.0 and 0.0 < mu1 < 2.0):
        raise SpecError("grid weights must lie strictly inside (0, 2)")
    groups = GroupStructure(
        f=np.array([0.5, 0.5]),
        lam=np.array([lam1, 2.0 - lam1]),
        mu=np.array([mu1, 2.0 - mu1]),
    )
    beta = beta_for_r0(groups, target_r0, gamma)
    return validate(ModelSpec(groups=groups, beta=beta, gamma=gamma))


@dataclass(eq=False)
class ActionGrid:
    lam1_values: np.ndarray
    mu1_values: np.ndarray
    actions: np.ndarray
    h_residuals: np.ndarray
    converged: np.ndarray
    betas: np.ndarray
    target_r0: float
    gamma: float


def action_grid(
    lam1_values,
    mu1_values,
    target_r0: float = 1.2,
    gamma: float = 1.0,
    threads: int = 1,
    **solver_kw,
) -> ActionGrid:
    """Connecting-orbit action over a grid of (lam1, mu1) weight pairs.

    Cells are solved in rings growing outward from the most homogeneous
    cell, each warm-started from its nearest already-solved neighbor, so the
    deformation stays small everywhere. Cells within a ring are independent
    and may run on a thread pool; results do not depend on scheduling.
    """
    lam1_values = np.asarray(lam1_values, dtype=float)
    mu1_values = np.asarray(mu1_values, dtype=float)
    nl, nm = lam1_values.shape[0], mu1_values.shape[0]
    ci = int(np.argmin(np.abs(lam1_values - 1.0)))
    cj = int(np.argmin(np.abs(mu1_values - 1.0)))
    actions = np.full((nl, nm), np.nan)
    h_res = np.full((nl, nm), np.nan)
    conv = np.zeros((nl, nm), dtype=bool)
    betas = np.full((nl, nm), np.nan)
    paths: dict[tuple, ExtinctionPath] = {}

    def ring_of(i, j):
        return max(abs(i - ci), abs(j - cj))

    cells = sorted(
        ((i, j) for i in range(nl) for j in range(nm)),
        key=lambda c: (ring_of(*c), c),
    )

    neighbor_order = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]
    base_mesh = int(solver_kw.get("mesh", 400))

    eps = float(solver_kw.get("eps", 1e-6))

    def solve_cell(cell):
        i, j = cell
        spec = grid_spec(lam1_values[i], mu1_values[j], target_r0, gamma)
        guess = None
        for di, dj in neighbor_order:
            prev = (i + di, j + dj)
            if prev in paths and ring_of(*prev) < ring_of(i, j):
                src = paths[prev]
                # resample onto this cell's own natural horizon and a fresh
                # uniform mesh: inheriting the neighbor's horizon truncates
                # slow edge cells, and inheriting its refined mesh cascades
                frames = _frames(spec)
                scale = float(np.max(np.abs(frames.x_left - frames.x_right)))
                t_own = solver_kw.get("horizon")
                if t_own is None:
                    t_own = _default_horizon(spec, frames, eps, scale)
                t_new = np.linspace(0.0, float(t_own), base_mesh + 1)
                cols = np.concatenate([src.y, src.theta], axis=1)
                x_new = np.empty((t_new.shape[0], cols.shape[1]))
                stretch = src.horizon / float(t_own)
                for c in range(cols.shape[1]):
                    x_new[:, c] = np.interp(t_new * stretch, src.t, cols[:, c])
                guess = (t_new, x_new)
                break
        try:
            path = solve_extinction_path(spec, guess=guess, **solver_kw)
        except (ConvergenceError, RuntimeError):
            return cell, spec, None
        return cell, spec, path

    by_ring: dict[int, list] = {}
    for cell in cells:
        by_ring.setdefault(ring_of(*cell), []).append(cell)

    for ring in sorted(by_ring):
        batch = by_ring[ring]
        if threads > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                solved = list(pool.map(solve_cell, batch))
        else:
            solved = [solve_cell(c) for c in batch]
        for cell, spec, path in solved:
            i, j = cell
            betas[i, j] = spec.beta
            if path is None:
                continue
            paths[cell] = path
            actions[i, j] = path.action
            h_res[i, j] = path.h_residual_max
            conv[i, j] = path.converged
    return ActionGrid(
        lam1_values=lam1_values,
        mu1_values=mu1_values,
        actions=actions,
        h_residuals=h_res,
        converged=conv,
        betas=betas,
        target_r0=target_r0,
        gamma=gamma,
    )
