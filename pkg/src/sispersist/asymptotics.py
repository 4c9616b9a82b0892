"""Closed-form persistence exponents, equilibria, and potential functions.

For a supercritical spec the mean persistence time grows like
tau ~ C * exp(N * A) / sqrt(N). This module computes the exponent A and the
objects it is built from: saturation roots, the endemic equilibrium, the
terminal momentum of the extinction path, and the explicit potentials that
exist when one of the two weight vectors is uniform. Staged variants cover
Erlang-distributed infectious periods; network variants cover degree-derived
specs with heterogeneity on one side only.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import xlogy

from .errors import ConvergenceError, MixedHeterogeneityError, SpecError, SubcriticalError
from .model import DegreeDistribution, ModelSpec

__all__ = [
    "saturation_root",
    "staged_saturation_root",
    "endemic_equilibrium",
    "terminal_momentum",
    "terminal_momentum_staged",
    "momentum_residual",
    "momentum_residual_staged",
    "action_closed_form",
    "action_homogeneous",
    "state_potential",
    "state_potential_gradient",
    "momentum_root",
    "momentum_potential",
    "state_potential_staged",
    "state_potential_gradient_staged",
    "momentum_root_staged",
    "momentum_potential_staged",
    "action_network_out",
    "action_network_in",
    "uniform_weights",
]

_UNIFORM_TOL = 1e-9


def uniform_weights(w, tol: float = _UNIFORM_TOL) -> bool:
    """True when a normalized weight vector is uniformly one."""
    return bool(np.all(np.abs(np.asarray(w) - 1.0) <= tol))


def _decreasing_root(g, dg, residual_tol: float = 1e-14) -> float:
    """Root of a strictly decreasing g on (0, inf) with g(0) > 0.

    Brackets by doubling, bisects to a short interval, then polishes with
    safeguarded Newton. The residual at the returned point is below
    residual_tol in units of g(0)'s natural scale.
    """
    hi = 1.0
    while g(hi) > 0.0:
        hi *= 2.0
        if hi > 1e15:
            raise ConvergenceError("no sign change found while bracketing the root")
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-6 * (1.0 + hi):
            break
    x = 0.5 * (lo + hi)
    for _ in range(60):
        gx = g(x)
        if gx > 0.0:
            lo = max(lo, x)
        elif gx < 0.0:
            hi = min(hi, x)
        slope = dg(x)
        step = gx / slope if slope != 0.0 else 0.0
        x_new = x - step
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-16 * (1.0 + abs(x)) or abs(gx) <= residual_tol:
            x = x_new
            break
        x = x_new
    if abs(g(x)) > 1e-10:
        raise ConvergenceError(f"root polish stalled with residual {g(x):.3e}")
    return float(x)


def saturation_root(a, b, f, beta: float, gamma: float) -> float:
    """Unique positive root D of (beta/gamma) sum_j a_j b_j f_j / (1 + b_j D) = 1.

    The second weight vector saturates the denominator. At D=0 the left side
    is the reproduction number of the pairing, so a root exists exactly in
    the supercritical case; otherwise SubcriticalError is raised.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    f = np.asarray(f, dtype=float)
    ratio = beta / gamma
    base = ratio * float(np.sum(a * b * f))
    if base <= 1.0:
        raise SubcriticalError(
            f"no positive root: reproduction number of this pairing is {base:.6g} <= 1"
        )

    def g(d):
        return ratio * float(np.sum(a * b * f / (1.0 + b * d))) - 1.0

    def dg(d):
        return -ratio * float(np.sum(a * b * b * f / (1.0 + b * d) ** 2))

    return _decreasing_root(g, dg)


def staged_saturation_root(a, b, f, beta: float, gamma: float, stages: int) -> float:
    """Staged generalization of saturation_root.

    Root of (beta/(s*gamma)) sum_j a_j b_j f_j sum_{v=1..s} (1+b_j D)^-v = 1.
    Reduces to saturation_root at s=1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    f = np.asarray(f, dtype=float)
    s = int(stages)
    if s < 1:
        raise SpecError("stages must be a positive integer")
    ratio = beta / (s * gamma)
    base = ratio * s * float(np.sum(a * b * f))
    if base <= 1.0:
        raise SubcriticalError(
            f"no positive root: reproduction number of this pairing is {base:.6g} <= 1"
        )

    def geom(d):
        x = 1.0 / (1.0 + b * d)
        acc = np.zeros_like(b)
        term = np.ones_like(b)
        for _ in range(s):
            term = term * x
            acc = acc + term
        return acc

    def g(d):
        return ratio * float(np.sum(a * b * f * geom(d))) - 1.0

    def dg(d):
        x = 1.0 / (1.0 + b * d)
        acc = np.zeros_like(b)
        term = np.ones_like(b)
        for v in range(1, s + 1):
            term = term * x
            acc = acc + v * term * x
        return -ratio * float(np.sum(a * b * b * f * acc))

    return _decreasing_root(g, dg)


def endemic_equilibrium(spec: ModelSpec) -> np.ndarray:
    """Stable nonzero fixed point y* of the deterministic flow.

    y*_i = mu_i f_i D / (1 + mu_i D) with D the infectivity-susceptibility
    saturation root; only defined for supercritical specs.
    """
    g = spec.groups
    d = saturation_root(g.lam, g.mu, g.f, spec.beta, spec.gamma)
    return g.mu * g.f * d / (1.0 + g.mu * d)


def terminal_momentum(spec: ModelSpec) -> np.ndarray:
    """Momentum coordinates of the extinction endpoint (y=0, theta=theta*).

    theta*_i = -ln(1 + lam_i D~) with D~ the saturation root of the swapped
    pairing (susceptibility paired against infectivity).
    """
    g = spec.groups
    d = saturation_root(g.mu, g.lam, g.f, spec.beta, spec.gamma)
    return -np.log1p(g.lam * d)


def momentum_residual(spec: ModelSpec, theta) -> np.ndarray:
    """Residual of the momentum equilibrium condition at y=0.

    Component i: beta*lam_i*sum_j mu_j f_j (e^{theta_j}-1) + gamma*(e^{-theta_i}-1).
    Zero exactly at theta = terminal_momentum(spec).
    """
    g = spec.groups
    theta = np.asarray(theta, dtype=float)
    drive = float(np.sum(g.mu * g.f * np.expm1(theta)))
    return spec.beta * g.lam * drive + spec.gamma * np.expm1(-theta)


def terminal_momentum_staged(spec: ModelSpec) -> np.ndarray:
    """Terminal momentum for s infectious stages, shape (k, s).

    theta*_{i,v} = -(s+1-v) ln(1 + lam_i D_s) with D_s the staged swapped
    saturation root. Row v=s matches the single-stage formula at s=1.
    """
    g = spec.groups
    s = spec.stages
    d = staged_saturation_root(g.mu, g.lam, g.f, spec.beta, spec.gamma, s)
    base = np.log1p(g.lam * d)
    counts = np.arange(s, 0, -1, dtype=float)
    return -np.outer(base, counts)


def momentum_residual_staged(spec: ModelSpec, theta) -> np.ndarray:
    """Gradient of the staged Hamiltonian in y at (y=0, theta), shape (k, s).

    Vanishing residual characterizes the staged terminal momentum.
    """
    g = spec.groups
    s = spec.stages
    theta = np.asarray(theta, dtype=float).reshape(g.k, s)
    drive = float(np.sum(g.mu * g.f * np.expm1(theta[:, 0])))
    res = np.empty((g.k, s))
    sg = s * spec.gamma
    for v in range(s):
        if v < s - 1:
            hop = np.expm1(theta[:, v + 1] - theta[:, v])
        else:
            hop = np.expm1(-theta[:, s - 1])
        res[:, v] = spec.beta * g.lam * drive + sg * hop
    return res


def action_homogeneous(r0: float) -> float:
    """Per-individual extinction exponent of the homogeneous model.

    A0 = 1/r0 - 1 + ln(r0), positive exactly for r0 > 1.
    """
    if r0 <= 1.0:
        raise SubcriticalError(f"r0={r0:.6g} is not supercritical")
    return 1.0 / r0 - 1.0 + math.log(r0)


def _heterogeneous_side(spec: ModelSpec):
    """Return the single heterogeneous weight vector, or None if homogeneous."""
    g = spec.groups
    lam_uniform = uniform_weights(g.lam)
    mu_uniform = uniform_weights(g.mu)
    if lam_uniform and mu_uniform:
        return None
    if mu_uniform:
        return g.lam
    if lam_uniform:
        return g.mu
    raise MixedHeterogeneityError(
        "closed form requires infectivity or susceptibility to be uniform"
    )


def action_closed_form(spec: ModelSpec) -> float:
    """Extinction exponent when at most one weight vector is heterogeneous.

    A = sum_i f_i ln(1 + w_i D(1,w)) - (gamma/beta) D(1,w), where w is the
    heterogeneous vector. Both heterogeneity sides give the same functional,
    which is the analytic reflection of network duality. Raises
    MixedHeterogeneityError when both vectors are heterogeneous and
    SubcriticalError when r0 <= 1.
    """
    g = spec.groups
    w = _heterogeneous_side(spec)
    if w is None:
        return action_homogeneous(spec.beta / spec.gamma * float(np.sum(g.lam * g.mu * g.f)))
    d = saturation_root(np.ones(g.k), w, g.f, spec.beta, spec.gamma)
    return float(np.sum(g.f * np.log1p(w * d)) - spec.gamma / spec.beta * d)


def state_potential(spec: ModelSpec, y) -> float:
    """Potential V(y) solving the stationary equation for uniform infectivity.

    Defined on 0 <= y_i <= f_i with the x ln x = 0 convention at the
    boundary. V(0) - V(y*) equals the extinction exponent.
    """
    g = spec.groups
    if not uniform_weights(g.lam):
        raise MixedHeterogeneityError("state potential requires uniform infectivity")
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y > g.f):
        raise SpecError("y must lie in the box [0, f]")
    total = float(np.sum(y))
    c = np.log(spec.beta / spec.gamma * g.mu)
    val = float(np.sum(y + xlogy(y, y) - y * c)) - float(xlogy(total, total))
    val += float(np.sum(xlogy(g.f - y, g.f - y)))
    return val


def state_potential_gradient(spec: ModelSpec, y) -> np.ndarray:
    """Gradient of state_potential at an interior point.

    dV/dy_i = ln( y_i / ((beta/gamma) mu_i (f_i - y_i) sum_j y_j) ).
    """
    g = spec.groups
    if not uniform_weights(g.lam):
        raise MixedHeterogeneityError("state potential requires uniform infectivity")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or np.any(y >= g.f):
        raise SpecError("gradient needs y strictly inside (0, f)")
    total = float(np.sum(y))
    return np.log(y) - np.log(spec.beta / spec.gamma * g.mu * (g.f - y) * total)


def momentum_root(spec: ModelSpec, theta, boundary_tol: float = 1e-10) -> float:
    """Nonnegative root Q of (beta/gamma) sum_j mu_j f_j / (e^{-theta_j} + mu_j Q) = 1.

    Returns 0 when theta sits at the terminal momentum (where the defining
    expression already balances at Q=0); raises if theta lies beyond it.
    """
    g = spec.groups
    if not uniform_weights(g.lam):
        raise MixedHeterogeneityError("momentum potential requires uniform infectivity")
    theta = np.asarray(theta, dtype=float)
    ratio = spec.beta / spec.gamma
    inv = np.exp(-theta)

    def g_fun(q):
        return ratio * float(np.sum(g.mu * g.f / (inv + g.mu * q))) - 1.0

    def dg_fun(q):
        return -ratio * float(np.sum(g.mu ** 2 * g.f / (inv + g.mu * q) ** 2))

    at_zero = g_fun(0.0)
    if at_zero <= 0.0:
        if at_zero >= -boundary_tol:
            return 0.0
        raise SpecError("theta lies beyond the terminal momentum; no nonnegative root")
    return _decreasing_root(g_fun, dg_fun)


def momentum_potential(spec: ModelSpec, theta) -> float:
    """Potential U(theta) for uniform infectivity.

    U = sum_i f_i ln(1 + mu_i e^{theta_i} Q) - (gamma/beta) Q with
    Q = momentum_root. U(0) - U(theta*) equals the extinction exponent and
    U(theta*) = 0.
    """
    g = spec.groups
    theta = np.asarray(theta, dtype=float)
    q = momentum_root(spec, theta)
    return float(np.sum(g.f * np.log1p(g.mu * np.exp(theta) * q)) - spec.gamma / spec.beta * q)


def state_potential_staged(spec: ModelSpec, y) -> float:
    """Staged potential over per-stage occupancies y with shape (k, s)."""
    g = spec.groups
    s = spec.stages
    if not uniform_weights(g.lam):
        raise MixedHeterogeneityError("state potential requires uniform infectivity")
    y = np.asarray(y, dtype=float).reshape(g.k, s)
    per_group = y.sum(axis=1)
    if np.any(y < 0) or np.any(per_group > g.f + 1e-15):
        raise SpecError("stage occupancies must be nonnegative with row sums <= f")
    total = float(y.sum())
    c = np.log(spec.beta / (s * spec.gamma) * g.mu)
    val = float(np.sum(y + xlogy(y, y) - y * c[:, None])) - float(xlogy(total, total))
    rem = np.clip(g.f - per_group, 0.0, None)
    val += float(np.sum(xlogy(rem, rem)))
    return val


def state_potential_gradient_staged(spec: ModelSpec, y) -> np.ndarray:
    """Gradient of the staged potential at an interior point, shape (k, s)."""
    g = spec.groups
    s = spec.stages
    if not uniform_weights(g.lam):
        raise MixedHeterogeneityError("state potential requires uniform infectivity")
    y = np.asarray(y, dtype=float).reshape(g.k, s)
    per_group = y.sum(axis=1)
    if np.any(y <= 0) or np.any(per_group >= g.f):
        raise SpecError("gradient needs occupancies strictly inside the box")
    total = float(y.sum())
    scale = spec.beta / (s * spec.gamma) * g.mu * (g.f - per_group) * total
    return np.log(y) - np.log(scale)[:, None]


def momentum_root_staged(spec: ModelSpec, theta, boundary_tol: float = 1e-10) -> float:
    """Staged analogue of momentum_root; theta has shape (k, s)."""
    g = spec.groups
    s = spec.stages
    if not uniform_weights(g.lam):
        raise MixedHeterogeneityError("momentum potential requires uniform infectivity")
    theta = np.asarray(theta, dtype=float).reshape(g.k, s)
    e_sum = np.exp(theta).sum(axis=1)
    ratio = spec.beta / (s * spec.gamma)

    def g_fun(q):
        return ratio * float(np.sum(g.mu * g.f * e_sum / (1.0 + g.mu * e_sum * q))) - 1.0

    def dg_fun(q):
        return -ratio * float(np.sum((g.mu * e_sum) ** 2 * g.f / (1.0 + g.mu * e_sum * q) ** 2))

    at_zero = g_fun(0.0)
    if at_zero <= 0.0:
        if at_zero >= -boundary_tol:
            return 0.0
        raise SpecError("theta lies beyond the staged terminal momentum")
    return _decreasing_root(g_fun, dg_fun)


def momentum_potential_staged(spec: ModelSpec, theta) -> float:
    """Staged potential U over momenta with shape (k, s).

    U = sum_i f_i ln(1 + mu_i (sum_v e^{theta_iv}) Q_s) - (s gamma / beta) Q_s.
    """
    g = spec.groups
    s = spec.stages
    theta = np.asarray(theta, dtype=float).reshape(g.k, s)
    q = momentum_root_staged(spec, theta)
    e_sum = np.exp(theta).sum(axis=1)
    return float(
        np.sum(g.f * np.log1p(g.mu * e_sum * q)) - s * spec.gamma / spec.beta * q
    )


def _constant_degrees(values, prob, side: str) -> float:
    values = np.asarray(values, dtype=float)
    mean = float(np.sum(values * prob) / np.sum(prob))
    if np.any(np.abs(values - mean) > 1e-12 * max(1.0, abs(mean))):
        raise MixedHeterogeneityError(f"this route requires a constant {side}-degree")
    return mean


def action_network_out(dist: DegreeDistribution, kappa: float, gamma: float) -> float:
    """Extinction exponent for a network heterogeneous in out-degree only.

    Requires the in-degree to be constant across the support. The exponent is
    sum_j P(d_out = d_j) ln(1 + d_j D) - (gamma/kappa) D with D the root of
    (kappa/gamma) sum_j d_j P(d_out = d_j) / (1 + d_j D) = 1.
    """
    prob = np.asarray(dist.prob, dtype=float)
    prob = prob / np.sum(prob)
    _constant_degrees(dist.d_in, prob, "in")
    d_out = np.asarray(dist.d_out, dtype=float)
    d = saturation_root(np.ones_like(d_out), d_out, prob, kappa, gamma)
    return float(np.sum(prob * np.log1p(d_out * d)) - gamma / kappa * d)


def action_network_in(dist: DegreeDistribution, kappa: float, gamma: float) -> float:
    """Extinction exponent for a network heterogeneous in in-degree only.

    Mirror image of action_network_out; requires constant out-degree.
    """
    prob = np.asarray(dist.prob, dtype=float)
    prob = prob / np.sum(prob)
    _constant_degrees(dist.d_out, prob, "out")
    d_in = np.asarray(dist.d_in, dtype=float)
    d = saturation_root(np.ones_like(d_in), d_in, prob, kappa, gamma)
    return float(np.sum(prob * np.log1p(d_in * d)) - gamma / kappa * d)
