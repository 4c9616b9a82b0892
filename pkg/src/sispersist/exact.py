"""Exact persistence times from the absorbing chain's dominant eigenvalue.

For a finite population the infection counts form a continuous-time Markov
chain absorbed at the infection-free state. The quasi-stationary distribution
q is the dominant left eigenvector of the transient generator block, and the
mean persistence time from quasi-stationarity is tau = -1/eigenvalue. Power
iteration runs on the uniformized substochastic matrix P = I + Q/big, and tau
is extracted through the leak identity tau = 1/E_q[rate into absorption],
which avoids the catastrophic cancellation of forming 1 - spectral_radius
when tau is astronomically large.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import _kernels as kernels
from .errors import ConvergenceError, SpecError, StateSpaceError
from .model import GroupStructure, ModelSpec, group_sizes, spec_digest
from .asymptotics import state_potential, uniform_weights

__all__ = [
    "StateSpace",
    "ExactSystem",
    "QsdResult",
    "QsdCache",
    "build_generator",
    "quasi_stationary",
    "expected_absorption_times",
    "transient_probabilities",
    "finite_size_action_estimate",
    "log_profile",
    "profile_slope",
    "dump_qsd_csv",
]

STATE_CAP = 5_000_000


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Mixed-radix encoding of per-group infective counts."""

    sizes: np.ndarray
    strides: np.ndarray
    total: int

    @classmethod
    def for_sizes(cls, sizes, cap: int = STATE_CAP) -> "StateSpace":
        sizes = np.asarray(sizes, dtype=np.int64)
        radix = sizes + 1
        total = int(np.prod(radix, dtype=np.int64))
        if total > cap:
            raise StateSpaceError(
                f"state space has {total} states, above the cap of {cap}"
            )
        strides = np.ones_like(sizes)
        for j in range(1, sizes.shape[0]):
            strides[j] = strides[j - 1] * radix[j - 1]
        return cls(sizes=sizes, strides=strides, total=total)

    def encode(self, counts) -> int:
        counts = np.asarray(counts, dtype=np.int64)
        if np.any(counts < 0) or np.any(counts > self.sizes):
            raise SpecError("counts outside the state space")
        return int(np.sum(counts * self.strides))

    def counts_all(self) -> np.ndarray:
        """Per-group counts for every index, shape (k, total)."""
        idx = np.arange(self.total, dtype=np.int64)
        radix = self.sizes + 1
        out = np.empty((self.sizes.shape[0], self.total), dtype=np.int64)
        for j in range(self.sizes.shape[0]):
            out[j] = (idx // self.strides[j]) % radix[j]
        return out


@dataclass(eq=False)
class ExactSystem:
    """Transient-block generator in transposed CSR form plus the leak vector."""

    spec: ModelSpec
    space: StateSpace
    qt: sp.csr_matrix
    leak: np.ndarray
    exit_max: float


@dataclass(eq=False)
class QsdResult:
    tau: float
    residual_inf: float
    rate_change: float
    iterations: int
    big: float
    q: np.ndarray | None
    space: StateSpace | None
    spec: ModelSpec | None


def _rates(spec: ModelSpec, space: StateSpace):
    """Per-state infection and recovery rates over the full index range."""
    counts = space.counts_all()
    n_total = float(space.sizes.sum())
    w = spec.lam @ counts
    inf_rates = (
        spec.beta / n_total * w * spec.mu[:, None]
        * (space.sizes[:, None] - counts).astype(float)
    )
    rec_rates = spec.gamma * counts.astype(float)
    return counts, inf_rates, rec_rates


def build_generator(spec: ModelSpec, population: int | None = None,
                    cap: int = STATE_CAP) -> ExactSystem:
    """Assemble the transient generator block, transposed, in CSR form.

    Only single-stage (memoryless) specs are supported on the exact route.
    Entry (target, source) holds the rate source -> target over transient
    states; the leak vector holds each state's rate into absorption.
    """
    if spec.stages != 1:
        raise SpecError("the exact route requires stages == 1")
    sizes = group_sizes(spec, population)
    space = StateSpace.for_sizes(sizes, cap=cap)
    counts, inf_rates, rec_rates = _rates(spec, space)
    idx = np.arange(space.total, dtype=np.int64)
    k = spec.k

    rows, cols, vals = [], [], []
    leak = np.zeros(space.total - 1)
    for j in range(k):
        stride = int(space.strides[j])
        m = inf_rates[j] > 0.0
        rows.append(idx[m] + stride - 1)
        cols.append(idx[m] - 1)
        vals.append(inf_rates[j][m])
        m = rec_rates[j] > 0.0
        src = idx[m]
        tgt = src - stride
        into_absorbing = tgt == 0
        keep = ~into_absorbing
        rows.append(tgt[keep] - 1)
        cols.append(src[keep] - 1)
        vals.append(rec_rates[j][m][keep])
        leak[src[into_absorbing] - 1] += rec_rates[j][m][into_absorbing]

    exit_rate = inf_rates.sum(axis=0) + rec_rates.sum(axis=0)
    if np.any(exit_rate[1:] <= 0.0):
        raise RuntimeError("transient state without an outgoing transition")
    rows.append(idx[1:] - 1)
    cols.append(idx[1:] - 1)
    vals.append(-exit_rate[1:])

    qt = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.total - 1, space.total - 1),
    ).tocsr()
    return ExactSystem(
        spec=spec, space=space, qt=qt, leak=leak,
        exit_max=float(exit_rate[1:].max()),
    )


def quasi_stationary(
    spec: ModelSpec,
    population: int | None = None,
    tol_residual: float = 1e-10,
    tol_rate: float = 1e-12,
    check_every: int = 100,
    max_iters: int = 2_000_000,
    cap: int = STATE_CAP,
    cache: "QsdCache | None" = None,
    system: ExactSystem | None = None,
) -> QsdResult:
    """Quasi-stationary distribution and mean persistence time.

    Left power iteration on the uniformized matrix, with convergence declared
    once the eigen-equation residual max|q Q + q/tau| drops below
    tol_residual and the decay-rate estimate moves by less than tol_rate
    relative over a block of check_every iterations. Raises ConvergenceError
    (with the best iterate in .diagnostics) if max_iters is hit first.
    """
    key = None
    if cache is not None:
        key = spec_digest(
            spec, population=population if population is not None else spec.population,
            tol_residual=tol_residual, tol_rate=tol_rate,
        )
        hit = cache.get(key)
        if hit is not None:
            tau, residual, iterations, big = hit
            return QsdResult(
                tau=tau, residual_inf=residual, rate_change=0.0,
                iterations=iterations, big=big, q=None, space=None, spec=spec,
            )

    if system is None:
        system = build_generator(spec, population, cap=cap)
    qt, leak = system.qt, system.leak
    n = qt.shape[0]
    big = 1.01 * system.exit_max
    inv_big = 1.0 / big
    x = np.full(n, 1.0 / n)
    y = np.empty_like(x)

    rate_prev = np.inf
    residual_inf = np.inf
    rate_change = np.inf
    iterations = 0
    converged = False
    while iterations < max_iters:
        iterations += 1
        total, _leak_dot = kernels.power_step(qt, inv_big, leak, x, y)
        if iterations % check_every == 0:
            rate = float(np.dot(leak, x))
            res = big * (y - x) + rate * x
            residual_inf = float(np.max(np.abs(res)))
            rate_change = abs(rate - rate_prev) / rate if rate > 0 else np.inf
            rate_prev = rate
            if residual_inf < tol_residual and rate_change < tol_rate:
                converged = True
        x, y = y, x
        x /= total
        if converged:
            break

    rate = float(np.dot(leak, x))
    tau = 1.0 / rate
    if not converged:
        raise ConvergenceError(
            f"power iteration hit {max_iters} iterations "
            f"(residual {residual_inf:.3e}, rate change {rate_change:.3e})",
            diagnostics={
                "tau": tau, "residual_inf": residual_inf,
                "rate_change": rate_change, "iterations": iterations,
            },
        )
    result = QsdResult(
        tau=tau, residual_inf=residual_inf, rate_change=rate_change,
        iterations=iterations, big=big, q=x, space=system.space, spec=spec,
    )
    if cache is not None:
        cache.put(key, (tau, residual_inf, iterations, big))
    return result


def expected_absorption_times(system: ExactSystem) -> np.ndarray:
    """Mean absorption time from every transient state, by direct solve.

    Solves Q m = -1 with the fundamental-matrix identity. Intended as an
    independent cross-check on small systems; the sparse direct solve does
    not scale to the large state spaces the power iteration handles.
    """
    n = system.qt.shape[0]
    qc = system.qt.T.tocsc()
    return spsolve(qc, -np.ones(n))


def transient_probabilities(spec: ModelSpec, population: int | None,
                            initial_counts, t: float,
                            tail: float = 1e-14) -> tuple[np.ndarray, StateSpace]:
    """Distribution over all states at time t from a deterministic start.

    Uniformized series sum_n Poisson(big*t; n) * p0 P^n over the full chain,
    absorbing state included. Meant for small state spaces.
    """
    if spec.stages != 1:
        raise SpecError("the exact route requires stages == 1")
    sizes = group_sizes(spec, population)
    space = StateSpace.for_sizes(sizes)
    counts, inf_rates, rec_rates = _rates(spec, space)
    idx = np.arange(space.total, dtype=np.int64)
    rows, cols, vals = [], [], []
    for j in range(spec.k):
        stride = int(space.strides[j])
        m = inf_rates[j] > 0.0
        rows.append(idx[m] + stride)
        cols.append(idx[m])
        vals.append(inf_rates[j][m])
        m = rec_rates[j] > 0.0
        rows.append(idx[m] - stride)
        cols.append(idx[m])
        vals.append(rec_rates[j][m])
    exit_rate = inf_rates.sum(axis=0) + rec_rates.sum(axis=0)
    rows.append(idx)
    cols.append(idx)
    vals.append(-exit_rate)
    qt_full = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.total, space.total),
    ).tocsr()
    big = 1.01 * float(exit_rate.max()) + 1e-12
    pt = sp.identity(space.total, format="csr") + qt_full * (1.0 / big)

    v = np.zeros(space.total)
    v[space.encode(initial_counts)] = 1.0
    lam_t = big * t
    weight = np.exp(-lam_t)
    acc = weight * v
    cum = weight
    n_cap = int(lam_t + 40.0 * np.sqrt(lam_t + 1.0) + 50.0)
    for n in range(1, n_cap + 1):
        v = pt @ v
        weight *= lam_t / n
        acc += weight * v
        cum += weight
        if 1.0 - cum < tail:
            break
    return acc, space


def finite_size_action_estimate(tau1: float, n1: int, tau2: float, n2: int) -> float:
    """Two-point slope estimate of the extinction exponent.

    (ln(tau2 sqrt(n2)) - ln(tau1 sqrt(n1))) / (n2 - n1), which removes the
    1/sqrt(N) prefactor of tau ~ C exp(N A)/sqrt(N).
    """
    if n1 == n2:
        raise SpecError("the two population sizes must differ")
    return float(
        (np.log(tau2 * np.sqrt(n2)) - np.log(tau1 * np.sqrt(n1))) / (n2 - n1)
    )


def log_profile(result: QsdResult) -> tuple[np.ndarray, np.ndarray]:
    """Prevalence fractions and ln q for every transient state.

    Returns (fractions, ln_q) with fractions of shape (n_transient, k).
    """
    if result.q is None or result.space is None:
        raise SpecError("this result carries no distribution (cache hit?)")
    counts = result.space.counts_all()[:, 1:]
    n_total = float(result.space.sizes.sum())
    frac = counts.T.astype(float) / n_total
    return frac, np.log(result.q)


def profile_slope(result: QsdResult, depth: float = 8.0) -> float:
    """Leading-order exponent check: regress ln(q)/N against -V(x/N).

    V is the explicit potential for uniform infectivity, evaluated with the
    realized group fractions sizes/N so every state stays inside its domain.
    States within `depth` of the peak log-probability enter the regression;
    the fitted slope tends to one as N grows.
    """
    if result.q is None or result.spec is None:
        raise SpecError("this result carries no distribution (cache hit?)")
    spec = result.spec
    if not uniform_weights(spec.lam):
        raise SpecError("profile regression requires uniform infectivity")
    frac, ln_q = log_profile(result)
    n_total = float(result.space.sizes.sum())
    f_hat = result.space.sizes.astype(float) / n_total
    probe = replace(
        spec, groups=GroupStructure(f=f_hat, lam=spec.lam, mu=spec.mu),
        normalization=None,
    )
    window = ln_q >= ln_q.max() - depth
    v = np.array([state_potential(probe, y) for y in frac[window]])
    slope, _ = np.polyfit(-v, ln_q[window] / n_total, 1)
    return float(slope)


def dump_qsd_csv(result: QsdResult, path, header_lines=()) -> None:
    """Write per-state counts and q as CSV with optional comment header."""
    if result.q is None or result.space is None:
        raise SpecError("this result carries no distribution (cache hit?)")
    counts = result.space.counts_all()[:, 1:]
    k = counts.shape[0]
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(f"i{j + 1}" for j in range(k)) + ",q\n")
        for col in range(counts.shape[1]):
            cells = ",".join(str(int(counts[j, col])) for j in range(k))
            fh.write(f"{cells},{result.q[col]:.17g}\n")


class QsdCache:
    """Binary cache of (spec digest -> tau, residual, iterations, big)."""

    def __init__(self, path):
        self.path = path
        try:
            with open(path, "rb") as fh:
                self._data = pickle.load(fh)
        except (FileNotFoundError, EOFError):
            self._data = {}

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        self._data[key] = value
        with open(self.path, "wb") as fh:
            pickle.dump(self._data, fh)
