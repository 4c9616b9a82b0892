"""Group-structured SIS model specifications, validation, and network mapping.

A population of size N splits into k groups. Group i holds a fraction f_i of
the population, scales its infectiousness by lam_i and its susceptibility by
mu_i, and both weight vectors are normalized to weighted mean one so that beta
and gamma keep their usual interpretation as transmission and recovery rates.
"""

from __future__ import annotations

import hashlib
import json
import warnings

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegreeBalanceError, SpecError

__all__ = [
    "GroupStructure",
    "ModelSpec",
    "DegreeDistribution",
    "Normalization",
    "validate",
    "r0",
    "beta_for_r0",
    "from_degree_distribution",
    "merge_equal_groups",
    "group_sizes",
    "load_config",
    "spec_as_dict",
    "spec_digest",
]

_NORM_TOL = 1e-12


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GroupStructure:
    """Group fractions and per-group infectivity / susceptibility weights.

    Parameters
    ----------
    f : array_like
        Group fractions, expected to sum to one.
    lam : array_like
        Infectivity weights, expected to satisfy sum(lam * f) == 1.
    mu : array_like
        Susceptibility weights, expected to satisfy sum(mu * f) == 1.
    """

    f: np.ndarray
    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", _frozen_array(self.f))
        object.__setattr__(self, "lam", _frozen_array(self.lam))
        object.__setattr__(self, "mu", _frozen_array(self.mu))

    @property
    def k(self) -> int:
        return self.f.shape[0]


@dataclass(frozen=True)
class Normalization:
    """Scale factors divided out by validate(), recorded for provenance."""

    f_total: float
    infectivity_mean: float
    susceptibility_mean: float

    def is_trivial(self, tol: float = _NORM_TOL) -> bool:
        return (
            abs(self.f_total - 1.0) <= tol
            and abs(self.infectivity_mean - 1.0) <= tol
            and abs(self.susceptibility_mean - 1.0) <= tol
        )


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A complete model: group structure plus rates and optional finite size.

    population is the total N; None means only the asymptotic and
    potential-based routes are available. stages is the number of
    infectious-period stages (1 recovers the memoryless model).
    """

    groups: GroupStructure
    beta: float
    gamma: float
    stages: int = 1
    population: int | None = None
    normalization: Normalization | None = None

    @property
    def k(self) -> int:
        return self.groups.k

    @property
    def f(self) -> np.ndarray:
        return self.groups.f

    @property
    def lam(self) -> np.ndarray:
        return self.groups.lam

    @property
    def mu(self) -> np.ndarray:
        return self.groups.mu


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Joint in/out degree law of a directed configuration-model network.

    Rows of (d_in, d_out, prob); prob entries must be positive and are
    renormalized to sum to one.
    """

    d_in: np.ndarray
    d_out: np.ndarray
    prob: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d_in", _frozen_array(self.d_in))
        object.__setattr__(self, "d_out", _frozen_array(self.d_out))
        object.__setattr__(self, "prob", _frozen_array(self.prob))

    @classmethod
    def from_rows(cls, rows) -> "DegreeDistribution":
        arr = np.array(rows, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise SpecError("degree rows must be (d_in, d_out, prob) triples")
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    @property
    def mean_in(self) -> float:
        return float(np.sum(self.d_in * self.prob) / np.sum(self.prob))

    @property
    def mean_out(self) -> float:
        return float(np.sum(self.d_out * self.prob) / np.sum(self.prob))


def _check_finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise SpecError(f"{name} contains non-finite entries")


def validate(spec: ModelSpec, allow_zero_weights: bool = False) -> ModelSpec:
    """Check structural constraints and return a normalized copy.

    Fractions are divided by their total, weight vectors by their weighted
    mean, and the applied factors are recorded on the returned spec. Raises
    SpecError on shape mismatches, nonpositive entries, or bad rates.
    allow_zero_weights permits exact zeros in lam or mu; that is meant for
    degree-derived specs where isolated zero degrees are kept deliberately.
    """
    g = spec.groups
    if g.f.ndim != 1 or g.lam.shape != g.f.shape or g.mu.shape != g.f.shape:
        raise SpecError("f, lam, mu must be one-dimensional and equal length")
    if g.k < 1:
        raise SpecError("at least one group is required")
    for name, arr in (("f", g.f), ("lam", g.lam), ("mu", g.mu)):
        _check_finite(name, arr)
    if np.any(g.f <= 0):
        raise SpecError("group fractions must be strictly positive")
    weight_floor = 0.0 if allow_zero_weights else None
    for name, arr in (("lam", g.lam), ("mu", g.mu)):
        if weight_floor is None:
            if np.any(arr <= 0):
                raise SpecError(f"{name} must be strictly positive")
        elif np.any(arr < weight_floor):
            raise SpecError(f"{name} must be nonnegative")
    if not np.isfinite(spec.beta) or spec.beta < 0:
        raise SpecError("beta must be a finite nonnegative rate")
    if not np.isfinite(spec.gamma) or spec.gamma <= 0:
        raise SpecError("gamma must be a finite positive rate")
    if int(spec.stages) != spec.stages or spec.stages < 1:
        raise SpecError("stages must be a positive integer")
    if spec.population is not None:
        if int(spec.population) != spec.population or spec.population < 1:
            raise SpecError("population must be a positive integer")

    f_total = float(np.sum(g.f))
    f = g.f / f_total
    lam_mean = float(np.sum(g.lam * f))
    mu_mean = float(np.sum(g.mu * f))
    if lam_mean <= 0 or mu_mean <= 0:
        raise SpecError("weighted means of lam and mu must be positive")
    norm = Normalization(f_total, lam_mean, mu_mean)
    groups = GroupStructure(f, g.lam / lam_mean, g.mu / mu_mean)
    return replace(
        spec,
        groups=groups,
        stages=int(spec.stages),
        population=None if spec.population is None else int(spec.population),
        normalization=norm,
    )


def r0(spec: ModelSpec) -> float:
    """Basic reproduction number (beta/gamma) * sum_i lam_i mu_i f_i.

    This is the dominant eigenvalue of the next-generation matrix, which is
    rank one for separable transmission.
    """
    g = spec.groups
    return float(spec.beta / spec.gamma * np.sum(g.lam * g.mu * g.f))


def beta_for_r0(groups: GroupStructure, target_r0: float, gamma: float) -> float:
    """Transmission rate giving the requested reproduction number."""
    if target_r0 <= 0:
        raise SpecError("target_r0 must be positive")
    probe = validate(ModelSpec(groups=groups, beta=1.0, gamma=gamma))
    g = probe.groups
    overlap = float(np.sum(g.lam * g.mu * g.f))
    return target_r0 * gamma / overlap


def from_degree_distribution(
    dist: DegreeDistribution,
    kappa: float,
    gamma: float,
    stages: int = 1,
    population: int | None = None,
) -> ModelSpec:
    """Map a directed degree law to a group spec, one group per support point.

    beta = kappa * E[d_out], lam_j = d_out(j)/E[d_out], mu_j = d_in(j)/E[d_in],
    f_j = prob(j), with expectations over participating individuals. Support
    points with both degrees zero never take part in the epidemic and are
    dropped (with a warning); points with exactly one zero degree are kept
    with their exact zero weight and flagged. Requires E[d_in] == E[d_out],
    as realizable directed networks must balance stub counts.
    """
    if kappa <= 0 or not np.isfinite(kappa):
        raise SpecError("kappa must be a finite positive rate")
    for name, arr in (("d_in", dist.d_in), ("d_out", dist.d_out), ("prob", dist.prob)):
        _check_finite(name, arr)
    if np.any(dist.prob <= 0):
        raise SpecError("degree probabilities must be strictly positive")
    if np.any(dist.d_in < 0) or np.any(dist.d_out < 0):
        raise SpecError("degrees must be nonnegative")

    prob = dist.prob / np.sum(dist.prob)
    keep = ~((dist.d_in == 0) & (dist.d_out == 0))
    if not np.any(keep):
        raise SpecError("every support point is fully isolated")
    if not np.all(keep):
        dropped = float(np.sum(prob[~keep]))
        warnings.warn(
            f"dropping isolated support points carrying probability {dropped:.6g}",
            stacklevel=2,
        )
    d_in = dist.d_in[keep]
    d_out = dist.d_out[keep]
    prob = prob[keep]
    prob = prob / np.sum(prob)

    mean_in = float(np.sum(d_in * prob))
    mean_out = float(np.sum(d_out * prob))
    if not np.isclose(mean_in, mean_out, rtol=1e-9, atol=0.0):
        raise DegreeBalanceError(
            f"mean in-degree {mean_in:.12g} != mean out-degree {mean_out:.12g}"
        )
    one_sided = (d_in == 0) | (d_out == 0)
    if np.any(one_sided):
        flagged = float(np.sum(prob[one_sided]))
        warnings.warn(
            "keeping support points with one zero degree "
            f"(probability {flagged:.6g}); their weight is exactly zero",
            stacklevel=2,
        )

    groups = GroupStructure(f=prob, lam=d_out / mean_out, mu=d_in / mean_in)
    spec = ModelSpec(
        groups=groups,
        beta=kappa * mean_out,
        gamma=gamma,
        stages=stages,
        population=population,
    )
    return validate(spec, allow_zero_weights=True)


def merge_equal_groups(spec: ModelSpec, tol: float = 1e-12) -> ModelSpec:
    """Combine groups whose (lam, mu) pairs agree within tol, summing f."""
    g = spec.groups
    reps: list[int] = []
    fs: list[float] = []
    for i in range(g.k):
        for slot, j in enumerate(reps):
            if abs(g.lam[i] - g.lam[j]) <= tol and abs(g.mu[i] - g.mu[j]) <= tol:
                fs[slot] += float(g.f[i])
                break
        else:
            reps.append(i)
            fs.append(float(g.f[i]))
    idx = np.array(reps)
    merged = GroupStructure(f=np.array(fs), lam=g.lam[idx], mu=g.mu[idx])
    return validate(replace(spec, groups=merged, normalization=None))


def group_sizes(spec: ModelSpec, population: int | None = None) -> np.ndarray:
    """Integer group sizes N_j = round(N * f_j), adjusted to sum exactly to N.

    When plain rounding does not conserve the total, the entries with the
    largest rounding deficit (or overshoot) absorb the difference.
    """
    n = spec.population if population is None else population
    if n is None:
        raise SpecError("population is not set on this spec")
    target = n * spec.groups.f
    sizes = np.rint(target).astype(np.int64)
    diff = int(n - sizes.sum())
    if diff != 0:
        frac = target - sizes
        order = np.argsort(-frac if diff > 0 else frac)
        step = 1 if diff > 0 else -1
        for j in order[: abs(diff)]:
            sizes[j] += step
    if np.any(sizes < 0):
        raise SpecError("population too small for the requested fractions")
    return sizes


def spec_as_dict(spec: ModelSpec) -> dict:
    """Plain-python summary of a spec, used in CSV provenance headers."""
    d = {
        "k": spec.k,
        "f": [float(x) for x in spec.f],
        "lambda": [float(x) for x in spec.lam],
        "mu": [float(x) for x in spec.mu],
        "beta": float(spec.beta),
        "gamma": float(spec.gamma),
        "stages": int(spec.stages),
    }
    if spec.population is not None:
        d["population"] = int(spec.population)
    return d


def spec_digest(spec: ModelSpec, **extra) -> str:
    """Stable hex digest of a spec plus any extra keyword context."""
    payload = {
        "f": [float(x).hex() for x in spec.f],
        "lambda": [float(x).hex() for x in spec.lam],
        "mu": [float(x).hex() for x in spec.mu],
        "beta": float(spec.beta).hex(),
        "gamma": float(spec.gamma).hex(),
        "stages": int(spec.stages),
        "population": spec.population,
    }
    for key in sorted(extra):
        value = extra[key]
        payload[key] = float(value).hex() if isinstance(value, float) else value
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise SpecError(f"config is missing required key '{key}'")
    return cfg[key]


def spec_from_mapping(cfg: dict) -> ModelSpec:
    """Build a validated spec from a parsed config mapping.

    Two shapes are accepted. Group form: f, lambda, mu, gamma, and exactly one
    of beta or target_r0, plus optional stages and population. Degree form:
    support rows of (d_in, d_out, prob) with kappa and gamma.
    """
    if "support" in cfg:
        dist = DegreeDistribution.from_rows(_require(cfg, "support"))
        return from_degree_distribution(
            dist,
            kappa=float(_require(cfg, "kappa")),
            gamma=float(_require(cfg, "gamma")),
            stages=int(cfg.get("stages", 1)),
            population=cfg.get("population"),
        )
    groups = GroupStructure(
        f=_require(cfg, "f"), lam=_require(cfg, "lambda"), mu=_require(cfg, "mu")
    )
    if "k" in cfg and int(cfg["k"]) != groups.k:
        raise SpecError(f"config says k={cfg['k']} but vectors have length {groups.k}")
    gamma = float(_require(cfg, "gamma"))
    has_beta = "beta" in cfg
    has_target = "target_r0" in cfg
    if has_beta == has_target:
        raise SpecError("config must set exactly one of beta or target_r0")
    beta = float(cfg["beta"]) if has_beta else beta_for_r0(groups, float(cfg["target_r0"]), gamma)
    spec = ModelSpec(
        groups=groups,
        beta=beta,
        gamma=gamma,
        stages=int(cfg.get("stages", 1)),
        population=cfg.get("population"),
    )
    return validate(spec)


def load_config(path) -> ModelSpec:
    """Read a TOML model config and return a validated spec."""
    with open(path, "rb") as fh:
        cfg = tomllib.load(fh)
    return spec_from_mapping(cfg)
