import numpy as np
import pytest

from sispersist.model import GroupStructure, ModelSpec, beta_for_r0, validate


def two_group(lam, mu, beta=None, target_r0=None, gamma=1.0, f=(0.5, 0.5),
              stages=1, population=None):
    groups = GroupStructure(f=np.asarray(f, dtype=float),
                            lam=np.asarray(lam, dtype=float),
                            mu=np.asarray(mu, dtype=float))
    if beta is None:
        beta = beta_for_r0(groups, target_r0, gamma)
    return validate(ModelSpec(groups=groups, beta=beta, gamma=gamma,
                              stages=stages, population=population))


@pytest.fixture
def strong_spec():
    # two-group infectivity heterogeneity, R0 = 1.5
    return two_group(lam=(100 / 51, 2 / 51), mu=(1.0, 1.0), beta=1.5)


@pytest.fixture
def mild_spec():
    # two-group infectivity heterogeneity, R0 = 1.2
    return two_group(lam=(5 / 3, 1 / 3), mu=(1.0, 1.0), target_r0=1.2)


@pytest.fixture
def mild_susceptibility_spec():
    return two_group(lam=(1.0, 1.0), mu=(5 / 3, 1 / 3), target_r0=1.2)


@pytest.fixture
def single_group_spec():
    return two_group(lam=(1.0,), mu=(1.0,), beta=3.0, f=(1.0,))


def random_spec(rng, k=2, r0_range=(1.1, 2.0), side="lambda", stages=1):
    """Random normalized supercritical spec with heterogeneity on one side."""
    f = rng.dirichlet(np.ones(k) * 5.0)
    w = rng.uniform(0.2, 1.8, size=k)
    w = w / np.sum(f * w)
    ones = np.ones(k)
    lam, mu = (w, ones) if side == "lambda" else (ones, w)
    groups = GroupStructure(f=f, lam=lam, mu=mu)
    target = rng.uniform(*r0_range)
    beta = beta_for_r0(groups, target, 1.0)
    return validate(ModelSpec(groups=groups, beta=beta, gamma=1.0, stages=stages))
