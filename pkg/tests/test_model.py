import numpy as np
import pytest

from sispersist.errors import DegreeBalanceError, SpecError, SubcriticalError
from sispersist.model import (
    DegreeDistribution,
    GroupStructure,
    ModelSpec,
    beta_for_r0,
    from_degree_distribution,
    group_sizes,
    load_config,
    merge_equal_groups,
    r0,
    spec_as_dict,
    spec_digest,
    spec_from_mapping,
    validate,
)

from conftest import two_group


def test_validate_normalizes_weights():
    groups = GroupStructure(f=np.array([1.0, 3.0]), lam=np.array([2.0, 4.0]),
                            mu=np.array([1.0, 1.0]))
    spec = validate(ModelSpec(groups=groups, beta=2.0, gamma=1.0))
    assert np.isclose(spec.groups.f.sum(), 1.0)
    assert np.isclose(np.sum(spec.groups.f * spec.groups.lam), 1.0)
    assert np.isclose(np.sum(spec.groups.f * spec.groups.mu), 1.0)
    # normalization is recorded so beta keeps the same physical meaning
    assert spec.normalization is not None


def test_r0_formula(strong_spec):
    g = strong_spec.groups
    expect = strong_spec.beta / strong_spec.gamma * np.sum(g.f * g.lam * g.mu)
    assert r0(strong_spec) == pytest.approx(expect, abs=1e-15)
    assert r0(strong_spec) == pytest.approx(1.5, abs=1e-12)


def test_beta_for_r0_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = rng.dirichlet(np.ones(3))
        lam = rng.uniform(0.3, 2.0, 3)
        mu = rng.uniform(0.3, 2.0, 3)
        groups = GroupStructure(f=f, lam=lam, mu=mu)
        target = rng.uniform(0.5, 3.0)
        spec = validate(ModelSpec(groups=groups,
                                  beta=beta_for_r0(groups, target, 2.0),
                                  gamma=2.0))
        assert r0(spec) == pytest.approx(target, rel=1e-12)


def test_validation_rejects_bad_specs():
    with pytest.raises(SpecError):
        validate(ModelSpec(groups=GroupStructure(
            f=np.array([0.5, 0.5]), lam=np.array([1.0, -1.0]),
            mu=np.array([1.0, 1.0])), beta=1.0, gamma=1.0))
    with pytest.raises(SpecError):
        validate(ModelSpec(groups=GroupStructure(
            f=np.array([0.5]), lam=np.array([1.0, 1.0]),
            mu=np.array([1.0, 1.0])), beta=1.0, gamma=1.0))
    with pytest.raises(SpecError):
        validate(ModelSpec(groups=GroupStructure(
            f=np.array([0.5, 0.5]), lam=np.array([1.0, 1.0]),
            mu=np.array([1.0, 1.0])), beta=1.0, gamma=-1.0))
    with pytest.raises(SpecError):
        validate(ModelSpec(groups=GroupStructure(
            f=np.array([0.5, 0.5]), lam=np.array([1.0, 1.0]),
            mu=np.array([1.0, 1.0])), beta=1.0, gamma=1.0, stages=0))


def test_beta_zero_is_admitted():
    spec = two_group(lam=(1.0,), mu=(1.0,), beta=0.0, f=(1.0,))
    assert r0(spec) == 0.0


def test_degree_distribution_mapping():
    # out-degrees 1 and 3 equally likely, in-degree constant 2
    dist = DegreeDistribution(
        prob=np.array([0.5, 0.5]),
        d_in=np.array([2.0, 2.0]),
        d_out=np.array([1.0, 3.0]),
    )
    spec = from_degree_distribution(dist, kappa=1.0, gamma=1.0)
    assert spec.beta == pytest.approx(2.0)
    assert np.allclose(spec.groups.lam, [0.5, 1.5])
    assert np.allclose(spec.groups.mu, [1.0, 1.0])
    # R0 = kappa E[d_in d_out]/(gamma E[d]) for independent-ish two-point case
    assert r0(spec) == pytest.approx(1.0 * (0.5 * 2 + 1.5 * 2) / 2.0)


def test_degree_distribution_balance_enforced():
    dist = DegreeDistribution(
        prob=np.array([0.5, 0.5]),
        d_in=np.array([1.0, 2.0]),
        d_out=np.array([1.0, 3.0]),
    )
    with pytest.raises(DegreeBalanceError):
        from_degree_distribution(dist, kappa=1.0, gamma=1.0)


def test_group_sizes_sum_exactly():
    spec = two_group(lam=(5 / 3, 1 / 3), mu=(1.0, 1.0), target_r0=1.2,
                     f=(0.305, 0.695))
    for n in (7, 100, 331):
        sizes = group_sizes(spec, n)
        assert sizes.sum() == n
        assert np.all(sizes >= 0)
        assert np.max(np.abs(sizes - n * spec.groups.f)) <= 1.0


def test_merge_equal_groups():
    spec = two_group(lam=(1.2, 1.2, 0.6), mu=(1.0, 1.0, 1.0), beta=2.0,
                     f=(0.25, 0.25, 0.5))
    merged = merge_equal_groups(spec)
    assert merged.groups.k == 2
    assert np.isclose(merged.groups.f.sum(), 1.0)
    assert r0(merged) == pytest.approx(r0(spec), rel=1e-14)


def test_spec_from_mapping_errors():
    base = {"f": [0.5, 0.5], "lambda": [1.5, 0.5], "mu": [1.0, 1.0],
            "gamma": 1.0}
    with pytest.raises(SpecError):
        spec_from_mapping(dict(base))  # neither beta nor target_r0
    with pytest.raises(SpecError):
        spec_from_mapping(dict(base, beta=1.0, target_r0=1.5))
    with pytest.raises(SpecError):
        spec_from_mapping(dict(base, beta=1.0, k=3))
    spec = spec_from_mapping(dict(base, target_r0=1.5))
    assert r0(spec) == pytest.approx(1.5, rel=1e-12)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(
        'f = [0.5, 0.5]\n"lambda" = [1.6, 0.4]\nmu = [1.0, 1.0]\n'
        "gamma = 2.0\nbeta = 3.0\nstages = 2\n"
    )
    spec = load_config(path)
    assert spec.stages == 2
    assert spec.beta == 3.0
    d = spec_as_dict(spec)
    again = spec_from_mapping(d)
    assert spec_digest(again) == spec_digest(spec)


def test_spec_digest_distinguishes(strong_spec, mild_spec):
    assert spec_digest(strong_spec) != spec_digest(mild_spec)
    assert spec_digest(strong_spec) == spec_digest(strong_spec)
