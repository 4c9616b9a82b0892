import numpy as np
import pytest
import scipy.linalg
import scipy.sparse

from sispersist.errors import SpecError, StateSpaceError
from sispersist.exact import (
    QsdCache,
    build_generator,
    dump_qsd_csv,
    expected_absorption_times,
    finite_size_action_estimate,
    log_profile,
    quasi_stationary,
    transient_probabilities,
)
from sispersist.model import group_sizes
from sispersist.montecarlo import initial_counts, swapped_spec

from conftest import random_spec, two_group


def test_two_state_oracle(single_group_spec):
    # k=1, N=2: the decay rate of the conditioned chain is known in closed
    # form from the 2x2 transient block, and tau = 2 exactly at beta=3
    res = quasi_stationary(single_group_spec, population=2)
    assert res.tau == pytest.approx(2.0, abs=1e-10)
    assert res.residual_inf < 1e-10


def test_two_state_oracle_general_beta():
    # transient block [[-(g+b/2), b/2], [2g, -2g]]: tau = -1/lambda_max
    for beta, gamma in ((3.0, 1.0), (1.7, 0.6), (0.4, 1.0)):
        spec = two_group(lam=(1.0,), mu=(1.0,), beta=beta, f=(1.0,),
                         gamma=gamma)
        b2 = beta / 2.0
        m = np.array([[-(gamma + b2), b2], [2 * gamma, -2 * gamma]])
        lam_max = np.max(np.linalg.eigvals(m).real)
        res = quasi_stationary(spec, population=2)
        assert res.tau == pytest.approx(-1.0 / lam_max, rel=1e-10)


def test_rate_scaling():
    # scaling both rates by c scales time by 1/c
    spec1 = two_group(lam=(1.4, 0.6), mu=(1.0, 1.0), beta=2.0, gamma=1.0)
    spec2 = two_group(lam=(1.4, 0.6), mu=(1.0, 1.0), beta=6.0, gamma=3.0)
    t1 = quasi_stationary(spec1, population=30).tau
    t2 = quasi_stationary(spec2, population=30).tau
    assert t2 == pytest.approx(t1 / 3.0, rel=1e-9)


def test_fundamental_matrix_agreement():
    rng = np.random.default_rng(17)
    for _ in range(4):
        spec = random_spec(rng, r0_range=(1.1, 1.8))
        system = build_generator(spec, 24)
        res = quasi_stationary(spec, population=24, system=system)
        times = expected_absorption_times(system)
        mean_time = float(np.dot(res.q, times))
        assert mean_time == pytest.approx(res.tau, rel=1e-8)


def test_duality_small():
    rng = np.random.default_rng(29)
    for _ in range(5):
        spec = random_spec(rng, side="lambda", r0_range=(1.05, 1.9))
        n = int(rng.integers(20, 61))
        t1 = quasi_stationary(spec, population=n).tau
        t2 = quasi_stationary(swapped_spec(spec), population=n).tau
        assert t2 == pytest.approx(t1, rel=1e-9)


def test_qsd_is_normalized_and_positive(mild_spec):
    res = quasi_stationary(mild_spec, population=40)
    assert res.q.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(res.q > 0)


def _dense_full_generator(system):
    # forward generator over the full chain, absorbing state at index 0
    total = system.space.total
    m = np.zeros((total, total))
    qt = system.qt.toarray()
    m[1:, 1:] = qt.T
    m[1:, 0] = system.leak
    np.fill_diagonal(m, 0.0)
    m[np.arange(total), np.arange(total)] = -m.sum(axis=1)
    return m


def test_transient_probabilities_against_dense_expm(mild_spec):
    # full-chain comparison on a tiny population, including the absorbing state
    n = 4
    system = build_generator(mild_spec, n)
    start = np.maximum(group_sizes(mild_spec, n) // 2, 1)
    gen = _dense_full_generator(system)
    row = system.space.encode(start)
    for t in (0.3, 2.0):
        probs, space = transient_probabilities(mild_spec, n, start, t)
        expect = scipy.linalg.expm(gen.T * t)[:, row]
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(probs - expect)) < 1e-10
        assert space.total == probs.shape[0]


def test_finite_size_action_estimate_linear():
    # ln(tau sqrt(N)) exactly linear in N: estimate recovers the slope
    a = 0.0123
    tau = lambda n: np.exp(a * n) / np.sqrt(n)
    got = finite_size_action_estimate(tau(200), 200, tau(300), 300)
    assert got == pytest.approx(a, rel=1e-12)


def test_log_profile_and_dump(tmp_path, mild_spec):
    res = quasi_stationary(mild_spec, population=30)
    states, logq = log_profile(res)
    assert states.shape[0] == logq.shape[0]
    assert np.all(np.isfinite(logq))
    out = tmp_path / "qsd.csv"
    dump_qsd_csv(res, out, header_lines=("thirty hosts",))
    text = out.read_text().splitlines()
    assert text[0] == "# thirty hosts"
    assert text[1] == "i1,i2,q"
    assert len(text) == 2 + res.q.shape[0]


def test_cache_reuse(tmp_path, mild_spec):
    cache = QsdCache(tmp_path / "qsd.pkl")
    r1 = quasi_stationary(mild_spec, population=25, cache=cache)
    # second call comes back from the cache file, distribution dropped
    again = QsdCache(tmp_path / "qsd.pkl")
    r2 = quasi_stationary(mild_spec, population=25, cache=again)
    assert r2.tau == r1.tau
    assert r2.iterations == r1.iterations
    assert r2.q is None


def test_population_required(mild_spec):
    with pytest.raises(SpecError):
        quasi_stationary(mild_spec)


def test_state_space_cap(mild_spec):
    with pytest.raises(StateSpaceError):
        quasi_stationary(mild_spec, population=100000)


def test_staged_generator_rejected(mild_spec):
    staged = two_group(lam=(5 / 3, 1 / 3), mu=(1.0, 1.0), target_r0=1.2,
                       stages=3)
    with pytest.raises(SpecError):
        quasi_stationary(staged, population=20)
