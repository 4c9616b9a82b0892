import numpy as np
import pytest

from sispersist.errors import SpecError
from sispersist.ordering import (
    convex_order_leq,
    majorizes,
    p_majorizes,
    spread_cap,
    spread_family,
)


def test_majorizes_orientation():
    # the predicate answers "is the first argument majorized by the second"
    assert majorizes((1.0, 1.0), (1.5, 0.5))
    assert not majorizes((1.5, 0.5), (1.0, 1.0))
    assert majorizes((1.0, 1.0), (1.0, 1.0))
    assert majorizes((1.5, 0.5), (2.0, 0.0))
    # incomparable pair (different sums)
    assert not majorizes((1.0, 1.0), (1.5, 1.5))
    assert not majorizes((1.5, 1.5), (1.0, 1.0))


def test_majorizes_is_permutation_invariant():
    assert majorizes((0.5, 1.5), (0.0, 2.0))
    assert majorizes((1.5, 0.5), (0.0, 2.0))
    assert majorizes((0.5, 1.5), (2.0, 0.0))


def test_p_majorizes_uniform_weights_agrees_with_plain():
    rng = np.random.default_rng(3)
    p = np.full(4, 0.25)
    hits = 0
    for _ in range(200):
        x = rng.uniform(0.0, 2.0, 4)
        y = rng.uniform(0.0, 2.0, 4)
        # force equal weighted sums so comparability is possible
        y = y - y.mean() + x.mean()
        a = majorizes(x, y)
        b = p_majorizes(x, y, p)
        assert a == b
        hits += a
    assert hits > 0


def test_p_majorizes_nonuniform():
    p = np.array([0.25, 0.75])
    x = np.array([1.0, 1.0])
    # same p-weighted mean, more spread
    y = np.array([1.75, 0.75])
    assert p_majorizes(x, y, p)
    assert not p_majorizes(y, x, p)


def test_p_majorizes_handles_ties():
    p = np.array([0.2, 0.3, 0.5])
    x = np.array([1.0, 1.0, 1.0])
    y = np.array([1.0, 2.0, 0.4])
    assert np.isclose(np.dot(p, x), np.dot(p, y))
    assert p_majorizes(x, y, p)


def test_convex_order():
    # two-point vs its mean: point mass is smaller in convex order
    assert convex_order_leq([1.0], [1.0], [0.0, 2.0], [0.5, 0.5])
    assert not convex_order_leq([0.0, 2.0], [0.5, 0.5], [1.0], [1.0])
    # equal distributions compare both ways
    assert convex_order_leq([0.0, 2.0], [0.5, 0.5], [2.0, 0.0], [0.5, 0.5])
    # different means are incomparable
    assert not convex_order_leq([1.0], [1.0], [0.0, 1.0], [0.5, 0.5])


def test_spread_family_construction():
    base = np.array([1.0, 1.0])
    w = np.array([0.5, 0.5])
    d = np.array([1.0, -1.0])
    fam = spread_family(base, w, d, [0.0, 0.5, 1.0])
    assert np.allclose(fam[0], [1.0, 1.0])
    assert np.allclose(fam[1], [1.5, 0.5])
    # the capped member is nudged just inside positivity
    assert fam[2][0] == pytest.approx(2.0, abs=1e-9)
    assert 0.0 < fam[2][1] < 1e-9
    # weighted mean preserved along the family
    for row in fam:
        assert np.dot(w, row) == pytest.approx(1.0, abs=1e-12)
    # members are totally ordered under p-majorization
    assert p_majorizes(fam[0], fam[1], w)
    assert p_majorizes(fam[1], fam[2], w)
    assert p_majorizes(fam[0], fam[2], w)
    assert not p_majorizes(fam[2], fam[0], w)


def test_spread_cap_and_overshoot():
    base = np.array([1.0, 1.0])
    w = np.array([0.5, 0.5])
    d = np.array([1.0, -1.0])
    assert spread_cap(base, d) == pytest.approx(1.0)
    with pytest.raises(SpecError):
        spread_family(base, w, d, [1.5])


def test_strong_weights_are_in_base_family():
    # lam = (100/51, 2/51) arises from base (1,1) at eps = 49/51
    base = np.array([1.0, 1.0])
    w = np.array([0.5, 0.5])
    d = np.array([1.0, -1.0])
    eps = 49 / 51
    fam = spread_family(base, w, d, [0.0, eps])
    assert np.allclose(fam[1], [100 / 51, 2 / 51], atol=1e-14)
    assert p_majorizes(fam[0], fam[1], w)


def test_transitive_on_families():
    rng = np.random.default_rng(9)
    w = rng.dirichlet(np.ones(3))
    base = np.ones(3)
    d = np.array([1.0 / (3 * w[0]), 0.0, -1.0 / (3 * w[2])])
    eps = np.linspace(0.0, 0.9 * spread_cap(base, d), 5)
    fam = spread_family(base, w, d, eps)
    for i in range(len(fam)):
        for j in range(len(fam)):
            got = p_majorizes(fam[i], fam[j], w)
            assert got == (i <= j)
