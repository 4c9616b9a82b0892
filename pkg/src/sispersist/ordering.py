"""Heterogeneity orderings: majorization, weighted majorization, convex order.

These are the comparisons under which the extinction exponent is monotone:
spreading out infectivity or susceptibility weights (at fixed weighted mean)
can only shorten persistence. The orderings here are the hypotheses of those
monotonicity statements.
"""

from __future__ import annotations

import numpy as np

from .errors import SpecError

__all__ = [
    "majorizes",
    "p_majorizes",
    "convex_order_leq",
    "spread_family",
    "spread_cap",
]


def majorizes(x, y, tol: float = 1e-12) -> bool:
    """True when x is majorized by y: y spreads x at equal total.

    Both vectors are sorted in decreasing order; totals must agree within
    tol and every prefix sum of y must dominate the matching prefix of x.
    A mean-preserving spread therefore sits on the right: majorizes((1, 1),
    (1.5, 0.5)) is true.
    """
    x = np.sort(np.asarray(x, dtype=float))[::-1]
    y = np.sort(np.asarray(y, dtype=float))[::-1]
    if x.shape != y.shape:
        raise SpecError("majorization compares equal-length vectors")
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    cx = np.cumsum(x)
    cy = np.cumsum(y)
    if abs(cx[-1] - cy[-1]) > tol * scale:
        return False
    return bool(np.all(cy[:-1] >= cx[:-1] - tol * scale))


def _common_descending_order(x, y, tol):
    """Permutation sorting both x and y in decreasing order, or None.

    Sorting x decreasingly with ties broken by decreasing y is the canonical
    candidate: if any tie-compatible common order exists, this one works.
    """
    order = np.lexsort((-y, -x))
    xs = x[order]
    ys = y[order]
    if np.any(xs[:-1] < xs[1:] - tol) or np.any(ys[:-1] < ys[1:] - tol):
        return None
    return order


def p_majorizes(x, y, p, tol: float = 1e-12) -> bool:
    """True when x is weighted-majorized by y under index weights p.

    Requires a permutation placing both vectors in decreasing order, equal
    weighted totals sum p_i x_i = sum p_i y_i, and dominance of y's weighted
    prefix sums over x's along that common order. y is the more spread
    vector. Indices sharing a weight are exchangeable, so their x and y
    entries are re-paired sorted-to-sorted first; in any arrangement where
    both vectors decrease, equal-weight entries end up paired that way, and
    with uniform weights the relation reduces to plain majorization.
    """
    x = np.asarray(x, dtype=float).copy()
    y = np.asarray(y, dtype=float).copy()
    p = np.asarray(p, dtype=float)
    if x.shape != y.shape or x.shape != p.shape:
        raise SpecError("weighted majorization needs equal-length x, y, p")
    if np.any(p <= 0):
        raise SpecError("weights must be strictly positive")
    for w in np.unique(p):
        idx = np.flatnonzero(p == w)
        if idx.size > 1:
            x[idx] = np.sort(x[idx])[::-1]
            y[idx] = np.sort(y[idx])[::-1]
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    order = _common_descending_order(x, y, tol * scale)
    if order is None:
        order = _common_descending_order(y, x, tol * scale)
    if order is None:
        return False
    wx = np.cumsum(p[order] * x[order])
    wy = np.cumsum(p[order] * y[order])
    if abs(wx[-1] - wy[-1]) > tol * scale:
        return False
    return bool(np.all(wy[:-1] >= wx[:-1] - tol * scale))


def _accumulated_cdf(support, prob, grid):
    support = np.asarray(support, dtype=float)
    prob = np.asarray(prob, dtype=float)
    if np.any(prob < 0):
        raise SpecError("probabilities must be nonnegative")
    total = float(np.sum(prob))
    if abs(total - 1.0) > 1e-9:
        raise SpecError("probabilities must sum to one")
    if np.any(np.abs(support - np.rint(support)) > 1e-9):
        raise SpecError("convex order comparison expects integer support")
    cdf = np.array([float(np.sum(prob[support <= g + 1e-9])) for g in grid])
    return np.cumsum(cdf)


def convex_order_leq(support1, prob1, support2, prob2, tol: float = 1e-12) -> bool:
    """True when law 1 precedes law 2 in the convex order.

    Both laws live on nonnegative integers. The test is equality of means
    together with sum_{i<=j} P(X1 <= i) <= sum_{i<=j} P(X2 <= i) for every j,
    which is the accumulated-CDF characterization for equal-mean laws.
    """
    support1 = np.asarray(support1, dtype=float)
    support2 = np.asarray(support2, dtype=float)
    prob1 = np.asarray(prob1, dtype=float)
    prob2 = np.asarray(prob2, dtype=float)
    m1 = float(np.sum(support1 * prob1))
    m2 = float(np.sum(support2 * prob2))
    scale = max(1.0, abs(m1), abs(m2))
    if abs(m1 - m2) > tol * scale:
        return False
    top = int(max(np.max(support1), np.max(support2)))
    grid = np.arange(top + 1)
    acc1 = _accumulated_cdf(support1, prob1, grid)
    acc2 = _accumulated_cdf(support2, prob2, grid)
    return bool(np.all(acc1 <= acc2 + tol))


def spread_cap(base, direction) -> float:
    """Largest epsilon keeping base + epsilon * direction nonnegative."""
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    neg = direction < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(base[neg] / -direction[neg]))


def spread_family(base, weights, direction, epsilons, floor_scale: float = 1e-12):
    """Family base + epsilon * direction of increasingly spread weight vectors.

    The direction must preserve the weighted mean (sum weights*direction = 0)
    and be similarly ordered with base, so that larger epsilon gives a vector
    that weighted-majorizes every earlier one. Epsilons beyond the positivity
    cap raise; an epsilon exactly at the cap is nudged so the vanishing
    entries stay strictly positive.

    Returns an array of shape (len(epsilons), k).
    """
    base = np.asarray(base, dtype=float)
    weights = np.asarray(weights, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if base.shape != weights.shape or base.shape != direction.shape:
        raise SpecError("base, weights, direction must share a shape")
    if np.any(base <= 0):
        raise SpecError("base weights must be strictly positive")
    drift = float(np.sum(weights * direction))
    if abs(drift) > 1e-12 * max(1.0, float(np.sum(np.abs(weights * direction)))):
        raise SpecError("direction changes the weighted mean")
    diff_b = base[:, None] - base[None, :]
    diff_c = direction[:, None] - direction[None, :]
    if np.any(diff_b * diff_c < -1e-12):
        raise SpecError("direction must be similarly ordered with base")
    cap = spread_cap(base, direction)
    floor = floor_scale * float(np.max(base))
    out = []
    for eps in np.atleast_1d(np.asarray(epsilons, dtype=float)):
        if eps < 0:
            raise SpecError("epsilon must be nonnegative")
        if eps > cap:
            raise SpecError(f"epsilon {eps:.6g} exceeds the positivity cap {cap:.6g}")
        vec = base + eps * direction
        vec = np.maximum(vec, floor)
        out.append(vec)
    return np.array(out)
