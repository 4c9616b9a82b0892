"""Kernel backend selection.

The compiled extension is preferred when importable; setting the environment
variable SISPERSIST_PURE=1 forces the pure fallback. Both backends share the
wrapper signatures below: simulation kernels take a numpy Generator and the
power step takes a scipy CSR matrix.
"""

from __future__ import annotations

import os

from . import pure

try:
    from . import _speedups
except ImportError:  # extension not built; fall back
    _speedups = None

_force_pure = os.environ.get("SISPERSIST_PURE", "") not in ("", "0")
HAVE_COMPILED = _speedups is not None
USE_COMPILED = HAVE_COMPILED and not _force_pure
def backend_name() -> str:
    """Which kernel implementation is active: "compiled" or "pure"."""
    return "compiled" if USE_COMPILED else "pure"

__all__ = [
    "HAVE_COMPILED",
    "USE_COMPILED",
    "backend_name",
    "advance_staged",
    "advance_constant",
    "power_step",
    "pure",
    "_speedups",
]


def advance_staged(generator, beta, gamma, stages, lam, mu, sizes, n_total,
                   state, group_counts, t, t_limit):
    if USE_COMPILED:
        return _speedups.advance_staged(
            generator.bit_generator, beta, gamma, stages, lam, mu, sizes,
            n_total, state, group_counts, t, t_limit,
        )
    return pure.advance_staged(
        generator, beta, gamma, stages, lam, mu, sizes, n_total,
        state, group_counts, t, t_limit,
    )


def advance_constant(generator, beta, gamma, lam, mu, sizes, n_total, infected,
                     queue_times, queue_groups, head, count, t, t_limit):
    if USE_COMPILED:
        return _speedups.advance_constant(
            generator.bit_generator, beta, gamma, lam, mu, sizes, n_total,
            infected, queue_times, queue_groups, head, count, t, t_limit,
        )
    return pure.advance_constant(
        generator, beta, gamma, lam, mu, sizes, n_total, infected,
        queue_times, queue_groups, head, count, t, t_limit,
    )


def power_step(mat, inv_big, leak, x, out):
    if USE_COMPILED:
        return _speedups.power_step(
            mat.indptr, mat.indices, mat.data, inv_big, leak, x, out
        )
    return pure.power_step(mat, inv_big, leak, x, out)
