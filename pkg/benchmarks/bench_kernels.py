"""Compare the compiled kernel backend against the pure-python fallback.

Times three workloads on both backends: the staged (exponential-period) event
loop, the constant-period event loop, and the quasi-stationary power
iteration. Trajectory workloads advance fixed random streams to a fixed
horizon, so both backends execute the identical event sequence and the ratio
is a clean implementation comparison.

Usage: python3 benchmarks/bench_kernels.py [--n N] [--horizon T] [--reps R]
"""

import argparse
import time

import numpy as np

import sispersist._kernels as kernels
from sispersist.exact import quasi_stationary
from sispersist.model import (
    GroupStructure,
    ModelSpec,
    beta_for_r0,
    validate,
)
from sispersist.montecarlo import SimConfig, state_at


def bench_spec(stages=1):
    groups = GroupStructure(f=np.array([0.5, 0.5]),
                            lam=np.array([100 / 51, 2 / 51]),
                            mu=np.array([100 / 51, 2 / 51]))
    return validate(ModelSpec(groups=groups,
                              beta=beta_for_r0(groups, 1.5, 1.0),
                              gamma=1.0, stages=stages))


def time_backend(fn, use_compiled):
    if use_compiled and not kernels.HAVE_COMPILED:
        return None
    saved = kernels.USE_COMPILED
    kernels.USE_COMPILED = use_compiled and kernels.HAVE_COMPILED
    try:
        fn()  # warm-up, excluded from timing
        best = float("inf")
        for _ in range(3):
            start = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - start)
        return best
    finally:
        kernels.USE_COMPILED = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=400,
                        help="population for the trajectory workloads")
    parser.add_argument("--horizon", type=float, default=150.0,
                        help="simulated time per replicate")
    parser.add_argument("--reps", type=int, default=10,
                        help="replicates per trajectory workload")
    parser.add_argument("--qsd-n", type=int, default=150,
                        help="population for the power-iteration workload")
    args = parser.parse_args()

    spec = bench_spec()
    spec3 = bench_spec(stages=3)

    def run_sim(config):
        for rep in range(args.reps):
            state_at(config, args.horizon, rep)

    workloads = [
        ("event loop, exponential periods",
         lambda: run_sim(SimConfig(spec=spec, n=args.n, seed=5))),
        ("event loop, Erlang(3) periods",
         lambda: run_sim(SimConfig(spec=spec3, n=args.n, seed=5))),
        ("event loop, constant periods",
         lambda: run_sim(SimConfig(spec=spec, n=args.n, seed=5,
                                   period_kind="constant"))),
        ("power iteration (quasi-stationary)",
         lambda: quasi_stationary(spec, population=args.qsd_n)),
    ]

    print(f"backend available: compiled={kernels.HAVE_COMPILED}")
    print(f"trajectory workload: n={args.n}, horizon={args.horizon}, "
          f"reps={args.reps}; power iteration at n={args.qsd_n}")
    print()
    header = f"{'workload':<38} {'compiled':>10} {'pure':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn in workloads:
        tc = time_backend(fn, use_compiled=True)
        tp = time_backend(fn, use_compiled=False)
        c_txt = f"{tc:.4f}s" if tc is not None else "n/a"
        ratio = f"{tp / tc:8.1f}x" if tc else ""
        print(f"{name:<38} {c_txt:>10} {tp:>9.4f}s {ratio:>9}")


if __name__ == "__main__":
    main()
