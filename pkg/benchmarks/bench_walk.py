"""Time the compiled and pure-Python tree walkers on identical uniforms.

    python3 benchmarks/bench_walk.py --trials 200000 --m 3
"""
import argparse
import time

import numpy as np

from gbsm_teleport import engine, kernels
from gbsm_teleport.engine import AttemptPlan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--chi", type=float, default=0.6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    st = engine.structural_tree(args.chi, AttemptPlan(args.m))
    cond = st.conditional_probabilities(0.5)
    _, _, first = st.arrays()
    u = np.random.default_rng(0).random((args.trials, args.m + 1))

    timings, leaves = {}, {}
    for backend in kernels.available_backends():
        walk = kernels.get_walk(backend)
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            leaves[backend] = walk(cond, first, u)
            best = min(best, time.perf_counter() - t0)
        timings[backend] = best
        print(f"{backend:>9}: {best * 1e3:9.2f} ms  ({args.trials / best:,.0f} trials/s)")
    if len(leaves) == 2:
        same = np.array_equal(leaves["compiled"], leaves["python"])
        print(f"identical leaves: {same}; speed-up {timings['python'] / timings['compiled']:.1f}x")


if __name__ == "__main__":
    main()
