"""Time the compiled kernels against the numpy fallback on the engine hot path.

Usage: python3 benchmarks/bench_backends.py [--rounds N]
"""

import argparse
import time

import numpy as np

from rewbench import BoundingCube, CostSample, build_domain, build_tree, new_state
from rewbench import kernels


def time_backend(tree, samples, backend, seed=123):
    state = new_state(tree, backend=backend)
    rng = np.random.default_rng(seed)
    started = time.perf_counter()
    for sample in samples:
        state.select(rng)
        state.update(sample)
    elapsed = time.perf_counter() - started
    return elapsed / len(samples), state.totals


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=400)
    args = parser.parse_args()

    cases = [("n=1 m=8", 1, 8), ("n=2 m=5", 2, 5), ("n=2 m=6", 2, 6)]
    names = kernels.available()
    print(f"backends: {', '.join(names)}   rounds per case: {args.rounds}")
    print(f"{'case':10s} {'nodes':>7s} " + " ".join(f"{n:>14s}" for n in names) + "  speedup")

    for label, n, m in cases:
        cube = BoundingCube((0.0,) * n, 1.0)
        domain = build_domain(cube, m, lambda x: True, 3.0, seed=0)
        tree = build_tree(domain)
        rng = np.random.default_rng(7)
        samples = [
            CostSample(domain, rng.uniform(0.0, 1.0, domain.size) * domain.discrete_lipschitz)
            for _ in range(args.rounds)
        ]
        per_round = {}
        totals = {}
        for name in names:
            per_round[name], totals[name] = time_backend(tree, samples, name)
        cells = " ".join(f"{per_round[n] * 1e6:>11.1f} us" for n in names)
        if "compiled" in per_round and "python" in per_round:
            ratio = per_round["python"] / per_round["compiled"]
            drift = float(np.max(np.abs(totals["python"] - totals["compiled"])))
            extra = f"  {ratio:5.1f}x (max state drift {drift:.1e})"
        else:
            extra = ""
        print(f"{label:10s} {tree.node_count:>7d} {cells}{extra}")


if __name__ == "__main__":
    main()
