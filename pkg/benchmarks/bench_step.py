"""Compare the compiled and pure-Python step kernels.

Usage: python benchmarks/bench_step.py [--steps N] [--repeat R]

Each backend evolves the same random isometric machine; the resulting
states are checked to agree before timings are reported.
"""

import argparse
import time

import numpy as np

from qsm.builtins import builtin
from qsm.evolution import evolve
from qsm.kernels import available_backends
from qsm.machine import random_isometric_table


def _time(table, n, backend, repeat):
    best = float("inf")
    state = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        state = evolve(table, n, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, state


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    machines = [
        ("branching-printer", builtin("branching-printer"), 200),
        ("random-isometric", random_isometric_table(np.random.default_rng(args.seed), 3, 6), args.steps),
    ]
    backends = available_backends()
    print(f"backends: {', '.join(sorted(backends))}")
    for name, table, n in machines:
        results = {b: _time(table, n, b, args.repeat) for b in sorted(backends)}
        ref = results["python"][1]
        for b, (secs, state) in sorted(results.items()):
            diff = max((abs(state.terms.get(k, 0) - v) for k, v in ref.terms.items()), default=0.0)
            assert set(state.terms) == set(ref.terms) and diff <= 1e-12, f"{b} disagrees"
            print(f"{name:18s} n={n:4d} terms={len(state):6d} {b:7s} {secs * 1e3:9.2f} ms")
        if "cython" in results:
            print(f"{'':18s} speedup {results['python'][0] / results['cython'][0]:.1f}x")


if __name__ == "__main__":
    main()
