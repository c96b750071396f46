"""Benchmark the numba kernels against the pure-numpy fallback.

Times full backward-induction solves on two representative workloads: a
dense single-cop ball net and a two-cop cycle net.  Run:

    python benchmarks/bench_backends.py [--repeats 3]
"""

import argparse
import math
import time

from pursuit import _kernels
from pursuit.game import Agility
from pursuit.solver import limit_value
from pursuit.spaces import BallSpace, MetricGraphSpace, build_net


def make_cycle(total_length):
    half = total_length / 2.0
    return MetricGraphSpace(["u", "v"], [("u", "v", half), ("u", "v", half)])


def workloads():
    ball = build_net(BallSpace(2, 1.0), 0.08)
    cyc = build_net(make_cycle(2 * math.pi), 2 * math.pi / 48)
    return [
        ("ball k=1", ball, 1, Agility.uniform(0.2), 64),
        ("cycle k=2", cyc, 2, Agility.uniform(math.pi / 12), 64),
    ]


def time_solve(net, k, tau, n_max, repeats):
    best = math.inf
    for _ in range(repeats):
        net._reach_cache.clear()
        t0 = time.perf_counter()
        limit_value(net, k, tau, 1e-9, n_max)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = ["numpy"]
    if _kernels.HAS_NUMBA:
        backends.insert(0, "numba")
    else:
        print("numba not installed; timing the numpy path only")

    cases = workloads()
    results = {}
    for backend in backends:
        _kernels.set_backend(backend)
        for name, net, k, tau, n_max in cases:
            if backend == "numba":  # compile outside the timed region
                limit_value(net, k, tau, 1e-9, 2)
            results[(backend, name)] = time_solve(net, k, tau, n_max, args.repeats)

    print(f"{'workload':<12} {'states':>9} " + " ".join(f"{b:>10}" for b in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for name, net, k, tau, n_max in cases:
        row = f"{name:<12} {net.size ** (k + 1):>9d} "
        times = [results[(b, name)] for b in backends]
        row += " ".join(f"{t * 1000:9.1f}ms" for t in times)
        if len(times) == 2 and times[0] > 0:
            row += f"   {times[1] / times[0]:7.2f}x"
        print(row)


if __name__ == "__main__":
    main()
