"""Time the hot kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter because the choice is fixed at
import time. Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time


def _cases():
    import numpy as np

    from netweight.graph import complete_graph, star_plus_matching
    from netweight.solver import FptasConfig, Topology, brute_force_optimum, project, run_fptas, solve_inner
    from netweight.weights import BoundParams

    params = BoundParams(0.25, math.exp(-1))
    cfg = FptasConfig(0.1)
    cases = {}
    for m in (20, 100):
        g = star_plus_matching(m)
        topo = Topology(g)
        y = np.random.default_rng(0).normal(size=g.m)
        cases[f"project/star+matching m={m}"] = lambda g=g, y=y, topo=topo: project(g, y, 0.3, topo)
        cases[f"inner/star+matching m={m}"] = lambda g=g, topo=topo: solve_inner(g, 0.3, params, cfg, topo=topo)
    k6 = complete_graph(6)
    cases["fptas/K6"] = lambda: run_fptas(k6, params, cfg, threads=1)
    k4 = complete_graph(4)
    cases["oracle/K4 res=0.05"] = lambda: brute_force_optimum(k4, params, 0.05)
    return cases


def _worker(repeat):
    from netweight import BACKEND

    out = {"backend": BACKEND, "times": {}}
    for name, fn in _cases().items():
        fn()  # warm-up, includes compilation
        best = math.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["times"][name] = best
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        _worker(args.repeat)
        return
    results = {}
    for flag in ("0", "1"):
        env = dict(os.environ, NETWEIGHT_DISABLE_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        doc = json.loads(proc.stdout.strip().splitlines()[-1])
        results[doc["backend"]] = doc["times"]
    names = list(next(iter(results.values())))
    print(f"{'kernel':32s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for name in names:
        a = results.get("numba", {}).get(name, math.nan) * 1e3
        b = results.get("numpy", {}).get(name, math.nan) * 1e3
        print(f"{name:32s} {a:12.3f} {b:12.3f} {b / a:8.1f}")


if __name__ == "__main__":
    main()
