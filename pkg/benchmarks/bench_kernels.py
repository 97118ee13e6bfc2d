"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from sramf import _pykernels
from sramf.generator import GenConfig, gen_instance
from sramf.mmo import DualState, mmo_insert
from sramf.model import TravelModel
from sramf.sharegraph import build_graph

try:
    from sramf import _kernels
except ImportError:
    _kernels = None


def route_cases(k, count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        pts = [tuple(map(float, rng.integers(0, 8, 2))) for _ in range(2 * k + 1)]
        out.append((np.ascontiguousarray(TravelModel().matrix(pts)), rng.uniform(10, 30, k), rng.uniform(10, 30, k)))
    return out


def time_routes(kern, cases, k):
    t0 = time.perf_counter()
    results = [kern.route_search(T, w, r, k) for T, w, r in cases]
    return time.perf_counter() - t0, results


def time_mmo(kern, graph, n_vehicles):
    st = DualState.fresh(graph)
    t0 = time.perf_counter()
    for i in range(n_vehicles):
        mmo_insert(st, i, kernels=kern)
    return time.perf_counter() - t0, st.u.copy()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels not built; nothing to compare")
        return
    backends = [("python", _pykernels), ("cython", _kernels)]

    print(f"{'kernel':<26}{'backend':<10}{'best s':>10}{'speedup':>10}")
    for k, count in ((2, 2000), (3, 400), (4, 60)):
        cases = route_cases(k, count)
        best = {}
        outs = {}
        for name, kern in backends:
            runs = [time_routes(kern, cases, k) for _ in range(args.repeat)]
            best[name] = min(t for t, _ in runs)
            outs[name] = runs[0][1]
        assert outs["python"] == outs["cython"], "backends disagree"
        for name, _ in backends:
            print(f"{'route k=%d x%d' % (k, count):<26}{name:<10}{best[name]:>10.4f}"
                  f"{best['python'] / best[name]:>10.1f}")

    inst = gen_instance(GenConfig(n_A=30, n_B=20, K=5, N=6, demand=30, grid_size=8, cap_A=(2, 4)), 0)
    graph = build_graph(inst)
    best = {}
    outs = {}
    for name, kern in backends:
        runs = [time_mmo(kern, graph, len(inst.vehicles)) for _ in range(args.repeat)]
        best[name] = min(t for t, _ in runs)
        outs[name] = runs[0][1]
    assert np.array_equal(outs["python"], outs["cython"]), "backends disagree"
    label = f"dual insert {len(graph)} rows"
    for name, _ in backends:
        print(f"{label:<26}{name:<10}{best[name]:>10.4f}{best['python'] / best[name]:>10.1f}")


if __name__ == "__main__":
    main()
