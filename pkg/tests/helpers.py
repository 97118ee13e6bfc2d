"""Independent reference implementations used as test oracles."""

import itertools
import math

import numpy as np

from sramf import _pykernels
from sramf.generator import GenConfig, gen_instance
from sramf.sharegraph import build_graph

try:
    from sramf import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [_pykernels] + ([_kernels] if _kernels is not None else [])
BACKEND_IDS = [b.BACKEND for b in BACKENDS]


def small_config(seed, **kw):
    """Enumerable instance shapes spread over a few sizes."""
    rng = np.random.default_rng(10_000 + seed)
    base = dict(
        n_A=int(rng.integers(2, 7)),
        n_B=int(rng.integers(0, 5)),
        N=int(rng.integers(1, 5)),
        demand=int(rng.integers(3, 11)),
        grid_size=int(rng.integers(4, 9)),
        cap_A=(2, int(rng.integers(2, 5))),
        cap_B=(1, 3),
    )
    k_draw = int(rng.integers(1, 7))
    base.update(kw)
    base.setdefault("K", min(k_draw, base["n_A"]))
    return GenConfig(**base)


def small_problem(seed, **kw):
    inst = gen_instance(small_config(seed, **kw), seed)
    return inst, build_graph(inst)


def route_oracle(T, wait, ride, k):
    """Minimum duration over all origins-first orderings by plain enumeration."""
    best = math.inf
    for picks in itertools.permutations(range(k)):
        for drops in itertools.permutations(range(k)):
            t, cur, ok = 0.0, 0, True
            pick = {}
            for j in picks:
                t += T[cur][1 + j]
                cur = 1 + j
                if t >= wait[j]:
                    ok = False
                    break
                pick[j] = t
            if not ok:
                continue
            for j in drops:
                t += T[cur][k + 1 + j]
                cur = k + 1 + j
                if t - pick[j] >= ride[j]:
                    ok = False
                    break
            if ok:
                best = min(best, t)
    return best


def packing_oracle(graph, selection, scenario):
    """Best disjoint edge set by enumerating every subset of admissible edges."""
    idxs = graph.admissible(selection, scenario)
    best = 0.0
    for r in range(1, len(idxs) + 1):
        for combo in itertools.combinations(idxs, r):
            used = []
            ok = True
            for i in combo:
                e = graph.edges[i]
                nodes = [("v", e.vehicle)] + [("r", j) for j in e.requests]
                if any(n in used for n in nodes):
                    ok = False
                    break
                used.extend(nodes)
            if ok:
                best = max(best, math.fsum(graph.edges[i].value for i in combo))
    return best


def lp_oracle(graph, selection, scenario):
    """Packing LP value from scipy's HiGHS solver."""
    from scipy.optimize import linprog

    idxs = graph.admissible(selection, scenario)
    if not idxs:
        return 0.0
    rows = {}
    for i in idxs:
        e = graph.edges[i]
        for n in [("v", e.vehicle)] + [("r", j) for j in e.requests]:
            rows.setdefault(n, len(rows))
    A = np.zeros((len(rows), len(idxs)))
    for c, i in enumerate(idxs):
        e = graph.edges[i]
        for n in [("v", e.vehicle)] + [("r", j) for j in e.requests]:
            A[rows[n], c] = 1.0
    v = np.array([graph.edges[i].value for i in idxs])
    res = linprog(-v, A_ub=A, b_ub=np.ones(len(rows)), bounds=(0, None), method="highs")
    assert res.status == 0
    return -res.fun


def mean_over_scenarios(graph, fn, selection):
    return math.fsum(fn(graph, selection, l) for l in range(graph.N)) / graph.N
