"""Checks that turn the approximation guarantees into runnable assertions."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .model import TAU, Instance
from .packing import EXACT_EDGE_CAP, Evaluator, greedy_packing, solve_fractional
from .sharegraph import ShareabilityGraph

SELECTION_CAP = 5000
BOTTOM = "bottom"


class CapExceeded(ValueError):
    """Enumeration would exceed a configured size cap."""


class ConsistencyError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# feasible circulation

def max_flow(n: int, arcs: list[tuple[int, int, float]], s: int, t: int, eps: float = 1e-15):
    """Edmonds-Karp on a small network; returns (value, flow per arc)."""
    cap = [dict() for _ in range(n)]
    for a, b, c in arcs:
        cap[a][b] = cap[a].get(b, 0.0) + c
        cap[b].setdefault(a, 0.0)
    residual = [dict(d) for d in cap]
    total = 0.0
    while True:
        parent = {s: None}
        q = deque([s])
        while q and t not in parent:
            a = q.popleft()
            for b, r in residual[a].items():
                if r > eps and b not in parent:
                    parent[b] = a
                    q.append(b)
        if t not in parent:
            break
        push = math.inf
        b = t
        while parent[b] is not None:
            a = parent[b]
            push = min(push, residual[a][b])
            b = a
        b = t
        while parent[b] is not None:
            a = parent[b]
            residual[a][b] -= push
            residual[b][a] += push
            b = a
        total += push
    flow = {}
    for a, b, c in arcs:
        flow[(a, b)] = max(0.0, cap[a][b] - residual[a][b]) if c != math.inf else max(0.0, residual[b][a] - cap[b][a])
    return total, flow


def feasible_circulation(n: int, arcs: list[tuple[int, int, float, float]], tol: float = 1e-12):
    """Circulation meeting lower/upper arc bounds, via the super-source reduction.

    Returns a dict arc -> flow, or raises ConsistencyError when infeasible.
    """
    excess = [0.0] * n
    reduced = []
    for a, b, lo, hi in arcs:
        excess[b] += lo
        excess[a] -= lo
        if hi - lo > 0:
            reduced.append((a, b, hi - lo))
    S, T = n, n + 1
    need = 0.0
    for v, ex in enumerate(excess):
        if ex > 0:
            reduced.append((S, v, ex))
            need += ex
        elif ex < 0:
            reduced.append((v, T, -ex))
    value, flow = max_flow(n + 2, reduced, S, T)
    if value < need - tol:
        raise ConsistencyError(f"no feasible circulation (moved {value}, needed {need})")
    out = {}
    for a, b, lo, hi in arcs:
        out[(a, b)] = lo + (flow.get((a, b), 0.0) if hi - lo > 0 else 0.0)
    return out


@dataclass
class DecompositionMapping:
    demand: object
    keys: list          # hyperedge labels; the last one is BOTTOM
    delta: np.ndarray   # delta[e, f]
    residual: float

    def row_sums(self) -> np.ndarray:
        return self.delta.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.delta.sum(axis=0)


def decomposition_mapping(x: Mapping, z: Mapping, demand=None) -> DecompositionMapping:
    """Nonnegative matrix with row sums ``x`` and column sums ``z`` over the
    demand's hyperedges plus a dummy edge absorbing the slack of each side."""
    keys = sorted(set(x) | set(z), key=repr)
    xs = [float(x.get(k, 0.0)) for k in keys]
    zs = [float(z.get(k, 0.0)) for k in keys]
    if sum(xs) > 1 + TAU or sum(zs) > 1 + TAU or min(xs + zs, default=0.0) < -TAU:
        raise ValueError("x and z must be nonnegative with sums at most 1")
    xs.append(max(0.0, 1.0 - math.fsum(xs)))
    zs.append(max(0.0, 1.0 - math.fsum(zs)))
    keys = keys + [BOTTOM]
    h = len(keys)
    # nodes: 0 source, 1..h left copies, h+1..2h right copies
    arcs = []
    for a in range(h):
        arcs.append((0, 1 + a, xs[a], xs[a]))
        arcs.append((1 + h + a, 0, zs[a], zs[a]))
        for b in range(h):
            arcs.append((1 + a, 1 + h + b, 0.0, math.inf))
    try:
        circ = feasible_circulation(2 * h + 1, arcs, tol=1e-9)
    except ConsistencyError as exc:
        raise ConsistencyError(f"decomposition for demand {demand!r}: {exc}") from exc
    delta = np.zeros((h, h))
    for a in range(h):
        for b in range(h):
            delta[a, b] = circ[(1 + a, 1 + h + b)]
    res = max(np.max(np.abs(delta.sum(axis=1) - xs)), np.max(np.abs(delta.sum(axis=0) - zs)),
              max(0.0, -delta.min()))
    return DecompositionMapping(demand, keys, delta, float(res))


def demand_mappings(graph: ShareabilityGraph, sel_x, sel_z) -> list[DecompositionMapping]:
    """One mapping per demand, pairing the LP solutions for two selections."""
    out = []
    for l in range(graph.N):
        fx = solve_fractional(graph, sel_x, l).x
        fz = solve_fractional(graph, sel_z, l).x
        for j in range(graph.n_requests[l]):
            H = graph.H.get((l, j), [])
            if not H:
                continue
            out.append(decomposition_mapping({e: fx.get(e, 0.0) for e in H},
                                             {e: fz.get(e, 0.0) for e in H}, demand=(l, j)))
    return out


# --------------------------------------------------------------------------
# bounds

def _le(a: float, b: float, rel: float) -> bool:
    return a <= b + rel * max(1.0, abs(a), abs(b))


def check_sandwich(graph: ShareabilityGraph, selection: Iterable[int], max_edges: int = EXACT_EDGE_CAP,
                   rel: float = 1e-7, evaluator: Evaluator | None = None) -> dict:
    """Sandwich of exact, LP and greedy values for one selection.

    Checks exact <= LP <= p * exact and greedy >= LP / p, both on the scenario
    mean and in every scenario.
    """
    sel = frozenset(selection)
    ev = evaluator or Evaluator(graph, max_edges)
    p = graph.p
    rows = []
    ok = True
    for l in range(graph.N):
        vs = ev.scenario_vstar(sel, l)
        vh = ev.scenario_vhat(sel, l)
        gr = greedy_packing(graph, sel, l).value
        good = _le(vs, vh, rel) and _le(vh, p * vs, rel) and _le(vh / p, gr, rel) and _le(gr, vs, rel)
        ok &= good
        rows.append({"scenario": l, "vstar": vs, "vhat": vh, "greedy": gr, "ok": good})
    N = graph.N
    vstar = math.fsum(r["vstar"] for r in rows) / N if N else 0.0
    vhat = math.fsum(r["vhat"] for r in rows) / N if N else 0.0
    greedy = math.fsum(r["greedy"] for r in rows) / N if N else 0.0
    checks = {
        "vstar<=vhat": _le(vstar, vhat, rel),
        "vhat<=p*vstar": _le(vhat, p * vstar, rel),
        "greedy>=vhat/p": _le(vhat / p, greedy, rel),
        "per-scenario": ok,
    }
    return {"vstar": vstar, "vhat": vhat, "greedy": greedy, "p": p, "checks": checks,
            "passed": all(checks.values()), "scenarios": rows}


def lslpr_fractional_floor(p: int) -> float:
    return 1.0 / (p + 1)


def lslpr_integral_floor(p: int) -> float:
    return 1.0 / (p * p + p)


def mmo_integral_floor(p: int) -> float:
    """Multiplier on the best LP value that the MMO integral value must reach."""
    return (math.e - 1) / (2 * math.e * p * math.log(p)) / p


# --------------------------------------------------------------------------
# enumeration and gaps

def count_selections(instance: Instance, partition: bool = False) -> int:
    if partition and instance.partition_budgets is not None:
        total = 1
        for m, b in enumerate(instance.partition_budgets):
            size = sum(1 for i in instance.augmented if instance.vehicles[i].partition == m)
            total *= math.comb(size, b)
        return total
    return math.comb(len(instance.augmented), instance.K)


def enumerate_selections(instance: Instance, partition: bool = False, cap: int = SELECTION_CAP):
    """All budget-tight first-stage selections (values are monotone in the set)."""
    n = count_selections(instance, partition)
    if n > cap:
        raise CapExceeded(f"{n} selections exceed cap {cap}")
    if partition and instance.partition_budgets is not None:
        groups = []
        for m, b in enumerate(instance.partition_budgets):
            members = [i for i in instance.augmented if instance.vehicles[i].partition == m]
            groups.append(list(itertools.combinations(members, b)))
        for combo in itertools.product(*groups):
            yield frozenset(i for part in combo for i in part)
    else:
        for combo in itertools.combinations(instance.augmented, instance.K):
            yield frozenset(combo)


def best_selection(instance: Instance, evaluator: Evaluator, objective: str = "vstar",
                   partition: bool = False, cap: int = SELECTION_CAP) -> tuple[frozenset, float]:
    """Enumerated maximiser of ``vstar`` or ``vhat``; ties go to the first in order."""
    fn = evaluator.vstar if objective == "vstar" else evaluator.vhat
    best, best_val = frozenset(), -math.inf
    for sel in enumerate_selections(instance, partition, cap):
        val = fn(sel)
        if val > best_val + TAU:
            best, best_val = sel, val
    return best, best_val


@dataclass
class GapReport:
    opt: float
    alg: float
    gap: float
    opt_selection: frozenset


def gap_value(opt: float, alg: float) -> float:
    return (opt - alg) / opt if opt > 0 else 0.0


def optimality_gap(instance: Instance, graph: ShareabilityGraph, alg_value: float,
                   partition: bool = False, selection_cap: int = SELECTION_CAP,
                   max_edges: int = EXACT_EDGE_CAP, evaluator: Evaluator | None = None) -> GapReport:
    """Gap of an algorithm's integral value against the enumerated exact optimum."""
    ev = evaluator or Evaluator(graph, max_edges)
    sel, opt = best_selection(instance, ev, "vstar", partition, selection_cap)
    return GapReport(opt, alg_value, gap_value(opt, alg_value), sel)


def saa_sample_size(m: int, delta: float) -> int:
    """Scenario count ceil(m^4 / delta^2), computed in exact rational arithmetic."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    q = Fraction(m) ** 4 / Fraction(str(delta)) ** 2
    return math.ceil(q)
