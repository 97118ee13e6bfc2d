"""Second-stage hyperedge packing: LP relaxation, greedy rounding, exact search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .lp import LPError, solve_packing_lp
from .model import TAU
from .sharegraph import ShareabilityGraph

EXACT_EDGE_CAP = 40


class PackingSizeError(ValueError):
    """Raised when a scenario is too large for the exact solver."""


@dataclass
class FractionalAssignment:
    scenario: int
    x: dict[int, float]
    objective: float


@dataclass
class IntegralAssignment:
    scenario: int
    edges: tuple[int, ...]
    value: float
    nodes_explored: int = 0


def _edge_nodes(graph: ShareabilityGraph, idx: int) -> list[tuple]:
    e = graph.edges[idx]
    return [("v", e.vehicle)] + [("r", j) for j in e.requests]


def _constraint_matrix(graph: ShareabilityGraph, idxs: list[int]):
    rows: dict[tuple, int] = {}
    for idx in idxs:
        for node in _edge_nodes(graph, idx):
            rows.setdefault(node, len(rows))
    A = np.zeros((len(rows), len(idxs)))
    for col, idx in enumerate(idxs):
        for node in _edge_nodes(graph, idx):
            A[rows[node], col] = 1.0
    return A, rows


def solve_fractional(graph: ShareabilityGraph, selection: Iterable[int], scenario: int) -> FractionalAssignment:
    """Optimal basic solution of the packing LP over admissible edges.

    Edges of unselected augmented vehicles are dropped from the columns
    instead of being pinned to zero.
    """
    idxs = graph.admissible(selection, scenario)
    if not idxs:
        return FractionalAssignment(scenario, {}, 0.0)
    A, _ = _constraint_matrix(graph, idxs)
    c = np.array([graph.edges[i].value for i in idxs])
    try:
        res = solve_packing_lp(A, c)
    except LPError as exc:
        raise LPError(f"scenario {scenario}: {exc}") from exc
    x = {idx: float(v) for idx, v in zip(idxs, res.x)}
    return FractionalAssignment(scenario, x, res.objective)


def fractional_residual(graph: ShareabilityGraph, selection: Iterable[int], fa: FractionalAssignment) -> float:
    """Largest violation of the packing constraints by ``fa`` (0 when feasible)."""
    sel = set(selection)
    load: dict[tuple, float] = {}
    worst = 0.0
    for idx, xv in fa.x.items():
        e = graph.edges[idx]
        worst = max(worst, -xv, xv - 1.0)
        if graph.augmented[e.vehicle] and e.vehicle not in sel:
            worst = max(worst, abs(xv))
        for node in _edge_nodes(graph, idx):
            load[node] = load.get(node, 0.0) + xv
    for v in load.values():
        worst = max(worst, v - 1.0)
    return worst


def greedy_packing(graph: ShareabilityGraph, selection: Iterable[int], scenario: int) -> IntegralAssignment:
    """Scan admissible edges by decreasing value and keep the disjoint ones."""
    idxs = graph.admissible(selection, scenario)
    order = sorted(idxs, key=lambda i: -graph.edges[i].value)  # stable: ties keep edge order
    used_v: set[int] = set()
    used_r: set[int] = set()
    kept = []
    for idx in order:
        e = graph.edges[idx]
        if e.vehicle in used_v or any(j in used_r for j in e.requests):
            continue
        kept.append(idx)
        used_v.add(e.vehicle)
        used_r.update(e.requests)
    kept.sort()
    return IntegralAssignment(scenario, tuple(kept), math.fsum(graph.edges[i].value for i in kept))


def exact_packing(graph: ShareabilityGraph, selection: Iterable[int], scenario: int,
                  max_edges: int = EXACT_EDGE_CAP) -> IntegralAssignment:
    """Provably optimal disjoint edge set by depth-first branch and bound.

    Branches on the largest-value undecided edge (include first), bounding
    each node with the LP relaxation of the remaining compatible edges.
    """
    selection = list(selection)
    idxs = graph.admissible(selection, scenario)
    if len(idxs) > max_edges:
        raise PackingSizeError(f"scenario {scenario}: {len(idxs)} admissible edges exceed cap {max_edges}")
    if not idxs:
        return IntegralAssignment(scenario, (), 0.0)

    values = {i: graph.edges[i].value for i in idxs}
    nodes = {i: set(_edge_nodes(graph, i)) for i in idxs}
    conflicts = {i: {k for k in idxs if k != i and nodes[i] & nodes[k]} for i in idxs}
    branch_order = sorted(idxs, key=lambda i: -values[i])

    start = greedy_packing(graph, selection, scenario)
    best = {"value": start.value, "edges": list(start.edges)}
    explored = [0]

    def lp_over(avail):
        A, _ = _constraint_matrix(graph, avail)
        c = np.array([values[i] for i in avail])
        try:
            return solve_packing_lp(A, c)
        except LPError as exc:
            raise LPError(f"scenario {scenario}: {exc}") from exc

    def dfs(chosen, chosen_val, avail):
        explored[0] += 1
        tol = TAU * max(1.0, abs(best["value"]))
        if not avail:
            if chosen_val > best["value"] + tol:
                best["value"], best["edges"] = chosen_val, list(chosen)
            return
        if chosen_val + math.fsum(values[i] for i in avail) <= best["value"] + tol:
            return
        res = lp_over(avail)
        if chosen_val + res.objective <= best["value"] + tol:
            return
        if np.all(np.minimum(np.abs(res.x), np.abs(res.x - 1.0)) <= 1e-9):
            picked = [i for i, xv in zip(avail, res.x) if xv > 0.5]
            val = chosen_val + math.fsum(values[i] for i in picked)
            if val > best["value"] + tol:
                best["value"], best["edges"] = val, chosen + picked
            return
        e = avail[0]
        dfs(chosen + [e], chosen_val + values[e], [i for i in avail[1:] if i not in conflicts[e]])
        dfs(chosen, chosen_val, avail[1:])

    dfs([], 0.0, branch_order)
    kept = sorted(best["edges"])
    return IntegralAssignment(scenario, tuple(kept), math.fsum(values[i] for i in kept), explored[0])


class Evaluator:
    """Memoised per-scenario LP and IP values for one graph.

    A scenario's value only depends on which selected augmented vehicles own
    edges in that scenario, so that subset is the cache key.
    """

    def __init__(self, graph: ShareabilityGraph, max_edges: int = EXACT_EDGE_CAP):
        self.graph = graph
        self.max_edges = max_edges
        self._present = [frozenset(graph.edges[i].vehicle for i in graph.by_scenario[l]
                                   if graph.augmented[graph.edges[i].vehicle]) for l in range(graph.N)]
        self._lp: dict[tuple, float] = {}
        self._ip: dict[tuple, float] = {}
        self.lp_solves = 0

    def _key(self, selection, l):
        return (l, self._present[l] & frozenset(selection))

    def scenario_vhat(self, selection, l: int) -> float:
        key = self._key(selection, l)
        if key not in self._lp:
            self._lp[key] = solve_fractional(self.graph, key[1], l).objective
            self.lp_solves += 1
        return self._lp[key]

    def scenario_vstar(self, selection, l: int) -> float:
        key = self._key(selection, l)
        if key not in self._ip:
            self._ip[key] = exact_packing(self.graph, key[1], l, self.max_edges).value
        return self._ip[key]

    def vhat(self, selection) -> float:
        selection = frozenset(selection)
        if self.graph.N == 0:
            return 0.0
        return math.fsum(self.scenario_vhat(selection, l) for l in range(self.graph.N)) / self.graph.N

    def vstar(self, selection) -> float:
        selection = frozenset(selection)
        if self.graph.N == 0:
            return 0.0
        return math.fsum(self.scenario_vstar(selection, l) for l in range(self.graph.N)) / self.graph.N


def vhat(graph: ShareabilityGraph, selection: Iterable[int]) -> float:
    """Mean over scenarios of the LP relaxation value."""
    return Evaluator(graph).vhat(selection)


def vstar(graph: ShareabilityGraph, selection: Iterable[int], max_edges: int = EXACT_EDGE_CAP) -> float:
    """Mean over scenarios of the exact packing optimum."""
    return Evaluator(graph, max_edges).vstar(selection)


def greedy_value(graph: ShareabilityGraph, selection: Iterable[int]) -> tuple[list[IntegralAssignment], float]:
    """Greedy assignment for every scenario and its mean value."""
    selection = list(selection)
    parts = [greedy_packing(graph, selection, l) for l in range(graph.N)]
    mean = math.fsum(a.value for a in parts) / graph.N if graph.N else 0.0
    return parts, mean
