"""Shareability hypergraph construction.

Trips are grown level by level: a k-request set is only routed when every
(k-1)-subset was route-feasible for the same vehicle.  Feasibility is
hereditary whenever travel times obey the triangle inequality, so the
level-wise builder finds exactly the edges an exhaustive scan would.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .model import Hyperedge, Instance, InstanceError, Request, TravelModel, Vehicle, edge_from_dict, edge_to_dict, hyperedge_value

BRUTE_FORCE_CAP = 12


class RouteContractError(ValueError):
    """A route was requested for a request set that exceeds the vehicle capacity."""


class GraphSizeError(ValueError):
    pass


@dataclass(frozen=True)
class GraphOptions:
    # request sets up to this size are routed by exhaustive search
    exact_route_limit: int = 4
    # larger sets: "insertion" (approximate), "exact", or "skip"
    large_routes: str = "insertion"
    jobs: int = 1


@dataclass(frozen=True)
class RoutePlan:
    order: tuple  # (("O" | "D", request position), ...)
    duration: float
    cost: float
    pickup_times: tuple[float, ...]
    ride_times: tuple[float, ...]
    approximate: bool = False


def _route_inputs(vehicle: Vehicle, requests: Sequence[Request], travel: TravelModel):
    pts = [vehicle.location] + [r.origin for r in requests] + [r.destination for r in requests]
    T = np.ascontiguousarray(travel.matrix(pts))
    wait = np.array([r.max_wait for r in requests], dtype=np.float64)
    ride = np.array([r.max_delay for r in requests], dtype=np.float64)
    return T, wait, ride


def _insertion_route(T, wait, ride, k):
    """Greedy cheapest insertion of each origin into the pickup block and each
    destination into the drop-off block.  Approximate: may miss feasible sets."""

    def evaluate(picks, drops):
        t, cur = 0.0, 0
        pick = {}
        for j in picks:
            t += T[cur][1 + j]
            cur = 1 + j
            if t >= wait[j]:
                return math.inf
            pick[j] = t
        for j in drops:
            t += T[cur][k + 1 + j]
            cur = k + 1 + j
            if j in pick and t - pick[j] >= ride[j]:
                return math.inf
        return t

    picks: list[int] = []
    drops: list[int] = []
    for j in range(k):
        best = (math.inf, None, None)
        for a in range(len(picks) + 1):
            p2 = picks[:a] + [j] + picks[a:]
            for b in range(len(drops) + 1):
                d2 = drops[:b] + [j] + drops[b:]
                # requests not yet inserted are ignored by evaluate()
                t = evaluate(p2, d2)
                if t < best[0]:
                    best = (t, p2, d2)
        if best[1] is None:
            return math.inf, None
        picks, drops = best[1], best[2]
    return evaluate(picks, drops), picks + drops


def min_cost_route(vehicle: Vehicle, requests: Sequence[Request], travel: TravelModel,
                   options: GraphOptions = GraphOptions(), kernels=None) -> RoutePlan | None:
    """Cheapest feasible origins-first route serving ``requests``, or None."""
    k = len(requests)
    if k < 1:
        raise ValueError("route needs at least one request")
    if sum(r.passengers for r in requests) > vehicle.capacity:
        raise RouteContractError(
            f"vehicle {vehicle.id}: {sum(r.passengers for r in requests)} passengers exceed capacity {vehicle.capacity}")
    kern = kernels or _backend.kernels
    T, wait, ride = _route_inputs(vehicle, requests, travel)
    approximate = False
    if k <= options.exact_route_limit or options.large_routes == "exact":
        if k > 16 and kern is not _backend.pure:
            kern = _backend.pure
        duration, seq = kern.route_search(T, wait, ride, k)
    elif options.large_routes == "insertion":
        duration, seq = _insertion_route(T, wait, ride, k)
        approximate = True
    else:
        return None
    if seq is None:
        return None
    order = tuple(("O", j) for j in seq[:k]) + tuple(("D", j) for j in seq[k:])
    # replay to report per-request times
    t, cur = 0.0, 0
    pick = [0.0] * k
    onboard = [0.0] * k
    for kind, j in order:
        nxt = 1 + j if kind == "O" else k + 1 + j
        t += T[cur][nxt]
        cur = nxt
        if kind == "O":
            pick[j] = t
        else:
            onboard[j] = t - pick[j]
    return RoutePlan(order, duration, duration * travel.cost_rate, tuple(pick), tuple(onboard), approximate)


class ShareabilityGraph:
    """Per-scenario hyperedges with vehicle and request incidence lists."""

    def __init__(self, instance: Instance, edges: Iterable[Hyperedge]):
        self.instance = instance
        self.edges: tuple[Hyperedge, ...] = tuple(sorted(edges, key=lambda e: e.key))
        self.N = instance.N
        self.p = instance.p
        self.n_vehicles = len(instance.vehicles)
        self.augmented = tuple(v.augmented for v in instance.vehicles)
        self.n_requests = tuple(len(sc.requests) for sc in instance.scenarios)
        self.by_scenario: list[list[int]] = [[] for _ in range(self.N)]
        self.F: dict[tuple[int, int], list[int]] = {}
        self.H: dict[tuple[int, int], list[int]] = {}
        for idx, e in enumerate(self.edges):
            self.by_scenario[e.scenario].append(idx)
            self.F.setdefault((e.vehicle, e.scenario), []).append(idx)
            for j in e.requests:
                self.H.setdefault((e.scenario, j), []).append(idx)

    def __len__(self) -> int:
        return len(self.edges)

    def vehicle_edges(self, i: int) -> list[int]:
        """Edges incident to vehicle ``i`` over all scenarios, in edge order."""
        out = []
        for l in range(self.N):
            out.extend(self.F.get((i, l), ()))
        return out

    def admissible(self, selection: Iterable[int], scenario: int) -> list[int]:
        sel = set(selection)
        return [idx for idx in self.by_scenario[scenario]
                if not self.augmented[self.edges[idx].vehicle] or self.edges[idx].vehicle in sel]

    def edge_set(self) -> dict[tuple, float]:
        return {e.key: e.value for e in self.edges}

    def v_bounds(self) -> tuple[float, float]:
        pos = [e.value for e in self.edges if e.value > 0]
        if not pos:
            return 0.0, 0.0
        return min(pos), max(pos)


def _join_level(level: list[tuple[int, ...]]) -> Iterable[tuple[int, ...]]:
    """All (k+1)-sets whose every k-subset is in ``level`` (sorted tuples)."""
    present = set(level)
    for a_idx, a in enumerate(level):
        for b in level[a_idx + 1:]:
            if a[:-1] != b[:-1]:
                break
            cand = a + (b[-1],)
            if all(cand[:q] + cand[q + 1:] in present for q in range(len(cand) - 2)):
                yield cand


def _vehicle_trips(instance: Instance, l: int, i: int, options: GraphOptions, trace=None) -> list[Hyperedge]:
    v = instance.vehicles[i]
    reqs = instance.scenarios[l].requests
    out = []

    def test(J):
        if trace is not None:
            trace.append((l, i, J))
        plan = min_cost_route(v, [reqs[j] for j in J], instance.travel, options)
        if plan is None:
            return False
        val = hyperedge_value(v, (reqs[j] for j in J), plan.cost)
        if val > 0:
            out.append(Hyperedge(l, i, J, val, plan.cost))
        return True

    level = [(j,) for j in range(len(reqs)) if reqs[j].passengers <= v.capacity and test((j,))]
    k = 2
    while level and k <= v.capacity:
        nxt = []
        for cand in _join_level(level):
            if sum(reqs[j].passengers for j in cand) > v.capacity:
                continue
            if test(cand):
                nxt.append(cand)
        level = nxt
        k += 1
    return out


def _scenario_edges(args):
    instance, l, options = args
    edges = []
    for i in range(len(instance.vehicles)):
        edges.extend(_vehicle_trips(instance, l, i, options))
    return edges


def build_graph(instance: Instance, options: GraphOptions = GraphOptions(), trace: list | None = None) -> ShareabilityGraph:
    """Level-wise trip enumeration for every (scenario, vehicle) pair.

    ``trace``, when given, collects every (scenario, vehicle, request-tuple)
    whose route was evaluated.
    """
    edges: list[Hyperedge] = []
    if options.jobs > 1 and trace is None and instance.N > 1:
        with ProcessPoolExecutor(max_workers=options.jobs) as pool:
            for part in pool.map(_scenario_edges, [(instance, l, options) for l in range(instance.N)]):
                edges.extend(part)
    else:
        for l in range(instance.N):
            for i in range(len(instance.vehicles)):
                edges.extend(_vehicle_trips(instance, l, i, options, trace))
    return ShareabilityGraph(instance, edges)


def brute_force_graph(instance: Instance, options: GraphOptions = GraphOptions(), cap: int = BRUTE_FORCE_CAP) -> ShareabilityGraph:
    """Route every capacity-feasible (vehicle, request subset) pair directly."""
    for sc in instance.scenarios:
        if len(sc.requests) > cap:
            raise GraphSizeError(f"scenario {sc.id} has {len(sc.requests)} requests (cap {cap})")
    edges = []
    for l, sc in enumerate(instance.scenarios):
        reqs = sc.requests
        for i, v in enumerate(instance.vehicles):
            for k in range(1, min(v.capacity, len(reqs)) + 1):
                for J in itertools.combinations(range(len(reqs)), k):
                    if sum(reqs[j].passengers for j in J) > v.capacity:
                        continue
                    plan = min_cost_route(v, [reqs[j] for j in J], instance.travel, options)
                    if plan is None:
                        continue
                    val = hyperedge_value(v, (reqs[j] for j in J), plan.cost)
                    if val > 0:
                        edges.append(Hyperedge(l, i, J, val, plan.cost))
    return ShareabilityGraph(instance, edges)


def check_graph(graph: ShareabilityGraph, reroute: bool = False, options: GraphOptions = GraphOptions()) -> list[tuple[str, str]]:
    """Structural invariants of a (possibly hand-edited) graph.

    Returns ``(invariant, message)`` pairs; empty means every check passed.
    """
    inst = graph.instance
    fails = []
    seen = set()
    for e in graph.edges:
        where = f"edge {e.key}"
        if e.key in seen:
            fails.append(("unique-edges", f"{where} appears twice"))
        seen.add(e.key)
        if not e.requests:
            fails.append(("nonempty", f"{where} has no requests"))
            continue
        reqs = inst.scenarios[e.scenario].requests
        if any(not 0 <= j < len(reqs) for j in e.requests):
            fails.append(("scenario-requests", f"{where} references a request outside its scenario"))
            continue
        v = inst.vehicles[e.vehicle]
        load = sum(reqs[j].passengers for j in e.requests)
        if load > v.capacity:
            fails.append(("capacity", f"{where}: {load} passengers > capacity {v.capacity}"))
            continue
        if not e.value > 0:
            fails.append(("positive-value", f"{where}: value {e.value} not > 0"))
        if reroute:
            plan = min_cost_route(v, [reqs[j] for j in e.requests], inst.travel, options)
            if plan is None:
                fails.append(("route-constraints", f"{where}: no route meets wait/ride limits"))
            elif len(e.requests) >= 2:
                for q in range(len(e.requests)):
                    sub = e.requests[:q] + e.requests[q + 1:]
                    if min_cost_route(v, [reqs[j] for j in sub], inst.travel, options) is None:
                        fails.append(("lattice", f"{where}: subset {sub} infeasible"))
                        break
    return fails


def write_graph_jsonl(graph: ShareabilityGraph, path, x: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for idx, e in enumerate(graph.edges):
            d = edge_to_dict(graph.instance, e, None if x is None else x.get(idx, 0.0))
            fh.write(json.dumps(d) + "\n")


def read_graph_jsonl(instance: Instance, path) -> ShareabilityGraph:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                edges.append(edge_from_dict(instance, json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise InstanceError(f"{path}:{n}: bad edge record ({exc})") from exc
    return ShareabilityGraph(instance, edges)
