"""Max-min online selection via a monotone dual covering solution.

Dual variables live on (groundset element, scenario) pairs, laid out densely
per scenario: the vehicles first, then that scenario's requests.  Candidate
evaluation inserts into the live array and then restores the touched
entries, so a snapshot costs only the candidate's own edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .lslpr import RunResult
from .model import TAU, Instance
from .packing import Evaluator, greedy_value
from .sharegraph import ShareabilityGraph


class PartitionError(ValueError):
    pass


@dataclass
class MMOOptions:
    delta: float | None = None  # default 1/p


class CoveringRows:
    """Flattened covering constraints: one row per hyperedge."""

    def __init__(self, graph: ShareabilityGraph):
        self.graph = graph
        nv = graph.n_vehicles
        self.offset = np.zeros(graph.N + 1, dtype=np.int64)
        for l in range(graph.N):
            self.offset[l + 1] = self.offset[l] + nv + graph.n_requests[l]
        ptr = [0]
        nodes = []
        for e in graph.edges:
            base = int(self.offset[e.scenario])
            nodes.append(base + e.vehicle)
            nodes.extend(base + nv + j for j in e.requests)
            ptr.append(len(nodes))
        self.ptr = np.array(ptr, dtype=np.int64)
        self.nodes = np.array(nodes, dtype=np.int64)
        self.rhs = np.array([e.value / graph.N for e in graph.edges], dtype=np.float64)
        self.vehicle_rows = [np.array(graph.vehicle_edges(i), dtype=np.int64) for i in range(nv)]
        self.size = int(self.offset[-1])

    def touched(self, i: int) -> np.ndarray:
        rows = self.vehicle_rows[i]
        if rows.size == 0:
            return rows
        return np.unique(np.concatenate([self.nodes[self.ptr[e]:self.ptr[e + 1]] for e in rows]))

    def gamma(self, u: np.ndarray, e: int) -> float:
        return float(u[self.nodes[self.ptr[e]:self.ptr[e + 1]]].sum())


@dataclass
class DualState:
    rows: CoveringRows
    delta: float
    u: np.ndarray
    inserted: list = field(default_factory=list)
    objective: float = 0.0

    @classmethod
    def fresh(cls, graph: ShareabilityGraph, delta: float | None = None, rows: CoveringRows | None = None):
        rows = rows or CoveringRows(graph)
        if delta is None:
            delta = 1.0 / graph.p
        return cls(rows, delta, np.zeros(rows.size), [])

    def copy(self) -> "DualState":
        return DualState(self.rows, self.delta, self.u.copy(), list(self.inserted), self.objective)

    def entries(self) -> dict[tuple[str, int], float]:
        """Nonzero duals keyed by (element label, scenario)."""
        g = self.rows.graph
        nv = g.n_vehicles
        out = {}
        for l in range(g.N):
            base = int(self.rows.offset[l])
            for q in range(int(self.rows.offset[l + 1]) - base):
                val = self.u[base + q]
                if val != 0.0:
                    label = f"vehicle:{q}" if q < nv else f"request:{q - nv}"
                    out[(label, l)] = float(val)
        return out

    def residual(self) -> float:
        """Largest covering shortfall over edges of inserted vehicles."""
        worst = 0.0
        for i in self.inserted:
            for e in self.rows.vehicle_rows[i]:
                worst = max(worst, self.rows.rhs[e] - self.rows.gamma(self.u, e))
        return worst

    def candidate_value(self, i: int, kernels=None) -> float:
        """Online objective after inserting ``i``, leaving the state untouched."""
        kern = kernels or _backend.kernels
        touched = self.rows.touched(i)
        saved = self.u[touched].copy()
        inc = kern.mmo_insert(self.u, self.rows.ptr, self.rows.nodes, self.rows.rhs,
                              self.rows.vehicle_rows[i], self.delta)
        self.u[touched] = saved
        return self.objective + inc


def mmo_insert(state: DualState, i: int, kernels=None, trace: list | None = None) -> DualState:
    """Raise duals so every hyperedge of vehicle ``i`` is covered; mutates ``state``.

    With ``trace`` the rows are processed one at a time and each update is
    recorded as ``(edge, gamma_before, gamma_after)``.
    """
    if i in state.inserted:
        raise ValueError(f"vehicle {i} already inserted")
    kern = kernels or _backend.kernels
    rows = state.rows
    if trace is None:
        inc = kern.mmo_insert(state.u, rows.ptr, rows.nodes, rows.rhs, rows.vehicle_rows[i], state.delta)
    else:
        inc = 0.0
        for e in rows.vehicle_rows[i]:
            before = rows.gamma(state.u, int(e))
            inc += kern.mmo_insert(state.u, rows.ptr, rows.nodes, rows.rhs,
                                   np.array([e], dtype=np.int64), state.delta)
            trace.append((int(e), before, rows.gamma(state.u, int(e))))
    state.objective += inc
    state.inserted.append(i)
    return state


def closed_form_update(u_before, value_per_scenario: float, delta: float) -> list[float]:
    """Closed-form raise of one row's variables until the row sum equals the target."""
    u = np.array(u_before, dtype=np.float64)
    n = len(u)
    ptr = np.array([0, n], dtype=np.int64)
    nodes = np.arange(n, dtype=np.int64)
    _backend.kernels.mmo_insert(u, ptr, nodes, np.array([value_per_scenario]),
                                np.array([0], dtype=np.int64), delta)
    return u.tolist()


def vhat_on(state: DualState) -> float:
    return state.objective


def _run(instance: Instance, graph: ShareabilityGraph, delta, steps: int, allowed, label: str) -> RunResult:
    state = DualState.fresh(graph, delta)
    for i in instance.basis:
        mmo_insert(state, i)
    base_value = state.objective
    chosen: list[int] = []
    step_log = []
    for _ in range(steps):
        before = state.objective
        best_val, best_i = -np.inf, None
        for i in instance.augmented:
            if i in chosen or not allowed(i, chosen):
                continue
            val = state.candidate_value(i)
            if val > best_val + TAU:
                best_val, best_i = val, i
        if best_i is None:
            break
        mmo_insert(state, best_i)
        chosen.append(best_i)
        step_log.append({
            "vehicle": instance.vehicles[best_i].id,
            "vhat_on_before": before,
            "vhat_on_after": state.objective,
            "max_residual": max(0.0, state.residual()),
        })
    selection = frozenset(chosen)
    assignments, integral = greedy_value(graph, selection)
    report = {
        "algorithm": label,
        "delta": state.delta,
        "iterations": len(chosen),
        "vhat_on_basis": base_value,
        "steps": step_log,
        "vhat_on": state.objective,
        "vhat": Evaluator(graph).vhat(selection),
        "integral_value": integral,
    }
    return RunResult(selection, assignments, report, state)


def run_mmo(instance: Instance, graph: ShareabilityGraph, options: MMOOptions = MMOOptions()) -> RunResult:
    if instance.K < 1:
        raise ValueError("K >= 1 required")
    return _run(instance, graph, options.delta, instance.K, lambda i, chosen: True, "mmo")


def run_mmo_partition(instance: Instance, graph: ShareabilityGraph, options: MMOOptions = MMOOptions()) -> RunResult:
    budgets = instance.partition_budgets
    if budgets is None:
        raise PartitionError("instance has no partition budgets")
    if sum(budgets) < 1:
        raise PartitionError("sum of partition budgets must be >= 1")
    members = [[i for i in instance.augmented if instance.vehicles[i].partition == m] for m in range(len(budgets))]
    for m, (b, mem) in enumerate(zip(budgets, members)):
        if b > len(mem):
            raise PartitionError(f"partition {m}: budget {b} exceeds its {len(mem)} vehicles")
    part = {i: instance.vehicles[i].partition for i in instance.augmented}

    def allowed(i, chosen):
        m = part[i]
        return sum(1 for c in chosen if part[c] == m) < budgets[m]

    return _run(instance, graph, options.delta, sum(budgets), allowed, "mmo-partition")
