"""Local search over single-vehicle swaps scored by the LP relaxation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import TAU, Instance
from .packing import Evaluator, IntegralAssignment, greedy_value
from .sharegraph import ShareabilityGraph


@dataclass
class LSOptions:
    epsilon: float | None = None  # default 1/(p K^2)
    seed: int = 0
    k_max: int | None = None
    first_improvement: bool = False


@dataclass
class LocalSearchState:
    selection: frozenset
    value: float
    k: int
    epsilon: float
    k_max: int
    seed: int


@dataclass
class RunResult:
    selection: frozenset
    assignments: list[IntegralAssignment]
    report: dict = field(default_factory=dict)
    state: object = None

    @property
    def integral_value(self) -> float:
        return self.report["integral_value"]


def default_epsilon(p: int, K: int) -> float:
    return 1.0 / (p * K * K)


def iteration_cap(graph: ShareabilityGraph, epsilon: float) -> int:
    """Accepted-swap bound from geometric growth between v_min/N and (n_A+n_B) v_max.

    One extra step is allowed for the zero-valued start, whose first accepted
    swap only reaches v_min/N.
    """
    v_min, v_max = graph.v_bounds()
    if v_max <= 0:
        return 0
    ratio = graph.N * graph.n_vehicles * v_max / v_min
    return int(math.ceil(math.log(ratio) / math.log1p(epsilon))) + 1


def swap_value(state: LocalSearchState, i_out: int, i_in: int, evaluator: Evaluator) -> float:
    if i_out not in state.selection or i_in in state.selection:
        raise ValueError("swap must remove a selected vehicle and add an unselected one")
    return evaluator.vhat((state.selection - {i_out}) | {i_in})


def local_swap_iteration(state: LocalSearchState, evaluator: Evaluator, candidates: list[int],
                         first_improvement: bool = False) -> LocalSearchState | None:
    """One sweep over all swaps; returns the improved state or None to halt."""
    cur = state.value

    def improves(val):
        if cur <= TAU:
            return val > TAU
        return val > (1.0 + state.epsilon) * cur

    best_val, best_pair = -math.inf, None
    for i_out in sorted(state.selection):
        for i_in in candidates:
            if i_in in state.selection:
                continue
            val = swap_value(state, i_out, i_in, evaluator)
            if val > best_val + TAU:
                best_val, best_pair = val, (i_out, i_in)
            if first_improvement and improves(val):
                best_val, best_pair = val, (i_out, i_in)
                break
        else:
            continue
        break
    if best_pair is None or not improves(best_val):
        return None
    new_sel = (state.selection - {best_pair[0]}) | {best_pair[1]}
    return LocalSearchState(frozenset(new_sel), best_val, state.k + 1, state.epsilon, state.k_max, state.seed)


def run_lslpr(instance: Instance, graph: ShareabilityGraph, options: LSOptions = LSOptions(),
              evaluator: Evaluator | None = None) -> RunResult:
    K = instance.K
    aug = instance.augmented
    if K < 1 or len(aug) < K:
        raise ValueError("need 1 <= K <= |S_A|")
    evaluator = evaluator or Evaluator(graph)
    eps = options.epsilon if options.epsilon is not None else default_epsilon(instance.p, K)
    k_max = options.k_max if options.k_max is not None else iteration_cap(graph, eps)

    rng = np.random.default_rng(options.seed)
    start = frozenset(int(aug[q]) for q in rng.choice(len(aug), size=K, replace=False))
    state = LocalSearchState(start, evaluator.vhat(start), 0, eps, k_max, options.seed)
    trajectory = [state.value]
    swaps = []
    overflow = False
    if graph.v_bounds()[1] > 0:
        while True:
            nxt = local_swap_iteration(state, evaluator, aug, options.first_improvement)
            if nxt is None:
                break
            if nxt.k > k_max:
                overflow = True
                break
            swaps.append([instance.vehicles[i].id for i in (sorted(state.selection - nxt.selection)
                                                              + sorted(nxt.selection - state.selection))])
            state = nxt
            trajectory.append(state.value)

    assignments, integral = greedy_value(graph, state.selection)
    report = {
        "algorithm": "lslpr",
        "seed": options.seed,
        "epsilon": eps,
        "k_max": k_max,
        "iterations": state.k,
        "k_max_reached": overflow,
        "initial_selection": [instance.vehicles[i].id for i in sorted(start)],
        "swaps": swaps,
        "vhat_trajectory": trajectory,
        "vhat": state.value,
        "integral_value": integral,
        "lp_solves": evaluator.lp_solves,
    }
    return RunResult(state.selection, assignments, report)
