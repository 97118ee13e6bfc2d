"""Seeded synthetic instances on a rectilinear grid, plus clique-count diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .model import AUGMENTED, BASIS, Instance, Request, Scenario, TravelModel, Vehicle

MAX_CAPACITY = 10


@dataclass(frozen=True)
class GenConfig:
    n_A: int = 6
    n_B: int = 4
    K: int = 2
    N: int = 3
    demand: int = 8                  # requests per scenario (mean when poisson)
    demand_mode: str = "fixed"       # "fixed" | "poisson"
    cap_A: tuple[int, int] = (2, 3)  # inclusive range
    cap_B: tuple[int, int] = (2, 2)
    grid_size: int = 10
    speed: float = 1.0
    cost_rate: float = 0.3
    wait: tuple[float, float] = (4.0, 9.0)
    delay_factor: float = 1.5        # onboard bound = factor * direct time + slack
    delay_slack: tuple[float, float] = (2.0, 5.0)
    profit_rate: float = 1.0
    profit_noise: float = 1.0
    bonus_A: tuple[float, float] = (0.0, 1.0)
    bonus_B: tuple[float, float] = (0.0, 0.5)
    max_passengers: int = 2
    partitions: int = 0              # 0 means no partition budgets

    def check(self) -> list[str]:
        errs = []
        if self.n_A < 0 or self.n_B < 0 or self.n_A + self.n_B < 1:
            errs.append("need n_A, n_B >= 0 and at least one vehicle")
        if not 0 <= self.K <= self.n_A:
            errs.append(f"K must lie in [0, n_A] (K={self.K}, n_A={self.n_A})")
        if self.N < 1:
            errs.append("N >= 1")
        if self.demand < 0:
            errs.append("demand >= 0")
        if self.demand_mode not in ("fixed", "poisson"):
            errs.append("demand_mode must be fixed or poisson")
        for name in ("cap_A", "cap_B"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi <= MAX_CAPACITY:
                errs.append(f"{name} must satisfy 1 <= lo <= hi <= {MAX_CAPACITY}")
        if self.grid_size < 1 or self.speed <= 0 or self.cost_rate < 0:
            errs.append("grid_size >= 1, speed > 0, cost_rate >= 0")
        if self.max_passengers < 1:
            errs.append("max_passengers >= 1")
        if self.partitions < 0 or (self.partitions and self.partitions > self.n_A):
            errs.append("partitions must lie in [0, n_A]")
        return errs


def _point(rng, g):
    return (float(rng.integers(0, g + 1)), float(rng.integers(0, g + 1)))


def _uniform(rng, lo_hi):
    lo, hi = lo_hi
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


def gen_instance(config: GenConfig, seed: int = 0) -> Instance:
    errs = config.check()
    if errs:
        raise ValueError("; ".join(errs))
    rng = np.random.default_rng(seed)
    g = config.grid_size
    vehicles = []
    for a in range(config.n_A):
        cap = int(rng.integers(config.cap_A[0], config.cap_A[1] + 1))
        part = a % config.partitions if config.partitions else None
        vehicles.append(Vehicle(f"a{a}", AUGMENTED, cap, _point(rng, g), part))
    for b in range(config.n_B):
        cap = int(rng.integers(config.cap_B[0], config.cap_B[1] + 1))
        vehicles.append(Vehicle(f"b{b}", BASIS, cap, _point(rng, g)))

    scenarios = []
    for l in range(config.N):
        n = config.demand if config.demand_mode == "fixed" else int(rng.poisson(config.demand))
        reqs = []
        for j in range(n):
            o = _point(rng, g)
            d = _point(rng, g)
            while d == o:
                d = _point(rng, g)
            direct = (abs(o[0] - d[0]) + abs(o[1] - d[1])) / config.speed
            reqs.append(Request(
                id=f"r{l}_{j}",
                origin=o,
                destination=d,
                passengers=int(rng.integers(1, config.max_passengers + 1)),
                profit=round(config.profit_rate * direct + config.profit_noise * float(rng.random()), 6),
                bonus={AUGMENTED: round(_uniform(rng, config.bonus_A), 6),
                       BASIS: round(_uniform(rng, config.bonus_B), 6)},
                max_wait=round(_uniform(rng, config.wait), 6),
                max_delay=round(config.delay_factor * direct + _uniform(rng, config.delay_slack), 6),
            ))
        scenarios.append(Scenario(l, tuple(reqs)))

    budgets = None
    if config.partitions:
        # spread K over the groups, never past a group's size
        sizes = [sum(1 for v in vehicles if v.partition == m) for m in range(config.partitions)]
        budgets = [0] * config.partitions
        left = config.K
        m = 0
        while left > 0:
            if budgets[m] < sizes[m]:
                budgets[m] += 1
                left -= 1
            m = (m + 1) % config.partitions
        budgets = tuple(budgets)
    travel = TravelModel("manhattan", config.speed, None, config.cost_rate)
    return Instance(tuple(vehicles), tuple(scenarios), config.K, budgets, travel)


def setting1_like(n_A: int = 10, N: int = 4, n_B: int = 115, demand: int | None = None) -> GenConfig:
    """High-capacity shape: capacities 5-10, basis capacity 3, K = 5."""
    if demand is None:
        demand = int(round(1.8 * (5 + n_B)))
    return GenConfig(n_A=n_A, n_B=n_B, K=min(5, n_A), N=N, demand=demand,
                     cap_A=(5, 10), cap_B=(3, 3), grid_size=20)


def setting2_like(n_A: int = 114, K: int = 30, N: int = 4, n_B: int = 60, demand: int | None = None) -> GenConfig:
    """Mid-capacity shape: augmented capacity 3, basis capacity 2."""
    if demand is None:
        demand = 2 * (K + n_B)
    return GenConfig(n_A=n_A, n_B=n_B, K=K, N=N, demand=demand, cap_A=(3, 3), cap_B=(2, 2), grid_size=20)


def desk_config(**overrides) -> GenConfig:
    """Small enumerable configuration used by the test suites."""
    return replace(GenConfig(), **overrides)


def demand_supply_ratio(instance: Instance) -> float:
    """Mean requests per scenario over the vehicles in service (K + |S_B|)."""
    if instance.N == 0:
        return 0.0
    mean = sum(len(s.requests) for s in instance.scenarios) / instance.N
    return mean / (instance.K + len(instance.basis))


def expected_clique_count(d: int, q: float, k: int) -> float:
    return math.comb(d, k) * q ** math.comb(k, 2)


def clique_diagnostics(instance: Instance, graph, k_values=(2, 3)) -> dict:
    """Observed shared-trip counts against the random-graph clique estimate.

    q is the fraction of request pairs (per scenario) that share at least one
    stored hyperedge.  The observed count of size-k cliques is the number of
    distinct k-request sets carried by some hyperedge.
    """
    pairs_total = 0
    pairs_seen = 0
    observed = {k: 0.0 for k in k_values}
    for l, sc in enumerate(instance.scenarios):
        d = len(sc.requests)
        pairs_total += math.comb(d, 2)
        sets = {len(graph.edges[i].requests): set() for i in graph.by_scenario[l]}
        shared = set()
        for i in graph.by_scenario[l]:
            reqs = graph.edges[i].requests
            sets.setdefault(len(reqs), set()).add(reqs)
            for pair in combinations(reqs, 2):
                shared.add(pair)
        pairs_seen += len(shared)
        for k in k_values:
            observed[k] += len(sets.get(k, ()))
    N = max(instance.N, 1)
    d_mean = sum(len(s.requests) for s in instance.scenarios) / N
    q = pairs_seen / pairs_total if pairs_total else 0.0
    report = {"d": d_mean, "q": q, "degenerate": q <= 0.0 or q >= 1.0,
              "observed": {k: observed[k] / N for k in k_values}}
    if report["degenerate"]:
        report["note"] = "compatibility rate is 0 or 1; clique estimates are trivial"
        report["expected"] = {k: (0.0 if q <= 0.0 else float(math.comb(round(d_mean), k))) for k in k_values}
        report["max_clique_window"] = None
        return report
    d_int = round(d_mean)
    report["expected"] = {k: expected_clique_count(d_int, q, k) for k in k_values}
    report["max_clique_window"] = 2 * math.log(d_int) / math.log(1 / q) if d_int > 1 else 0.0
    return report
