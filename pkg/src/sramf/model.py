"""Domain types for stochastic ride-pooling with a mixed fleet.

Ids are opaque strings at the file boundary; everything algorithmic works on
dense integer indices (vehicle index into ``Instance.vehicles``, request index
into ``Scenario.requests``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np

AUGMENTED = "A"
BASIS = "B"

# absolute tolerance used for every value comparison
TAU = 1e-9

Point = Union[tuple, int]


class InstanceError(ValueError):
    """Raised when an instance (or a file describing one) is malformed."""


@dataclass(frozen=True)
class Vehicle:
    id: str
    cls: str
    capacity: int
    location: Point
    partition: int | None = None
    occupancy: int = 0

    @property
    def augmented(self) -> bool:
        return self.cls == AUGMENTED


@dataclass(frozen=True)
class Request:
    id: str
    origin: Point
    destination: Point
    passengers: int = 1
    profit: float = 0.0
    bonus: Mapping[str, float] = field(default_factory=dict)
    max_wait: float = math.inf
    max_delay: float = math.inf

    def bonus_for(self, cls: str) -> float:
        return float(self.bonus.get(cls, 0.0))


@dataclass(frozen=True)
class Scenario:
    id: int
    requests: tuple[Request, ...]


@dataclass(frozen=True)
class TravelModel:
    """Travel times either from a rectilinear metric or an explicit matrix.

    ``cost_rate`` converts route duration into route cost c(i, t).
    """

    metric: str = "manhattan"
    speed: float = 1.0
    times: tuple[tuple[float, ...], ...] | None = None
    cost_rate: float = 1.0

    def time(self, a: Point, b: Point) -> float:
        if self.metric == "matrix":
            return float(self.times[a][b])
        return (abs(a[0] - b[0]) + abs(a[1] - b[1])) / self.speed

    def matrix(self, points: Sequence[Point]) -> np.ndarray:
        n = len(points)
        out = np.empty((n, n), dtype=np.float64)
        for r in range(n):
            for c in range(n):
                out[r, c] = self.time(points[r], points[c])
        return out


@dataclass(frozen=True)
class Hyperedge:
    """One vehicle plus a nonempty set of requests from one scenario."""

    scenario: int
    vehicle: int
    requests: tuple[int, ...]
    value: float
    cost: float = 0.0

    @property
    def size(self) -> int:
        # number of groundset elements: the vehicle and its requests
        return 1 + len(self.requests)

    @property
    def key(self) -> tuple:
        return (self.scenario, self.vehicle, self.requests)


@dataclass(frozen=True)
class Instance:
    vehicles: tuple[Vehicle, ...]
    scenarios: tuple[Scenario, ...]
    K: int
    partition_budgets: tuple[int, ...] | None = None
    travel: TravelModel = TravelModel()

    @property
    def p(self) -> int:
        return 1 + max((v.capacity for v in self.vehicles), default=0)

    @property
    def N(self) -> int:
        return len(self.scenarios)

    @property
    def augmented(self) -> list[int]:
        return [i for i, v in enumerate(self.vehicles) if v.augmented]

    @property
    def basis(self) -> list[int]:
        return [i for i, v in enumerate(self.vehicles) if not v.augmented]

    def vehicle_index(self, vid: str) -> int:
        for i, v in enumerate(self.vehicles):
            if v.id == vid:
                return i
        raise KeyError(vid)

    def with_budget(self, K: int) -> "Instance":
        return Instance(self.vehicles, self.scenarios, K, self.partition_budgets, self.travel)


@dataclass(frozen=True)
class Selection:
    chosen: frozenset

    def ids(self, instance: Instance) -> list[str]:
        return [instance.vehicles[i].id for i in sorted(self.chosen)]


def hyperedge_value(vehicle: Vehicle, requests: Iterable[Request], route_cost: float) -> float:
    """Profit plus preference bonuses minus route cost; may be negative."""
    reqs = list(requests)
    if not reqs:
        raise ValueError("hyperedge needs at least one request")
    if not math.isfinite(route_cost):
        raise ValueError("route cost must be finite")
    return sum(r.profit for r in reqs) + sum(r.bonus_for(vehicle.cls) for r in reqs) - route_cost


def validate_instance(instance: Instance) -> list[str]:
    """Return a list of violated invariants (empty when the instance is ok)."""
    problems = []
    ids = [v.id for v in instance.vehicles]
    if len(set(ids)) != len(ids):
        problems.append("duplicate vehicle ids")
    n_aug = 0
    for v in instance.vehicles:
        if v.cls not in (AUGMENTED, BASIS):
            problems.append(f"vehicle {v.id}: class must be A or B")
        if int(v.capacity) < 1:
            problems.append(f"vehicle {v.id}: capacity >= 1")
        if v.occupancy:
            problems.append(f"vehicle {v.id}: initial occupancy not supported")
        if v.augmented:
            n_aug += 1
        elif v.partition is not None:
            problems.append(f"vehicle {v.id}: partition only allowed on augmented vehicles")
    if instance.K < 0:
        problems.append("K >= 0")
    if instance.K > n_aug:
        problems.append(f"K <= |S_A| ({instance.K} > {n_aug})")
    if not instance.vehicles:
        problems.append("at least one vehicle")
    budgets = instance.partition_budgets
    if budgets is not None:
        if any(b < 0 for b in budgets):
            problems.append("partition budgets >= 0")
        if sum(budgets) > n_aug:
            problems.append("sum of partition budgets <= |S_A|")
        for v in instance.vehicles:
            if v.augmented and (v.partition is None or not 0 <= v.partition < len(budgets)):
                problems.append(f"vehicle {v.id}: partition index missing or out of range")
    for sc in instance.scenarios:
        rids = [r.id for r in sc.requests]
        if len(set(rids)) != len(rids):
            problems.append(f"scenario {sc.id}: duplicate request ids")
        for r in sc.requests:
            if int(r.passengers) < 1:
                problems.append(f"scenario {sc.id} request {r.id}: passengers >= 1")
            if r.max_wait < 0:
                problems.append(f"scenario {sc.id} request {r.id}: max_wait >= 0")
            if r.max_delay < 0:
                problems.append(f"scenario {sc.id} request {r.id}: max_delay >= 0")
            if r.profit < 0:
                problems.append(f"scenario {sc.id} request {r.id}: profit >= 0")
    tm = instance.travel
    if tm.metric == "manhattan":
        if not tm.speed > 0:
            problems.append("travel speed > 0")
    elif tm.metric == "matrix":
        if tm.times is None:
            problems.append("matrix travel model needs times")
    else:
        problems.append(f"unknown travel metric {tm.metric!r}")
    return problems


# --------------------------------------------------------------------------
# JSON schema

def _point_to_json(pt: Point) -> dict:
    if isinstance(pt, tuple):
        return {"x": pt[0], "y": pt[1]}
    return {"node": int(pt)}


def _point_from_json(obj: Mapping) -> Point:
    if "node" in obj:
        return int(obj["node"])
    return (float(obj["x"]), float(obj["y"]))


def _num_to_json(x: float):
    return None if math.isinf(x) else x


def _num_from_json(x) -> float:
    return math.inf if x is None else float(x)


def instance_to_dict(instance: Instance, edges: Sequence[Hyperedge] | None = None) -> dict:
    vehicles = []
    for v in instance.vehicles:
        d = {"id": v.id, "class": v.cls, "capacity": v.capacity}
        d.update(_point_to_json(v.location))
        if v.partition is not None:
            d["partition"] = v.partition
        vehicles.append(d)
    scenarios = []
    for sc in instance.scenarios:
        scenarios.append([
            {
                "id": r.id,
                "origin": _point_to_json(r.origin),
                "dest": _point_to_json(r.destination),
                "passengers": r.passengers,
                "profit": r.profit,
                "bonus": dict(r.bonus),
                "max_wait": _num_to_json(r.max_wait),
                "max_delay": _num_to_json(r.max_delay),
            }
            for r in sc.requests
        ])
    tm = instance.travel
    travel: dict[str, Any] = {"metric": tm.metric, "speed": tm.speed}
    if tm.times is not None:
        travel["times"] = [list(row) for row in tm.times]
    if tm.cost_rate != 1.0:
        travel["cost_rate"] = tm.cost_rate
    out: dict[str, Any] = {"vehicles": vehicles, "scenarios": scenarios, "k": instance.K}
    if instance.partition_budgets is not None:
        out["partition_budgets"] = list(instance.partition_budgets)
    out["travel"] = travel
    if edges is not None:
        out["edges"] = [edge_to_dict(instance, e) for e in edges]
    return out


def instance_from_dict(obj: Mapping) -> Instance:
    try:
        vehicles = tuple(
            Vehicle(
                id=str(v["id"]),
                cls=str(v["class"]),
                capacity=int(v["capacity"]),
                location=_point_from_json(v),
                partition=None if v.get("partition") is None else int(v["partition"]),
                occupancy=int(v.get("occupancy", 0)),
            )
            for v in obj["vehicles"]
        )
        scenarios = []
        for l, reqs in enumerate(obj["scenarios"]):
            scenarios.append(Scenario(l, tuple(
                Request(
                    id=str(r["id"]),
                    origin=_point_from_json(r["origin"]),
                    destination=_point_from_json(r["dest"]),
                    passengers=int(r.get("passengers", 1)),
                    profit=float(r.get("profit", 0.0)),
                    bonus={str(k): float(x) for k, x in r.get("bonus", {}).items()},
                    max_wait=_num_from_json(r.get("max_wait")),
                    max_delay=_num_from_json(r.get("max_delay")),
                )
                for r in reqs
            )))
        t = obj.get("travel", {})
        times = t.get("times")
        travel = TravelModel(
            metric=str(t.get("metric", "manhattan")),
            speed=float(t.get("speed", 1.0)),
            times=None if times is None else tuple(tuple(float(x) for x in row) for row in times),
            cost_rate=float(t.get("cost_rate", 1.0)),
        )
        budgets = obj.get("partition_budgets")
        return Instance(
            vehicles=vehicles,
            scenarios=tuple(scenarios),
            K=int(obj["k"]),
            partition_budgets=None if budgets is None else tuple(int(b) for b in budgets),
            travel=travel,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed instance: {exc!r}") from exc


def edge_to_dict(instance: Instance, e: Hyperedge, x: float | None = None) -> dict:
    sc = instance.scenarios[e.scenario]
    d = {
        "scenario": e.scenario,
        "vehicle": instance.vehicles[e.vehicle].id,
        "requests": [sc.requests[j].id for j in e.requests],
        "value": e.value,
        "cost": e.cost,
    }
    if x is not None:
        d["x"] = x
    return d


def edge_from_dict(instance: Instance, d: Mapping) -> Hyperedge:
    l = int(d["scenario"])
    if not 0 <= l < instance.N:
        raise InstanceError(f"edge references unknown scenario {l}")
    try:
        i = instance.vehicle_index(str(d["vehicle"]))
    except KeyError:
        raise InstanceError(f"edge references unknown vehicle {d['vehicle']!r}") from None
    rindex = {r.id: j for j, r in enumerate(instance.scenarios[l].requests)}
    try:
        reqs = tuple(sorted(rindex[str(r)] for r in d["requests"]))
    except KeyError as exc:
        raise InstanceError(f"edge references unknown request {exc}") from None
    return Hyperedge(l, i, reqs, float(d["value"]), float(d.get("cost", 0.0)))


def load_instance(path) -> tuple[Instance, list[Hyperedge] | None]:
    """Read an instance file; returns the instance and any embedded edge list."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    inst = instance_from_dict(obj)
    edges = None
    if obj.get("edges") is not None:
        edges = [edge_from_dict(inst, d) for d in obj["edges"]]
    return inst, edges


def dump_instance(instance: Instance, path, edges: Sequence[Hyperedge] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance, edges), fh, indent=1)
        fh.write("\n")
