"""Hand-built instances with known answers."""

from __future__ import annotations

from .model import AUGMENTED, Hyperedge, Instance, Request, Scenario, TravelModel, Vehicle
from .sharegraph import ShareabilityGraph


def nonsubmodular_example(K: int = 3) -> tuple[Instance, ShareabilityGraph]:
    """Three capacity-2 augmented vehicles, three unit-value requests, one scenario.

    Vehicle s1 can carry d1 alone or d2 and d3 together; s2 only d2; s3 only
    d3.  Adding s2 or s3 to {s1} gains nothing, adding both gains 1, so the
    exact second-stage value is not submodular in the selection.
    The edge list is fixed by hand rather than derived from travel times.
    """
    origin = (0.0, 0.0)
    vehicles = tuple(Vehicle(f"s{q}", AUGMENTED, 2, origin) for q in (1, 2, 3))
    requests = tuple(Request(f"d{q}", origin, origin, 1, 1.0) for q in (1, 2, 3))
    inst = Instance(vehicles, (Scenario(0, requests),), K, None, TravelModel(cost_rate=0.0))
    edges = [
        Hyperedge(0, 0, (0,), 1.0),
        Hyperedge(0, 0, (1, 2), 2.0),
        Hyperedge(0, 1, (1,), 1.0),
        Hyperedge(0, 2, (2,), 1.0),
    ]
    return inst, ShareabilityGraph(inst, edges)
