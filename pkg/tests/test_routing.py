import math

import numpy as np
import pytest

from helpers import BACKEND_IDS, BACKENDS, route_oracle
from sramf.model import AUGMENTED, Request, TravelModel, Vehicle
from sramf.sharegraph import GraphOptions, RouteContractError, _insertion_route, min_cost_route


def _random_case(rng, k):
    pts = [tuple(map(float, rng.integers(0, 6, 2))) for _ in range(2 * k + 1)]
    T = TravelModel().matrix(pts)
    wait = rng.uniform(2, 12, k)
    ride = rng.uniform(2, 14, k)
    return T, wait, ride


@pytest.mark.parametrize("kern", BACKENDS, ids=BACKEND_IDS)
def test_route_search_matches_enumeration(kern):
    rng = np.random.default_rng(5)
    for _ in range(150):
        k = int(rng.integers(1, 5))
        T, wait, ride = _random_case(rng, k)
        d, seq = kern.route_search(T, wait, ride, k)
        want = route_oracle(T, wait, ride, k)
        if math.isinf(want):
            assert seq is None and math.isinf(d)
        else:
            assert d == pytest.approx(want, abs=1e-12)
            assert sorted(seq[:k]) == list(range(k)) and sorted(seq[k:]) == list(range(k))


def test_backends_agree_bitwise():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(11)
    py, cy = BACKENDS
    for _ in range(200):
        k = int(rng.integers(1, 6))
        T, wait, ride = _random_case(rng, k)
        assert py.route_search(T, wait, ride, k) == cy.route_search(T, wait, ride, k)


def test_pickup_deadline_is_strict():
    T = TravelModel().matrix([(0, 0), (2, 0), (5, 0)])
    assert BACKENDS[-1].route_search(T, np.array([2.0]), np.array([10.0]), 1)[1] is None
    assert BACKENDS[-1].route_search(T, np.array([2.0 + 1e-9]), np.array([10.0]), 1)[0] == 5.0


def test_ride_limit_is_strict():
    T = TravelModel().matrix([(0, 0), (0, 0), (3, 0)])
    assert BACKENDS[-1].route_search(T, np.array([1.0]), np.array([3.0]), 1)[1] is None


def test_plan_reports_times_and_cost():
    v = Vehicle("v", AUGMENTED, 2, (0, 0))
    reqs = [Request("a", (1, 0), (4, 0), 1, 5.0), Request("b", (2, 0), (3, 0), 1, 5.0)]
    plan = min_cost_route(v, reqs, TravelModel(cost_rate=0.5))
    assert plan.duration == 4.0 and plan.cost == 2.0
    assert plan.pickup_times == (1.0, 2.0)
    assert plan.ride_times == (3.0, 1.0)


def test_capacity_violation_is_a_contract_error():
    v = Vehicle("v", AUGMENTED, 1, (0, 0))
    reqs = [Request("a", (1, 0), (4, 0), 2, 5.0)]
    with pytest.raises(RouteContractError):
        min_cost_route(v, reqs, TravelModel())


def test_insertion_route_is_feasible_and_not_better_than_exact():
    rng = np.random.default_rng(2)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        T, wait, ride = _random_case(rng, k)
        d, seq = _insertion_route(T, wait, ride, k)
        exact = route_oracle(T, wait, ride, k)
        if seq is not None:
            assert d >= exact - 1e-12


def test_large_sets_can_be_skipped():
    v = Vehicle("v", AUGMENTED, 6, (0, 0))
    reqs = [Request(str(q), (q, 0), (q + 1, 0), 1, 5.0) for q in range(5)]
    assert min_cost_route(v, reqs, TravelModel(), GraphOptions(exact_route_limit=4, large_routes="skip")) is None
    plan = min_cost_route(v, reqs, TravelModel(), GraphOptions(exact_route_limit=4))
    assert plan is not None and plan.approximate
