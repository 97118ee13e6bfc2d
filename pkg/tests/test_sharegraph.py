import itertools

import pytest

from helpers import small_problem
from sramf.model import Hyperedge
from sramf.sharegraph import (GraphOptions, GraphSizeError, ShareabilityGraph, brute_force_graph, build_graph,
                              check_graph, min_cost_route, read_graph_jsonl, write_graph_jsonl)
from sramf.fixtures import nonsubmodular_example


def _same(a, b):
    ea, eb = a.edge_set(), b.edge_set()
    return ea.keys() == eb.keys() and all(abs(ea[k] - eb[k]) <= 1e-9 for k in ea)


@pytest.mark.parametrize("seed", range(12))
def test_levelwise_equals_exhaustive(seed):
    inst, g = small_problem(seed, demand=7)
    assert _same(g, brute_force_graph(inst))


def test_only_feasible_subsets_are_extended():
    inst, _ = small_problem(3, demand=8, grid_size=4)
    trace = []
    build_graph(inst, trace=trace)
    reqs = {l: inst.scenarios[l].requests for l in range(inst.N)}
    seen = set(trace)
    assert len(seen) == len(trace)
    for l, i, J in trace:
        if len(J) < 2:
            continue
        for sub in itertools.combinations(J, len(J) - 1):
            assert (l, i, sub) in seen
            assert min_cost_route(inst.vehicles[i], [reqs[l][j] for j in sub], inst.travel) is not None


def test_stored_edges_are_positive_and_within_capacity():
    inst, g = small_problem(4)
    assert check_graph(g, reroute=True) == []


def test_parallel_build_matches_serial():
    inst, g = small_problem(6, N=3)
    assert _same(g, build_graph(inst, GraphOptions(jobs=2)))


def test_capacity_corruption_is_named():
    inst, _ = nonsubmodular_example()
    bad = ShareabilityGraph(inst, [Hyperedge(0, 1, (0, 1, 2), 3.0)])
    assert [name for name, _ in check_graph(bad)] == ["capacity"]


def test_nonpositive_value_is_named():
    inst, _ = nonsubmodular_example()
    bad = ShareabilityGraph(inst, [Hyperedge(0, 1, (0,), 0.0)])
    assert [name for name, _ in check_graph(bad)] == ["positive-value"]


def test_jsonl_roundtrip(tmp_path):
    inst, g = small_problem(8)
    path = tmp_path / "g.jsonl"
    write_graph_jsonl(g, path)
    assert _same(g, read_graph_jsonl(inst, path))


def test_brute_force_refuses_large_scenarios():
    inst, _ = small_problem(1, demand=14)
    with pytest.raises(GraphSizeError):
        brute_force_graph(inst, cap=12)


def test_incidence_lists_cover_every_edge():
    inst, g = small_problem(9)
    for idx, e in enumerate(g.edges):
        assert idx in g.F[(e.vehicle, e.scenario)]
        assert all(idx in g.H[(e.scenario, j)] for j in e.requests)
        assert idx in g.vehicle_edges(e.vehicle)
