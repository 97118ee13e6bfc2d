import math

import pytest

from sramf.generator import (GenConfig, clique_diagnostics, demand_supply_ratio, expected_clique_count, gen_instance,
                             setting1_like, setting2_like)
from sramf.model import validate_instance
from sramf.sharegraph import ShareabilityGraph, build_graph


def test_same_seed_same_instance():
    cfg = GenConfig(demand_mode="poisson")
    assert gen_instance(cfg, 3) == gen_instance(cfg, 3)
    assert gen_instance(cfg, 3) != gen_instance(cfg, 4)


@pytest.mark.parametrize("seed", range(20))
def test_generated_instances_validate(seed):
    cfg = GenConfig(n_A=5, K=3, partitions=2, demand_mode="poisson", cap_A=(1, 10))
    inst = gen_instance(cfg, seed)
    assert validate_instance(inst) == []
    assert all(r.passengers in (1, 2) for s in inst.scenarios for r in s.requests)


def test_demand_supply_ratio_recomputed():
    inst = gen_instance(GenConfig(n_A=6, n_B=4, K=2, N=3, demand=12), 0)
    assert demand_supply_ratio(inst) == pytest.approx(12 / 6)


def test_setting_shapes():
    s1 = setting1_like(n_A=20)
    assert (s1.n_B, s1.K, s1.cap_A, s1.cap_B) == (115, 5, (5, 10), (3, 3))
    s2 = setting2_like(K=60)
    assert (s2.cap_A, s2.cap_B, s2.K, s2.n_B) == ((3, 3), (2, 2), 60, 60)


def test_capacity_above_ten_rejected():
    with pytest.raises(ValueError):
        gen_instance(GenConfig(cap_A=(2, 11)), 0)


def test_expected_clique_formula():
    assert expected_clique_count(1000, 0.1, 3) == pytest.approx(math.comb(1000, 3) * 1e-3)
    assert expected_clique_count(10, 0.5, 2) == pytest.approx(45 * 0.5)


def test_incompatible_demand_is_degenerate():
    inst = gen_instance(GenConfig(), 1)
    rep = clique_diagnostics(inst, ShareabilityGraph(inst, []))
    assert rep["q"] == 0.0 and rep["degenerate"]


def test_diagnostics_report_observed_and_expected():
    inst = gen_instance(GenConfig(grid_size=5, demand=10), 2)
    rep = clique_diagnostics(inst, build_graph(inst))
    assert 0 < rep["q"] < 1
    assert rep["expected"][2] == pytest.approx(math.comb(10, 2) * rep["q"])
    assert rep["max_clique_window"] == pytest.approx(2 * math.log(10) / math.log(1 / rep["q"]))
