import json
import math

import pytest

from sramf.model import (AUGMENTED, BASIS, Instance, InstanceError, Request, Scenario, TravelModel, Vehicle,
                         dump_instance, hyperedge_value, instance_from_dict, instance_to_dict, load_instance,
                         validate_instance)
from sramf.fixtures import nonsubmodular_example
from sramf.generator import GenConfig, gen_instance


def _inst(**kw):
    v = (Vehicle("a", AUGMENTED, 2, (0, 0)), Vehicle("b", BASIS, 3, (1, 1)))
    r = (Request("r0", (0, 0), (2, 0), 1, 3.0, {"A": 0.5}),)
    args = dict(vehicles=v, scenarios=(Scenario(0, r),), K=1)
    args.update(kw)
    return Instance(**args)


def test_p_is_max_capacity_plus_one():
    assert _inst().p == 4


def test_value_combines_profit_bonus_and_cost():
    inst = _inst()
    r = inst.scenarios[0].requests
    assert hyperedge_value(inst.vehicles[0], r, 1.25) == pytest.approx(3.0 + 0.5 - 1.25)
    assert hyperedge_value(inst.vehicles[1], r, 1.25) == pytest.approx(3.0 - 1.25)


def test_value_rejects_empty_trip():
    with pytest.raises(ValueError):
        hyperedge_value(_inst().vehicles[0], [], 0.0)


def test_valid_instance_has_no_problems():
    assert validate_instance(_inst()) == []


def test_budget_above_augmented_count_is_reported():
    assert any("K <=" in p for p in validate_instance(_inst(K=2)))


def test_zero_passenger_request_is_reported():
    bad = _inst(scenarios=(Scenario(0, (Request("r", (0, 0), (1, 0), 0, 1.0),)),))
    assert any("passengers >= 1" in p for p in validate_instance(bad))


def test_manhattan_time_respects_speed():
    tm = TravelModel(speed=2.0)
    assert tm.time((0, 0), (3, 1)) == 2.0


def test_json_roundtrip_preserves_instance(tmp_path):
    inst = gen_instance(GenConfig(partitions=2), 3)
    path = tmp_path / "i.json"
    dump_instance(inst, path)
    back, edges = load_instance(path)
    assert back == inst
    assert edges is None


def test_infinite_bounds_serialise_as_null():
    d = instance_to_dict(_inst())
    assert d["scenarios"][0][0]["max_wait"] is None
    assert math.isinf(instance_from_dict(d).scenarios[0].requests[0].max_wait)


def test_embedded_edges_roundtrip(tmp_path):
    inst, g = nonsubmodular_example()
    path = tmp_path / "f.json"
    dump_instance(inst, path, g.edges)
    back, edges = load_instance(path)
    assert sorted(e.key for e in edges) == sorted(e.key for e in g.edges)


def test_malformed_file_raises_instance_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"vehicles": [{"id": "x"}]}))
    with pytest.raises(InstanceError):
        load_instance(path)
