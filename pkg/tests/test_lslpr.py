import itertools
import math

import pytest

from helpers import small_problem
from sramf.lslpr import LSOptions, default_epsilon, iteration_cap, run_lslpr
from sramf.packing import Evaluator
from sramf.fixtures import nonsubmodular_example


def test_epsilon_default():
    assert default_epsilon(3, 2) == pytest.approx(1 / 12)


def test_same_seed_same_run():
    inst, g = small_problem(1, n_A=6, K=2)
    a = run_lslpr(inst, g, LSOptions(seed=4))
    b = run_lslpr(inst, g, LSOptions(seed=4))
    assert a.selection == b.selection and a.report == b.report


@pytest.mark.parametrize("seed", range(15))
def test_each_swap_clears_the_threshold(seed):
    inst, g = small_problem(seed, n_A=6, K=2)
    res = run_lslpr(inst, g, LSOptions(seed=seed))
    eps = res.report["epsilon"]
    traj = res.report["vhat_trajectory"]
    for a, b in zip(traj, traj[1:]):
        assert b > (1 + eps) * a or (a <= 1e-9 < b)
    assert len(traj) == res.report["iterations"] + 1 <= res.report["k_max"] + 1


@pytest.mark.parametrize("seed", range(15))
def test_halting_state_is_a_local_optimum(seed):
    inst, g = small_problem(seed, n_A=6, K=2)
    res = run_lslpr(inst, g, LSOptions(seed=seed))
    if res.report["k_max_reached"]:
        pytest.skip("stopped by the iteration cap")
    ev = Evaluator(g)
    cur = res.report["vhat"]
    eps = res.report["epsilon"]
    for out in res.selection:
        for inn in set(inst.augmented) - res.selection:
            val = ev.vhat((res.selection - {out}) | {inn})
            assert not val > (1 + eps) * cur + (0 if cur > 1e-9 else 1e-9)


def test_iteration_cap_stops_with_flag():
    inst, g = small_problem(10, n_A=6, K=2, grid_size=4)
    assert run_lslpr(inst, g, LSOptions(seed=0)).report["iterations"] == 2
    res = run_lslpr(inst, g, LSOptions(seed=0, k_max=0))
    assert res.report["k_max_reached"] and res.report["iterations"] == 0


def test_iteration_cap_formula():
    inst, g = small_problem(3)
    eps = 0.01
    lo, hi = g.v_bounds()
    want = math.ceil(math.log(g.N * g.n_vehicles * hi / lo) / math.log(1 + eps)) + 1
    assert iteration_cap(g, eps) == want


def test_result_carries_greedy_assignments():
    inst, g = small_problem(5)
    res = run_lslpr(inst, g)
    assert len(res.assignments) == g.N
    assert res.integral_value == pytest.approx(math.fsum(a.value for a in res.assignments) / g.N)


def test_fixture_reaches_all_three_vehicles():
    inst, g = nonsubmodular_example()
    res = run_lslpr(inst, g)
    assert res.selection == {0, 1, 2}


@pytest.mark.parametrize("seed", range(10))
def test_fractional_floor_against_enumeration(seed):
    inst, g = small_problem(seed, n_A=5)
    ev = Evaluator(g)
    best = max(ev.vhat(s) for s in itertools.combinations(inst.augmented, inst.K))
    res = run_lslpr(inst, g, LSOptions(seed=seed), evaluator=ev)
    assert res.report["vhat"] >= best / (inst.p + 1) - 1e-9
