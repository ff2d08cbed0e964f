import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from skirent.instance import (
    INF,
    Instance,
    InstanceError,
    RentalOption,
    bopt,
    budget_ge,
    build_opt_table,
    log_ceil,
    normalize_costs,
    opt_schedule,
    options_from_pairs,
    rescale_for_det,
    rescale_for_rand,
)

from oracles import brute_force_optval


def small_instances():
    finite = st.tuples(st.integers(1, 5), st.fractions(Fraction(1, 4), 6, max_denominator=8))
    buy = st.fractions(Fraction(1, 2), 20, max_denominator=8)
    return st.builds(
        lambda fin, b, h, with_buy: Instance(
            options_from_pairs(fin + ([(INF, b)] if with_buy else [])), h),
        st.lists(finite, min_size=1, max_size=3),
        buy,
        st.integers(1, 12),
        st.booleans(),
    )


def test_classic_table(classic4):
    table = build_opt_table(classic4)
    assert [table.value(t) for t in range(7)] == [0, 1, 2, 3, 4, 4, 4]
    assert table.value(INF) == 4
    assert opt_schedule(table, 3).options == (0, 0, 0)
    # renting 4 days ties with buying; the smaller option index wins
    assert opt_schedule(table, 4).options == (0, 0, 0, 0)
    assert opt_schedule(table, 5).options == (1,)


def test_bopt_examples(classic4):
    table = build_opt_table(classic4)
    assert bopt(table, Fraction(5, 2)).options == (0, 0)
    assert bopt(table, 4).options == (1,)
    assert bopt(table, 4).covered_days == INF
    assert bopt(table, Fraction(1, 2)).is_empty
    assert bopt(table, 4 - 1e-13).options == (1,)  # float tolerance
    assert bopt(table, 4 - 1e-9).options == (0, 0, 0)


def test_schedule_is_chronological():
    inst = Instance(options_from_pairs([(1, 1), (3, Fraction(5, 2)), (INF, 10)]), 12)
    table = build_opt_table(inst)
    sched = table.schedule(4)
    assert sched.total_cost == Fraction(7, 2)
    assert sorted(sched.options) == [0, 1]
    assert sched.covered_days >= 4


def test_no_buy_option_grows_on_demand():
    inst = Instance(options_from_pairs([(2, 3), (5, 7)]), 6)
    table = build_opt_table(inst)
    assert table.buy_cost is None
    t_star = table.max_days_within(100)
    assert t_star == 71  # 13 five-day passes and 3 two-day passes
    assert brute_force_optval(inst.options, 71) <= 100 < brute_force_optval(inst.options, 72)
    with pytest.raises(InstanceError):
        table.value(INF)


def test_bad_inputs(classic4):
    with pytest.raises(InstanceError):
        RentalOption(0, 1)
    with pytest.raises(InstanceError):
        RentalOption(1, -1)
    with pytest.raises(InstanceError):
        Instance((), 3)
    table = build_opt_table(classic4)
    with pytest.raises(InstanceError):
        opt_schedule(table, classic4.horizon + 1)
    with pytest.raises(InstanceError):
        bopt(table, -1)


def test_normalize_costs():
    inst = Instance(options_from_pairs([(1, Fraction(1, 4)), (INF, 2)]), 10)
    scaled, factor = normalize_costs(inst)
    assert factor == 4
    assert [o.cost for o in scaled.options] == [1, 8]
    same, factor = normalize_costs(scaled)
    assert same is scaled and factor == 1


def test_rescale_for_det_examples(classic4):
    inst, k = rescale_for_det(classic4, 8, Fraction(1, 2))
    assert (k, build_opt_table(inst).value(8)) == (2, 4)
    assert inst is classic4
    inst, k = rescale_for_det(classic4, 3, Fraction(1, 4))
    # OPTVAL(3) = 3 rises to 4**1
    assert k == 1
    assert build_opt_table(inst).value(3) == 4
    assert [o.cost for o in inst.options] == [Fraction(4, 3), Fraction(16, 3)]


def test_rescale_for_rand(classic4):
    inst, k = rescale_for_rand(classic4, 8, math.e, 0)
    assert k == 2
    assert build_opt_table(inst).value(8) == pytest.approx(math.e**2, rel=1e-14)
    # already a power of delta: left alone
    again, k2 = rescale_for_rand(inst, 8, math.e, 0)
    assert k2 == 2
    inst, k = rescale_for_rand(classic4, 8, math.e, 2.5)
    assert k == 5


def test_log_ceil_snaps():
    assert log_ceil(2.0000000001) == 2
    assert log_ceil(2.01) == 3
    assert log_ceil(-0.5) == 0


def test_budget_ge():
    assert budget_ge(Fraction(3), 3)
    assert budget_ge(3 - 1e-13, 3)
    assert not budget_ge(3 - 1e-10, 3)


def test_json_round_trip():
    inst = Instance(options_from_pairs([(1, Fraction(3, 7)), (4, 2.5), (INF, 9)]), 11)
    data = json.loads(inst.to_json())
    assert data["options"][2]["days"] == "inf"
    back = Instance.from_json(inst.to_json())
    assert back == inst
    assert isinstance(back.options[0].cost, Fraction)


@settings(max_examples=150, deadline=None)
@given(small_instances())
def test_dp_matches_brute_force(inst):
    table = build_opt_table(inst)
    for t in range(inst.horizon + 1):
        assert table.value(t) == brute_force_optval(inst.options, t)
        sched = table.schedule(t)
        assert sched.total_cost == table.value(t)
        assert sched.covered_days >= t


@settings(max_examples=100, deadline=None)
@given(small_instances())
def test_optval_monotone(inst):
    table = build_opt_table(inst)
    vals = [table.value(t) for t in range(inst.horizon + 1)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=100, deadline=None)
@given(small_instances(), st.fractions(0, 30, max_denominator=16))
def test_bopt_is_maximal(inst, budget):
    table = build_opt_table(inst)
    sched = bopt(table, budget)
    assert sched.total_cost <= budget
    t_star = table.max_days_within(budget)
    if t_star != INF:
        assert table.value(t_star + 1) > budget
        if table.buy_cost is not None:
            assert table.buy_cost > budget


@settings(max_examples=100, deadline=None)
@given(small_instances(), st.fractions(0, 20, max_denominator=8), st.fractions(0, 20, max_denominator=8))
def test_bopt_monotone_in_budget(inst, a, b):
    table = build_opt_table(inst)
    lo, hi = sorted((a, b))
    assert bopt(table, lo).covered_days <= bopt(table, hi).covered_days


@settings(max_examples=80, deadline=None)
@given(small_instances(), st.fractions(Fraction(1, 3), 9, max_denominator=9))
def test_scaling_preserves_choices(inst, factor):
    a, b = build_opt_table(inst), build_opt_table(inst.scaled(factor))
    for t in range(inst.horizon + 1):
        assert b.value(t) == factor * a.value(t)
        assert b.schedule(t).options == a.schedule(t).options


@pytest.mark.parametrize("pairs, scale, expected", [
    ([(1, Fraction(1, 2)), (INF, 2)], 2, [1, 4]),
    ([(1, 1), (INF, 4)], 1, [1, 4]),
    ([(3, Fraction(1, 3)), (7, Fraction(5, 6))], 3, [1, Fraction(5, 2)]),
])
def test_normalization_examples(pairs, scale, expected):
    inst, factor = normalize_costs(Instance(options_from_pairs(pairs), 5))
    assert factor == scale
    assert [o.cost for o in inst.options] == expected


def test_classic_schedules(classic4):
    table = build_opt_table(classic4)
    assert table.value(0) == 0 and table.value(10) == 4
    assert table.schedule(0).is_empty and table.schedule(0).total_cost == 0
    assert table.schedule(2).options == (0, 0)
    assert table.schedule(6).options == (1,) and table.schedule(6).total_cost == 4


@pytest.mark.parametrize("t_pred, k, factor", [(8, 2, 1), (5, 2, 1), (3, 2, Fraction(4, 3))])
def test_rescale_for_det_table(classic4, t_pred, k, factor):
    inst, got_k = rescale_for_det(classic4, t_pred, Fraction(1, 2))
    assert got_k == k
    assert inst.options[1].cost == 4 * factor


def test_rescale_for_rand_power_already():
    e = math.e
    inst = Instance(options_from_pairs([(1, 1.0), (INF, e**6)]), 800)
    out, k = rescale_for_rand(inst, 700, e**2, 0)
    assert k == 3
    assert out.options[1].cost == pytest.approx(e**6, rel=1e-12)
    _, k = rescale_for_rand(Instance(options_from_pairs([(1, 1), (INF, 4)]), 16), 8, e, 3)
    assert k == 5
