import io
import math
from fractions import Fraction

import pytest

from skirent.algorithms import RandParams, execute_plan, prepare_rand, rand_plan
from skirent.evaluator import (
    CSV_COLUMNS,
    AlgorithmConfig,
    alpha_segments,
    consistency_ratio,
    csv_text,
    expected_cost_profile,
    exact_expected_cost,
    monte_carlo_expected_cost,
    report_rows,
    robustness_ratio,
)
from skirent.generators import geometric_options, random_instance
from skirent.tradeoff import chi, rho

from oracles import quadrature_expected_cost


def test_probabilities_sum_to_one(classic4):
    _, bd = exact_expected_cost(classic4, 8, RandParams(math.e, 1.0), 10)
    assert math.fsum(bd.probabilities) == pytest.approx(1.0, abs=1e-12)
    assert bd.breakpoints[0] == 1.0 and bd.breakpoints[-1] == math.e
    assert list(bd.breakpoints) == sorted(bd.breakpoints)


@pytest.mark.parametrize("s", [0, 0.5, 1, 3])
def test_segments_are_constant(s):
    inst = random_instance(3)
    table, params = prepare_rand(inst, 9, math.e**1.5, s)
    segs = alpha_segments(table, params, 9, inst.horizon, check=True)
    for seg in segs:
        # sample a few interior points on a log scale
        for f in (0.1, 0.3, 0.7, 0.9):
            a = math.exp(math.log(seg.lo) + f * (math.log(seg.hi) - math.log(seg.lo)))
            trace = execute_plan(table, rand_plan(params, a, 9), inst.horizon)
            assert trace.total_cost == pytest.approx(seg.trace.total_cost, rel=1e-12)


@pytest.mark.parametrize("seed, t_pred, T, delta, s", [
    (0, 5, 12, math.e, 0.5),
    (4, 20, 7, math.e**2, 1.5),
    (9, 1, 30, math.e**3, 0),
    (11, 14, 14, math.e, 3),
])
def test_exact_matches_quadrature(seed, t_pred, T, delta, s):
    inst = random_instance(seed)
    T = min(T, inst.horizon)
    t_pred = min(t_pred, inst.horizon)
    table, params = prepare_rand(inst, t_pred, delta, s)
    exact = exact_expected_cost(table.instance, t_pred, params, T)[0]

    def cost(a):
        return float(execute_plan(table, rand_plan(params, min(a, math.nextafter(delta, 0)), t_pred), T).total_cost)

    # piecewise-constant integrand: midpoint error is O(jumps / n)
    approx = quadrature_expected_cost(cost, delta, n=4000)
    assert exact == pytest.approx(approx, rel=5e-3)


def test_monte_carlo_agrees(classic4):
    params = RandParams(math.e, 1.0)
    exact = exact_expected_cost(classic4, 8, params, 10)[0]
    assert exact == pytest.approx(22.0253, abs=1e-4)  # frozen from the oracle
    mean, err = monte_carlo_expected_cost(classic4, 8, params, 10, 20000, seed=1)
    assert abs(mean - exact) <= 4 * err
    one, zero_err = monte_carlo_expected_cost(classic4, 8, params, 10, 1, seed=1)
    assert zero_err == 0.0


def test_monte_carlo_is_seeded(classic4):
    params = RandParams(math.e**2, 0.5)
    a = monte_carlo_expected_cost(classic4, 3, params, 6, 500, seed=9)
    b = monte_carlo_expected_cost(classic4, 3, params, 6, 500, seed=9)
    assert a == b


def test_profile_matches_single_runs():
    inst = geometric_options(2, 4)
    Ts = [1, 5, 16, 32]
    _, _, prof = expected_cost_profile(inst, 10, RandParams(math.e, 1.0), Ts)
    for T in Ts:
        single = exact_expected_cost(inst, 10, RandParams(math.e, 1.0), T)[0]
        assert prof[T].expected == pytest.approx(single, rel=1e-12)


def test_det_reports_are_exact(classic4):
    cfg = AlgorithmConfig.det(Fraction(1, 2))
    worst, reports = robustness_ratio(cfg, classic4, 8, range(1, 17))
    assert isinstance(worst.ratio, Fraction)
    assert worst.ratio == Fraction(7, 4)  # T = 4: paid 1 + 2 + 4 for OPTVAL 4
    assert consistency_ratio(cfg, classic4, 8).ratio == Fraction(7, 4)
    assert reports[1].expected_cost == 2


def test_rand_reports_within_bounds(classic4):
    cfg = AlgorithmConfig.rand(math.e, 1.0)
    worst, _ = robustness_ratio(cfg, classic4, 8, range(1, 17))
    assert worst.ratio <= rho(math.e, 1.0)
    assert consistency_ratio(cfg, classic4, 8).ratio <= chi(math.e, 1.0)


def test_csv_rows(classic4):
    cfg = AlgorithmConfig.det(Fraction(1, 4))
    _, reports = robustness_ratio(cfg, classic4, 4, [3, 4])
    rows = report_rows("classic-B4", cfg, 4, reports)
    text = csv_text(rows, comment="demo")
    lines = text.splitlines()
    assert lines[0] == "# demo"
    assert lines[1] == ",".join(CSV_COLUMNS)
    first = lines[2].split(",")
    assert first[:5] == ["classic-B4", "1/4", "", "3", "4"]
    # T = 3 gets the robustness bound 16/3, T = 4 the consistency bound 4/3
    assert float(first[8]) == pytest.approx(16 / 3)
    assert float(lines[3].split(",")[8]) == pytest.approx(4 / 3)


def test_range_checks(classic4):
    with pytest.raises(ValueError):
        robustness_ratio(AlgorithmConfig.det(Fraction(1, 2)), classic4, 8, [0])
    with pytest.raises(ValueError):
        monte_carlo_expected_cost(classic4, 8, RandParams(math.e, 0), 3, 0, seed=0)


def test_single_sample_is_a_single_run(classic4):
    params = RandParams(math.e, 1.0)
    mean, _ = monte_carlo_expected_cost(classic4, 8, params, 10, 1, seed=4)
    table, p = prepare_rand(classic4, 8, math.e, 1.0)
    import numpy as np
    from skirent.algorithms import sample_alphas
    alpha = float(sample_alphas(np.random.default_rng(4), math.e, 1)[0])
    assert mean == float(execute_plan(table, rand_plan(p, alpha, 8), 10).total_cost)


def test_two_seeds_are_compatible(classic4):
    params = RandParams(math.e**1.5, 0.5)
    a, ea = monte_carlo_expected_cost(classic4, 6, params, 12, 20000, seed=1)
    b, eb = monte_carlo_expected_cost(classic4, 6, params, 12, 20000, seed=2)
    assert a != b
    assert abs(a - b) <= 4 * math.hypot(ea, eb)


def test_expected_cost_at_zero(classic4):
    cost, _ = exact_expected_cost(classic4, 8, RandParams(math.e, 0.0), 0)
    assert cost == 0


def test_classic_consistency_below_e(classic4):
    cost, _ = exact_expected_cost(classic4, 8, RandParams(math.e, 0.0), 8)
    assert cost <= math.e * math.e**2  # rescaled OPTVAL(8) is e^2


def test_lambda_zero_ratio_is_one(classic4):
    assert consistency_ratio(AlgorithmConfig.det(0), classic4, 7).ratio == 1
