"""
Deterministic algorithm: consistency against robustness
=======================================================

The deterministic algorithm doubles (or rather multiplies by 1/lambda)
its budget each round, after scaling costs so the predicted optimum sits
exactly on a budget.  We measure its worst ratios on the classic
two-option problem and compare with the guarantees.
"""

from fractions import Fraction

from skirent import AlgorithmConfig, classic_two_option, consistency_ratio, robustness_ratio
from skirent.tradeoff import det_tradeoff

inst = classic_two_option(10)           # rent 1 per day or buy for 10
H = inst.horizon

print(" lambda  consistency (bound)    robustness (bound)")
for lam in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)):
    cfg = AlgorithmConfig.det(lam)
    worst_c = max(consistency_ratio(cfg, inst, tp).ratio for tp in range(1, H + 1))
    worst_r = max(robustness_ratio(cfg, inst, tp, range(1, H + 1))[0].ratio for tp in range(1, H + 1))
    bound = det_tradeoff(lam)
    print(f"{str(lam):>7}  {float(worst_c):6.3f} ({float(bound.consistency):6.3f})"
          f"      {float(worst_r):6.3f} ({float(bound.robustness):6.3f})")

# A single run, step by step
from skirent.algorithms import run_det

trace, table = run_det(inst, 8, Fraction(1, 2), 25)
for p in trace.purchases:
    print(f"  step {p.step}: day {p.day:2d} option {p.option} cost {p.cost}")
print("total", trace.total_cost, "vs OPTVAL", table.value(25))
