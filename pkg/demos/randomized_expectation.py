"""
Exact expected cost of the randomized algorithm
===============================================

The randomized algorithm draws a single alpha in [1, delta) with density
1/(alpha ln delta).  Its run only changes at finitely many alpha values,
so the expected cost is a finite weighted sum.  Here we compare that sum
with Monte-Carlo estimates.
"""

import math

import numpy as np

from skirent import RandParams, exact_expected_cost, monte_carlo_expected_cost, random_instance
from skirent.tradeoff import chi, rho

inst = random_instance(5)
print("menu:", [(o.duration, str(o.cost)) for o in inst.options], "horizon", inst.horizon)

params = RandParams(math.e**2, 0.5)
t_pred, T = 10, 30
exact, bd = exact_expected_cost(inst, t_pred, params, T)
print(f"{len(bd.costs)} alpha segments, probabilities sum to {math.fsum(bd.probabilities):.15f}")
print(f"exact expectation {exact:.6f}")

for n in (10**3, 10**4, 10**5):
    mean, err = monte_carlo_expected_cost(inst, t_pred, params, T, n, seed=1)
    print(f"  n = {n:>6}: {mean:.6f} +- {err:.6f}   z = {(mean - exact) / err:+.2f}")

# ratios against the bounds, over every true horizon T
from skirent import AlgorithmConfig, robustness_ratio

cfg = AlgorithmConfig.rand(params.delta, params.s)
worst, reports = robustness_ratio(cfg, inst, t_pred, range(1, inst.horizon + 1))
print(f"worst ratio {worst.ratio:.4f} at T = {worst.T}; rho = {rho(params.delta, params.s):.4f}")
print(f"ratio at T = T_pred: {reports[t_pred - 1].ratio:.4f}; chi = {chi(params.delta, params.s):.4f}")
print("ratio profile:", np.round([r.ratio for r in reports[::5]], 3))
