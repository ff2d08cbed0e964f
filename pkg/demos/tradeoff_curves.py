"""
Trade-off curves
================

Consistency/robustness pairs of the deterministic and randomized
algorithms next to the lower bounds and previously published curves.
The same rows are written by ``skirent curves``.
"""

import math

import numpy as np

from skirent.tradeoff import (
    LAMBDA_STAR,
    chi,
    curve_rows,
    pareto_front,
    rand_lower_bound,
    rho,
    thm4_params,
)

front = pareto_front(np.exp(np.linspace(1, 4, 61)), np.linspace(0, 6, 241))
print(f"randomized Pareto front: {len(front)} points")
for p in front[:: max(1, len(front) // 8)]:
    d, s = p.params
    print(f"  delta = e^{math.log(d):.2f}, s = {s:.3f}:  ({p.consistency:.4f}, {p.robustness:.4f})")

print(f"\nlambda* = {LAMBDA_STAR:.6f}")
for lam in (0.01, 0.05, 0.08):
    d, s = thm4_params(lam)
    print(f"  lambda = {lam}: consistency {chi(d, s):.4f}, robustness {rho(d, s):.3f}, "
          f"lower bound {rand_lower_bound(lam):.3f}")

rows = curve_rows()
print("\nrows per family:", {c: sum(r[0] == c for r in rows) for c in sorted({r[0] for r in rows})})
