"""
Lower bound via the button problem
==================================

With buttons priced 1..J and a prediction pointing at the last one, a
(1 + lambda)-consistent randomized strategy has a robustness ratio that
an explicit dual solution bounds from below.  For small J we can also
solve the primal LP exactly and see the gap close.
"""

from fractions import Fraction

from skirent.button_lp import (
    build_certificate,
    build_primal,
    certificate_ratio,
    ratio_limit,
    scale_to_d1,
    solve_primal_exact,
    verify_d2_feasibility,
)

lam = Fraction(1, 2)
cert = build_certificate(10, lam)
print("J = 10: ell =", cert.ell, "v_hat =", cert.v_hat, "w =", cert.w)
print("  D2 feasible:", verify_d2_feasibility(cert).feasible,
      "| scaled D1 feasible:", scale_to_d1(cert).report.feasible)

print("\n  J   certificate   primal optimum")
for J in (2, 4, 6, 8, 10, 12):
    gamma, _ = solve_primal_exact(build_primal(J, lam))
    print(f"{J:3d}   {float(certificate_ratio(J, lam)):.5f}       {float(gamma):.5f}")

for J in (10**2, 10**3, 10**4, 10**5):
    print(f"J = {J:>6}: ratio {float(certificate_ratio(J, lam)):.6f}  -> limit {float(ratio_limit(lam)):.6f}")
