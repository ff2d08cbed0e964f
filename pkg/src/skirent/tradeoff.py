"""Consistency/robustness curves, lower bounds, and numeric checks of the analytic lemmas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

E = math.e


@dataclass(frozen=True)
class TradeoffPoint:
    consistency: float
    robustness: float
    curve: str
    params: tuple = ()


def _check_rand_domain(delta, s):
    if not delta >= E or not s >= 0:
        raise ValueError(f"need delta >= e and s >= 0, got delta={delta}, s={s}")


def chi(delta: float, s: float) -> float:
    _check_rand_domain(delta, s)
    L = math.log(delta)
    if s > 1:
        return 1 + delta**-s / L
    return (delta + 1) / L * delta**-s + s - 1 / L


def rho(delta: float, s: float) -> float:
    _check_rand_domain(delta, s)
    z = delta**-s
    return delta / (E * math.log(delta)) * math.exp(z) / z


def det_tradeoff(lam) -> TradeoffPoint:
    """(1/(1-lam), 1/(lam(1-lam))); exact when ``lam`` is rational."""
    if isinstance(lam, (int, Fraction)):
        lam = Fraction(lam)
    if not 0 < lam <= 0.5:
        raise ValueError(f"lambda must lie in (0, 1/2], got {lam}")
    return TradeoffPoint(1 / (1 - lam), 1 / (lam * (1 - lam)), "ours-det", (lam,))


def det_lower_bound(c):
    """Robustness lower bound c^2/(c-1) for c-consistent deterministic algorithms."""
    return c * c / (c - 1)


def _lambda_star_residual(lam: float) -> float:
    return (lam + 1) / 2 * math.log(2 * lam / (lam + 1)) + 1


def lambda_star(lo: float = 1e-6, hi: float = 0.5, tol: float = 1e-12) -> float:
    """Root of (lam+1)/2 * ln(2 lam/(lam+1)) = -1 by bisection."""
    f_lo, f_hi = _lambda_star_residual(lo), _lambda_star_residual(hi)
    if f_lo * f_hi > 0:
        raise ValueError("bracket does not straddle the root")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        f_mid = _lambda_star_residual(mid)
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return (lo + hi) / 2


LAMBDA_STAR = lambda_star()


def thm4_params(lam: float) -> tuple[float, float]:
    """(delta, s) achieving consistency 1 + lam for small lam."""
    if not 0 < lam < LAMBDA_STAR:
        raise ValueError(f"lambda must lie in (0, {LAMBDA_STAR:.6f}), got {lam}")
    delta = math.exp(2 / (lam + 1))
    s = -(lam + 1) / 2 * math.log(2 * lam / (lam + 1))
    return delta, s


def thm4_robustness(lam: float) -> float:
    return E * (1 + lam) ** 2 / (4 * lam)


def rand_lower_bound(lam: float) -> float:
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return max((1 + lam) ** 2 / (2 * lam), E)


def rand_lower_bound_crossovers() -> tuple[float, float]:
    """Roots of lam^2 + (2 - 2e) lam + 1 = 0, where (1+lam)^2/(2 lam) = e."""
    b = 2 - 2 * E
    disc = math.sqrt(b * b - 4)
    return (-b - disc) / 2, (-b + disc) / 2


def shin_rand_consistency(lam: float) -> float:
    if lam < 1 / E:
        return 1 + lam
    return (E + 1) * lam - math.log(lam) - 1


def prior_work_curves(lam: float) -> list[TradeoffPoint]:
    """Previously published deterministic and randomized trade-offs at ``lam``."""
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    return [
        TradeoffPoint(max(1 + 2 * lam, 4 * lam), 2 + 2 / lam, "shin-det", (lam,)),
        TradeoffPoint(shin_rand_consistency(lam), math.exp(lam) / lam, "shin-rand", (lam,)),
    ]


def rand_points(deltas: Iterable[float], ss: Iterable[float]) -> list[TradeoffPoint]:
    ss = list(ss)
    return [TradeoffPoint(chi(d, s), rho(d, s), "ours-rand", (d, s)) for d in deltas for s in ss]


def pareto_filter(points: Iterable[TradeoffPoint]) -> list[TradeoffPoint]:
    """Non-dominated points (minimizing both coordinates), sorted by consistency."""
    pts = sorted(points, key=lambda p: (p.consistency, p.robustness))
    front: list[TradeoffPoint] = []
    best_rho = math.inf
    for p in pts:
        if p.robustness < best_rho:
            if front and front[-1].consistency == p.consistency:
                continue  # same chi, larger rho than an earlier point
            front.append(p)
            best_rho = p.robustness
    return front


def pareto_front(deltas: Iterable[float], ss: Iterable[float]) -> list[TradeoffPoint]:
    return [
        TradeoffPoint(p.consistency, p.robustness, "ours-rand-front", p.params)
        for p in pareto_filter(rand_points(deltas, ss))
    ]


# -- analytic lemmas ----------------------------------------------------------


@dataclass
class LemmaCheck:
    name: str
    points: int
    max_violation: float  # positive means the inequality failed by this much (relative)

    @property
    def ok(self) -> bool:
        return self.max_violation <= 1e-12


@dataclass
class LemmaReport:
    checks: list[LemmaCheck]
    maximizer_error: float  # max relative |g(z0) - rho| for the first lemma

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks) and self.maximizer_error <= 1e-9


def rho_array(delta, s):
    z = delta**-s
    return delta / (E * np.log(delta)) * np.exp(z) / z


def _rel_excess(lhs, rhs):
    """How far lhs exceeds rhs, relative to max(1, |rhs|)."""
    return np.max((lhs - rhs) / np.maximum(1.0, np.abs(rhs)), initial=-np.inf)


def default_lemma_grid(n_delta: int = 61, n_s: int = 81, n_z: int = 161):
    deltas = np.exp(np.linspace(1.0, 4.0, n_delta))
    ss = np.linspace(0.0, 4.0, n_s)
    zs = np.linspace(0.0, 4.0, n_z)[1:]
    return deltas, ss, zs


def verify_analytic_lemmas(grid=None) -> LemmaReport:
    """Evaluate each robustness-analysis inequality pointwise on a (delta, s, z) grid."""
    deltas, ss, zs = default_lemma_grid() if grid is None else grid
    D, S = np.meshgrid(np.asarray(deltas, float), np.asarray(ss, float), indexing="ij")
    L = np.log(D)
    R = rho_array(D, S)
    checks = []

    # g(z) = delta^z/ln delta + (1 - z) delta^(z+s) <= rho, for s > 0
    pos = S > 0
    D3, S3, Z3 = D[pos][:, None], S[pos][:, None], np.asarray(zs, float)[None, :]
    g = D3**Z3 / np.log(D3) + (1 - Z3) * D3 ** (Z3 + S3)
    checks.append(LemmaCheck("g(z) <= rho", g.size, _rel_excess(g, R[pos][:, None])))
    z0 = 1 + (D[pos] ** -S[pos] - 1) / L[pos]
    g0 = D[pos] ** z0 / L[pos] + (1 - z0) * D[pos] ** (z0 + S[pos])
    max_err = float(np.max(np.abs(g0 - R[pos]) / R[pos]))

    # e^(z-1) - z^2 + z ln z >= 0
    z = np.asarray(zs, float)
    h = np.exp(z - 1) - z * z + z * np.log(z)
    checks.append(LemmaCheck("e^(z-1) - z^2 + z ln z >= 0", h.size, float(np.max(-h))))

    # delta^(1-s)/ln delta + s delta <= rho, for s > 0
    lhs = D[pos] ** (1 - S[pos]) / L[pos] + S[pos] * D[pos]
    checks.append(LemmaCheck("delta^(1-s)/ln delta + s delta <= rho", lhs.size, _rel_excess(lhs, R[pos])))

    # 1/ln delta + delta^s <= rho
    lhs = 1 / L + D**S
    checks.append(LemmaCheck("1/ln delta + delta^s <= rho", lhs.size, _rel_excess(lhs, R)))

    # (delta+1)/ln delta + s delta^s - delta^s/ln delta <= rho, for 0 <= s <= 1
    low = S <= 1
    Dl, Sl, Ll = D[low], S[low], L[low]
    lhs = (Dl + 1) / Ll + Sl * Dl**Sl - Dl**Sl / Ll
    checks.append(LemmaCheck("(delta+1)/ln delta + s delta^s - delta^s/ln delta <= rho",
                             lhs.size, _rel_excess(lhs, R[low])))

    # (delta + delta^-s + min(s,1) ln delta - 1)/ln delta <= rho
    lhs = (D + D**-S + np.minimum(S, 1) * L - 1) / L
    checks.append(LemmaCheck("(delta + delta^-s + min(s,1) ln delta - 1)/ln delta <= rho",
                             lhs.size, _rel_excess(lhs, R)))

    return LemmaReport(checks, max_err)


# -- CSV curves ---------------------------------------------------------------

CURVE_IDS = ("ours-det", "ours-rand-front", "thm4", "det-lb", "rand-lb",
             "trivial-e-lb", "shin-det", "shin-rand")


def curve_rows(n: int = 50, lam_max_rand: float = 0.999) -> list[tuple]:
    """Rows ``(curve_id, param1, param2, consistency, robustness)`` for all curve families.

    Lower-bound families carry the consistency 1 + lam and the bound as robustness.
    """
    rows = []
    det_lams = [Fraction(k, 100) for k in range(1, 51)]
    for lam in det_lams:
        p = det_tradeoff(lam)
        rows.append(("ours-det", float(lam), "", float(p.consistency), float(p.robustness)))
        c = p.consistency
        rows.append(("det-lb", float(lam), "", float(c), float(det_lower_bound(c))))

    deltas = np.exp(np.linspace(1.0, 4.0, 61))
    ss = np.linspace(0.0, 6.0, 241)
    for p in pareto_front(deltas, ss):
        rows.append(("ours-rand-front", p.params[0], p.params[1], p.consistency, p.robustness))

    ls = LAMBDA_STAR
    for lam in np.linspace(0.001, ls, n, endpoint=False):
        d, s = thm4_params(float(lam))
        rows.append(("thm4", d, s, chi(d, s), rho(d, s)))

    for lam in sorted({0.1, *map(float, np.linspace(0.01, lam_max_rand, n))}):
        rows.append(("rand-lb", lam, "", 1 + lam, rand_lower_bound(lam)))
        rows.append(("trivial-e-lb", lam, "", 1 + lam, E))
    for lam in sorted({0.1, *map(float, np.linspace(0.02, 1.0, n))}):
        for p in prior_work_curves(lam):
            rows.append((p.curve, lam, "", p.consistency, p.robustness))
    return rows
