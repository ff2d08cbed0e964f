"""Lower-bound machinery for the button problem.

Buttons 1..J cost b_j = j, the prediction points at button J, and the first
target J* is unknown.  A randomized algorithm is a distribution over
increasing button sequences ending at J; the primal LP below minimizes the
worst robustness ratio gamma over such distributions that are
(1 + lam)-consistent.  Any feasible dual solution lower-bounds gamma by weak
duality, and :func:`build_certificate` gives one in closed form.

Everything here is exact: Fractions and ints, no tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .simplex import LPResult, solve_lp

SIMPLEX_MAX_J = 14


def _check(J: int, lam) -> Fraction:
    lam = Fraction(lam)
    if J < 2:
        raise ValueError(f"need at least two buttons, got J={J}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return lam


@dataclass(frozen=True)
class ButtonInstance:
    J: int

    def __post_init__(self):
        if self.J < 2:
            raise ValueError("J must be >= 2")

    @property
    def prices(self) -> list[int]:
        return list(range(1, self.J + 1))

    @property
    def prediction(self) -> int:
        return self.J


# -- primal -------------------------------------------------------------------


@dataclass
class PrimalLP:
    """minimize gamma over x_j, y_{t,j} (t < j), gamma, all >= 0."""

    J: int
    lam: Fraction
    names: list[str]
    c: list[Fraction]
    A_eq: list[list[Fraction]] = field(repr=False)
    b_eq: list[Fraction] = field(repr=False)
    A_ub: list[list[Fraction]] = field(repr=False)
    b_ub: list[Fraction] = field(repr=False)

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def x_index(self, j: int) -> int:
        return j - 1

    def y_index(self, t: int, j: int) -> int:
        # y_{t,j} for t = 1..J-1, j = t+1..J, row-major after the J x's
        J = self.J
        offset = (t - 1) * J - (t - 1) * t // 2
        return J + offset + (j - t - 1)

    @property
    def gamma_index(self) -> int:
        return self.n_vars - 1

    def press_probability_rows(self) -> list[list[Fraction]]:
        """Row j: coefficients of the expected price paid when J* = j."""
        return [row[:-1] + [Fraction(0)] for row in self._cost_rows()]

    def _cost_rows(self):
        J = self.J
        rows = []
        for j in range(1, J + 1):
            row = [Fraction(0)] * self.n_vars
            for jp in range(1, J + 1):
                row[self.x_index(jp)] += jp
                for t in range(1, min(j, jp)):
                    row[self.y_index(t, jp)] += jp
            row[self.gamma_index] = Fraction(-j)
            rows.append(row)
        return rows

    def check(self, x) -> list[str]:
        """Names of constraints that ``x`` violates (exactly)."""
        bad = []
        if any(v < 0 for v in x):
            bad.append("nonnegativity")
        for k, (a, b) in enumerate(zip(self.A_eq, self.b_eq)):
            if sum(ai * xi for ai, xi in zip(a, x)) != b:
                bad.append(f"eq[{k}]")
        for k, (a, b) in enumerate(zip(self.A_ub, self.b_ub)):
            if sum(ai * xi for ai, xi in zip(a, x)) > b:
                bad.append(f"ub[{k}]")
        return bad


def build_primal(J: int, lam) -> PrimalLP:
    lam = _check(J, lam)
    names = [f"x{j}" for j in range(1, J + 1)]
    names += [f"y{t},{j}" for t in range(1, J) for j in range(t + 1, J + 1)]
    names.append("gamma")
    n = len(names)
    zero = Fraction(0)
    lp = PrimalLP(J, lam, names, [zero] * (n - 1) + [Fraction(1)], [], [], [], [])

    row = [zero] * n
    for j in range(1, J + 1):
        row[lp.x_index(j)] = Fraction(1)
    lp.A_eq.append(row)
    lp.b_eq.append(Fraction(1))
    # flow: mass leaving t equals mass arriving at t
    for t in range(1, J):
        row = [zero] * n
        for j in range(t + 1, J + 1):
            row[lp.y_index(t, j)] += 1
        row[lp.x_index(t)] -= 1
        for j in range(1, t):
            row[lp.y_index(j, t)] -= 1
        lp.A_eq.append(row)
        lp.b_eq.append(zero)

    for row in lp._cost_rows():
        lp.A_ub.append(row)
        lp.b_ub.append(zero)

    # consistency: J* = J (the prediction is right) costs at most (1 + lam) J
    row = [zero] * n
    for jp in range(1, J + 1):
        row[lp.x_index(jp)] += jp
        for t in range(1, jp):
            row[lp.y_index(t, jp)] += jp
    lp.A_ub.append(row)
    lp.b_ub.append((1 + lam) * J)
    return lp


def solve_primal_exact(lp: PrimalLP) -> tuple[Fraction, LPResult]:
    if lp.J > SIMPLEX_MAX_J:
        raise ValueError(f"J={lp.J} exceeds the simplex cap of {SIMPLEX_MAX_J}")
    res = solve_lp(lp.c, lp.A_eq, lp.b_eq, lp.A_ub, lp.b_ub)
    return res.objective, res


def strategy_marginals(lp: PrimalLP, sequences: dict[tuple[int, ...], Fraction]) -> list[Fraction]:
    """(x, y, gamma=0) vector induced by a distribution over increasing sequences ending at J."""
    v = [Fraction(0)] * lp.n_vars
    for seq, p in sequences.items():
        if list(seq) != sorted(set(seq)) or seq[-1] != lp.J:
            raise ValueError(f"not an increasing sequence ending at J: {seq}")
        v[lp.x_index(seq[0])] += p
        for a, b in zip(seq, seq[1:]):
            v[lp.y_index(a, b)] += p
    return v


def expected_price(sequences: dict[tuple[int, ...], Fraction], first_target: int) -> Fraction:
    """Expected total price when buttons >= first_target are targets."""
    total = Fraction(0)
    for seq, p in sequences.items():
        paid = 0
        for b in seq:
            paid += b
            if b >= first_target:
                break
        total += p * paid
    return total


# -- dual certificate ---------------------------------------------------------


@dataclass(frozen=True)
class DualCertificate:
    J: int
    lam: Fraction
    ell: int
    v: tuple  # v_1..v_J
    v_hat: Fraction | int
    u: tuple  # u_1..u_J (D2) or u_1..u_{J-1} (D1)
    w: Fraction | int

    @property
    def objective(self):
        return self.w - (1 + self.lam) * self.J * self.v_hat


def certificate_ell(J: int, lam) -> int:
    lam = Fraction(lam)
    q = 2 * lam / (1 + lam) * J
    return math.ceil(q)


def build_certificate(J: int, lam) -> DualCertificate:
    lam = _check(J, lam)
    ell = certificate_ell(J, lam)
    if not 1 <= ell <= J:  # pragma: no cover - guaranteed for lam in (0, 1)
        raise ValueError(f"ell={ell} outside 1..{J}")
    v = tuple(1 if j <= ell else 0 for j in range(1, J + 1))
    u = tuple(J * (J - t) for t in range(1, J + 1))
    return DualCertificate(J, lam, ell, v, J - ell, u, J * J)


@dataclass
class FeasibilityReport:
    rows_checked: int
    violations: list[tuple] = field(default_factory=list)
    tight_rows: int = 0  # w-rows holding with equality

    @property
    def feasible(self) -> bool:
        return not self.violations


def _suffix_sums(v) -> list:
    """S[t] = sum_{j' > t} v_{j'} for t = 0..J."""
    J = len(v)
    S = [0] * (J + 1)
    for t in range(J - 1, -1, -1):
        S[t] = S[t + 1] + v[t]
    return S


def _worst_pair_rows(u, coef, t_max: int, j_max: int):
    """For t = 1..t_max: max over t < j <= j_max of (u_t - u_j) - j*coef[t], with its j.

    Upper convex hull of the points (j, -u_j), queried with slope coef[t];
    points are added right to left as t decreases.
    """
    hull: list[tuple] = []  # decreasing x
    out = {}

    def value(p, c):
        return p[1] - c * p[0]

    for t in range(j_max - 1, 0, -1):
        p = (t + 1, -u[t])  # u is 0-indexed: u[t] is u_{t+1}
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b unless it lies strictly above the segment from p to a
            if (b[0] - p[0]) * (a[1] - p[1]) - (b[1] - p[1]) * (a[0] - p[0]) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
        if t > t_max:
            continue
        c = coef[t]
        lo, hi = 0, len(hull) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if value(hull[mid + 1], c) > value(hull[mid], c):
                lo = mid + 1
            else:
                hi = mid
        best = hull[lo]
        out[t] = (u[t - 1] + value(best, c), best[0])
    return out


def verify_d2_feasibility(cert: DualCertificate, J: int | None = None, lam=None) -> FeasibilityReport:
    """Check every D2 row exactly.

    The O(J^2) pair rows u_t - u_j <= j (v_hat + S_t) are checked through a
    convex-hull maximization, so J = 10^5 is cheap; :func:`brute_force_d2`
    is the direct double loop.
    """
    J = cert.J if J is None else J
    v, u, vh, w = cert.v, cert.u, cert.v_hat, cert.w
    rep = FeasibilityReport(0)
    if len(v) != J or len(u) != J:
        rep.violations.append(("shape",))
        return rep
    if any(x < 0 for x in v) or vh < 0:
        rep.violations.append(("sign",))
    if u[-1] != 0:
        rep.violations.append(("u_J",))
    S = _suffix_sums(v)
    total = S[0]
    for j in range(1, J + 1):
        rhs = u[j - 1] + j * (vh + total)
        rep.rows_checked += 1
        if w > rhs:
            rep.violations.append(("w", j))
        elif w == rhs:
            rep.tight_rows += 1
    coef = [None] + [vh + S[t] for t in range(1, J)]
    for t, (excess, j) in _worst_pair_rows(u, coef, J - 1, J).items():
        rep.rows_checked += J - t
        if excess > 0:
            rep.violations.append(("pair", t, j))
    return rep


def brute_force_d2(cert: DualCertificate) -> list[tuple]:
    """Direct check of all D2 rows; returns violated rows."""
    J, v, u, vh, w = cert.J, cert.v, cert.u, cert.v_hat, cert.w
    bad = []
    total = sum(v)
    for j in range(1, J + 1):
        if w > u[j - 1] + j * (vh + total):
            bad.append(("w", j))
    for t in range(1, J):
        tail = sum(v[t:])
        for j in range(t + 1, J + 1):
            if u[t - 1] - u[j - 1] > j * (vh + tail):
                bad.append(("pair", t, j))
    if u[-1] != 0:
        bad.append(("u_J",))
    return bad


@dataclass
class ScaledCertificate:
    cert: DualCertificate  # u has J - 1 entries
    divisor: Fraction
    report: FeasibilityReport
    normalization: Fraction  # sum_j j v_j, must be 1


def scale_to_d1(cert: DualCertificate) -> ScaledCertificate:
    """Divide by sum_j j v_j and check every D1 row exactly."""
    J = cert.J
    D = sum(j * vj for j, vj in enumerate(cert.v, start=1))
    if D == 0:
        raise ValueError("sum_j j v_j is zero; cannot scale")
    v = tuple(Fraction(x, D) if isinstance(x, int) else x / D for x in cert.v)
    u = tuple(Fraction(x, D) if isinstance(x, int) else x / D for x in cert.u[:J - 1])
    scaled = DualCertificate(J, cert.lam, cert.ell, v, Fraction(cert.v_hat) / D, u, Fraction(cert.w) / D)
    norm = sum((j * vj for j, vj in enumerate(v, start=1)), Fraction(0))
    return ScaledCertificate(scaled, Fraction(D), verify_d1_feasibility(scaled), norm)


def _to_common_integers(values) -> tuple[list[int], int]:
    """Integers n_i and a positive L with values[i] == n_i / L exactly."""
    values = [Fraction(x) for x in values]
    L = math.lcm(*{x.denominator for x in values})
    return [x.numerator * (L // x.denominator) for x in values], L


def verify_d1_feasibility(cert: DualCertificate) -> FeasibilityReport:
    """Check every D1 row exactly.

    All rows but the normalization are homogeneous, so they are checked on
    the integers obtained by clearing the common denominator.
    """
    J = cert.J
    rep = FeasibilityReport(0)
    if len(cert.u) != J - 1 or len(cert.v) != J:
        rep.violations.append(("shape",))
        return rep
    ints, L = _to_common_integers([*cert.v, *cert.u, cert.v_hat, cert.w])
    v, u, vh, w = ints[:J], ints[J:2 * J - 1], ints[-2], ints[-1]
    if any(x < 0 for x in v) or vh < 0:
        rep.violations.append(("sign",))
    if sum(j * x for j, x in enumerate(v, start=1)) != L:
        rep.violations.append(("normalization",))
    S = _suffix_sums(v)
    total = S[0]
    for j in range(1, J):
        rhs = u[j - 1] + j * (vh + total)
        rep.rows_checked += 1
        if w > rhs:
            rep.violations.append(("w", j))
        elif w == rhs:
            rep.tight_rows += 1
    rep.rows_checked += 1
    if w > J * (vh + total):
        rep.violations.append(("w", J))
    elif w == J * (vh + total):
        rep.tight_rows += 1
    for t in range(1, J):
        rep.rows_checked += 1
        if u[t - 1] > J * (vh + S[t]):
            rep.violations.append(("u", t))
    coef = [None] + [vh + S[t] for t in range(1, J)]
    for t, (excess, j) in _worst_pair_rows(u, coef, J - 2, J - 1).items():
        rep.rows_checked += J - 1 - t
        if excess > 0:
            rep.violations.append(("pair", t, j))
    return rep


def certificate_ratio(J: int, lam) -> Fraction:
    """Objective of the scaled certificate: (w - (1+lam) J v_hat) / (ell (ell+1) / 2)."""
    cert = build_certificate(J, lam)
    return Fraction(cert.objective) / Fraction(cert.ell * (cert.ell + 1), 2)


def ratio_lower_estimate(J: int, lam) -> Fraction:
    """lam J^2 / ((2 lam J/(1+lam) + 1)(lam J/(1+lam) + 1))."""
    lam = _check(J, lam)
    return lam * J * J / ((2 * lam * J / (1 + lam) + 1) * (lam * J / (1 + lam) + 1))


def ratio_limit(lam) -> Fraction:
    lam = Fraction(lam)
    return (1 + lam) ** 2 / (2 * lam)
