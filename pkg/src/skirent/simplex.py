"""Dense two-phase simplex over Fractions with Bland's rule.

Solves   minimize c.x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
Small problems only: every entry is an exact rational and every pivot
touches the whole tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

try:  # exact rationals in C; Fraction is the fallback
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class LPResult:
    x: list[Fraction]
    objective: Fraction
    pivots: int


def _pivot(tab: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = tab[r]
    piv = row[c]
    if piv != 1:
        tab[r] = row = [v / piv for v in row]
    nz = [(k, v) for k, v in enumerate(row) if v]
    for i, other in enumerate(tab):
        if i != r:
            f = other[c]
            if f:
                for k, v in nz:
                    other[k] -= f * v
    if r < len(basis):
        basis[r] = c


def _run(tab, basis, n_cols: int, allowed) -> int:
    """Primal simplex on the objective in the last row; Bland's rule."""
    m = len(basis)
    obj = tab[m]
    pivots = 0
    while True:
        obj = tab[m]
        enter = next((j for j in range(n_cols) if allowed[j] and obj[j] < 0), None)
        if enter is None:
            return pivots
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded("objective is unbounded below")
        _pivot(tab, basis, best[1], enter)
        pivots += 1


def solve_lp(c: Sequence, A_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
             A_ub: Sequence[Sequence] = (), b_ub: Sequence = ()) -> LPResult:
    n = len(c)
    F = Q
    rows, rhs = [], []
    n_ub = len(A_ub)
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        slack = [F(0)] * n_ub
        slack[k] = F(1)
        rows.append([F(v) for v in a] + slack)
        rhs.append(F(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([F(v) for v in a] + [F(0)] * n_ub)
        rhs.append(F(b))
    m = len(rows)
    n_struct = n + n_ub
    basis = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            basis.append(None)
        else:
            basis.append(n + i if i < n_ub else None)

    # phase one: slacks start basic where they can, artificials elsewhere;
    # minimize the sum of artificials
    n_cols = n_struct + m
    tab = []
    for i in range(m):
        art = [F(0)] * m
        if basis[i] is None:
            art[i] = F(1)
            basis[i] = n_struct + i
        tab.append(rows[i] + art + [rhs[i]])
    phase1 = [F(0)] * (n_cols + 1)
    for i in range(m):
        if basis[i] >= n_struct:
            phase1 = [p - v for p, v in zip(phase1, tab[i])]
    for j in range(n_struct, n_cols):
        phase1[j] = F(0)
    tab.append(phase1)
    pivots = _run(tab, basis, n_cols, [True] * n_struct + [False] * m)
    if tab[m][-1] != 0:
        raise Infeasible(f"phase one optimum {-tab[m][-1]} > 0")

    # drive zero-level artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= n_struct:
            col = next((j for j in range(n_struct) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, basis, i, col)
            pivots += 1
        i += 1
    m = len(basis)

    # phase two
    obj = [F(v) for v in c] + [F(0)] * (n_cols - n) + [F(0)]
    for i, bj in enumerate(basis):
        f = obj[bj]
        if f:
            obj = [o - f * v for o, v in zip(obj, tab[i])]
    tab[m] = obj
    del tab[m + 1:]
    pivots += _run(tab, basis, n_cols, [True] * n_struct + [False] * (n_cols - n_struct))

    x = [F(0)] * n_struct
    for i, bj in enumerate(basis):
        x[bj] = tab[i][-1]
    x = [_to_fraction(v) for v in x[:n]]
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), Fraction(0))
    return LPResult(x, value, pivots)


def _to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))

