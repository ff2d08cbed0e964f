"""Cost evaluation: simulation, exact expectation over alpha, Monte-Carlo, ratio reports.

The randomized algorithm's run is a step function of alpha.  A run only
changes where some budget alpha*delta**i crosses an optval value (BOPT
switches schedule) or where the first-phase test flips.  Enumerating those
points splits [1, delta) into segments of constant cost; the expectation is
then a finite sum weighted by (ln b - ln a)/ln delta.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import tradeoff
from .algorithms import (
    ExecutionTrace,
    RandParams,
    execute_plan,
    prepare_det,
    prepare_rand,
    rand_plan,
    sample_alphas,
)
from .instance import BUDGET_RTOL, INF, Instance, InstanceError, OptTable, build_opt_table

#: relative offset used when probing a segment near its ends
PROBE_RTOL = 1e-9
#: candidate breakpoints closer than this (relative) are merged
MERGE_RTOL = 1e-12


class SegmentDefect(RuntimeError):
    """Cost changed inside a segment that should have been constant."""


@dataclass(frozen=True)
class RatioReport:
    T: int
    expected_cost: float
    optval: Fraction | float
    ratio: float
    opt_exponent: float


@dataclass(frozen=True)
class ExpectationBreakdown:
    breakpoints: tuple[float, ...]  # 1 = a_0 < a_1 < ... < a_m = delta
    costs: tuple[float, ...]
    probabilities: tuple[float, ...]

    @property
    def expected(self) -> float:
        return math.fsum(c * p for c, p in zip(self.costs, self.probabilities))


@dataclass(frozen=True)
class AlgorithmConfig:
    """Either ``AlgorithmConfig.det(lam)`` or ``AlgorithmConfig.rand(delta, s)``."""

    kind: str
    lam: Fraction | None = None
    delta: float | None = None
    s: float | None = None

    @classmethod
    def det(cls, lam) -> "AlgorithmConfig":
        return cls("det", lam=Fraction(lam))

    @classmethod
    def rand(cls, delta: float, s: float) -> "AlgorithmConfig":
        return cls("rand", delta=float(delta), s=float(s))

    @property
    def consistency_bound(self):
        if self.kind == "det":
            return Fraction(1) if self.lam == 0 else tradeoff.det_tradeoff(self.lam).consistency
        return tradeoff.chi(self.delta, self.s)

    @property
    def robustness_bound(self):
        if self.kind == "det":
            return INF if self.lam == 0 else tradeoff.det_tradeoff(self.lam).robustness
        return tradeoff.rho(self.delta, self.s)

    @property
    def param_columns(self) -> tuple:
        if self.kind == "det":
            return (str(self.lam), "")
        return (repr(self.delta), repr(self.s))


# -- breakpoint enumeration ---------------------------------------------------


def _budget_ceiling(table: OptTable, params: RandParams, t_pred: int, T_max: int) -> float:
    """Upper bound on any budget a run halting by day T_max can pose."""
    top = max(float(table.value(T_max)), float(table.value(t_pred)))
    return params.delta**2 * top


def candidate_breakpoints(table: OptTable, params: RandParams, t_pred: int, T_max: int) -> list[float]:
    """Sorted alpha values in (1, delta) where the run may change."""
    delta, k, s = params.delta, params.k, params.s
    ln_d = math.log(delta)
    ceiling = _budget_ceiling(table, params, t_pred, T_max)
    table.max_days_within(ceiling)  # grow the table past the ceiling if needed
    values = {float(v) for v in table.optval if float(v) <= ceiling}
    if table.buy_cost is not None:
        values.add(float(table.buy_cost))
    values.discard(0.0)

    cands = []
    for v in values:
        # BOPT switches when alpha*delta**i*(1 + tol) reaches v
        v_eff = v / (1 + BUDGET_RTOL)
        i0 = math.floor(math.log(v_eff) / ln_d)
        for i in (i0 - 1, i0, i0 + 1):
            if i >= 0:
                cands.append(v_eff / delta**i)
    for i in range(k):
        cands.append(math.exp((k - s - i) * ln_d))

    inner = sorted(a for a in cands if 1 + MERGE_RTOL < a < delta * (1 - MERGE_RTOL))
    merged = []
    for a in inner:
        if not merged or a > merged[-1] * (1 + MERGE_RTOL):
            merged.append(a)
    return merged


def _probe_points(a: float, b: float) -> tuple[float, float, float]:
    lo = min(a * PROBE_RTOL, (b - a) / 4)
    hi = min(b * PROBE_RTOL, (b - a) / 4)
    return a + lo, (a + b) / 2, b - hi


def _signature(trace: ExecutionTrace) -> tuple:
    return tuple((p.step, p.phase, p.iteration, p.option) for p in trace.purchases)


@dataclass
class _Segment:
    lo: float
    hi: float
    probability: float
    trace: ExecutionTrace = field(repr=False)


def alpha_segments(table: OptTable, params: RandParams, t_pred: int, T_max: int,
                   check: bool = True) -> list[_Segment]:
    """Segments of [1, delta) with the run (up to day T_max) constant on each."""
    ln_d = math.log(params.delta)
    edges = [1.0, *candidate_breakpoints(table, params, t_pred, T_max), params.delta]
    segments = []
    for a, b in zip(edges, edges[1:]):
        left, mid, right = _probe_points(a, b)
        trace = execute_plan(table, rand_plan(params, mid, t_pred), T_max)
        if check:
            sig = _signature(trace)
            for x in (left, right):
                other = execute_plan(table, rand_plan(params, x, t_pred), T_max)
                if _signature(other) != sig:
                    raise SegmentDefect(
                        f"run differs between alpha={mid!r} and alpha={x!r} in segment [{a!r}, {b!r})")
        segments.append(_Segment(a, b, (math.log(b) - math.log(a)) / ln_d, trace))
    return segments


def _cost_profile(trace: ExecutionTrace, table: OptTable, Ts: Sequence[int]) -> list[float]:
    """Cost of the run halted at each day in Ts (all <= the trace's coverage)."""
    options = table.instance.options
    covered = np.cumsum([options[p.option].duration for p in trace.purchases], dtype=float)
    paid = np.cumsum([float(p.cost) for p in trace.purchases])
    out = []
    for T in Ts:
        if T <= 0:
            out.append(0.0)
            continue
        j = int(np.searchsorted(covered, T, side="left"))
        out.append(float(paid[j]))
    return out


def _rescaled(instance: Instance, t_pred: int, params: RandParams) -> tuple[OptTable, RandParams]:
    if params.k is None:
        return prepare_rand(instance, t_pred, params.delta, params.s)
    return build_opt_table(instance), params


def expected_cost_profile(instance: Instance, t_pred: int, params: RandParams,
                          Ts: Sequence[int], check: bool = True
                          ) -> tuple[OptTable, RandParams, dict[int, ExpectationBreakdown]]:
    """Exact expected cost for every T in ``Ts`` from one segment enumeration.

    If ``params.k`` is unset the instance is normalized and rescaled first;
    otherwise it is taken to be rescaled already.
    """
    table, params = _rescaled(instance, t_pred, params)
    Ts = list(Ts)
    T_max = max(Ts)
    if T_max == 0:
        bd = ExpectationBreakdown((1.0, params.delta), (0.0,), (1.0,))
        return table, params, {0: bd}
    segments = alpha_segments(table, params, t_pred, T_max, check=check)
    edges = (segments[0].lo, *(seg.hi for seg in segments))
    probs = tuple(seg.probability for seg in segments)
    per_segment = [_cost_profile(seg.trace, table, Ts) for seg in segments]
    out = {}
    for col, T in enumerate(Ts):
        out[T] = ExpectationBreakdown(edges, tuple(row[col] for row in per_segment), probs)
    return table, params, out


def exact_expected_cost(instance: Instance, t_pred: int, params: RandParams, T: int
                        ) -> tuple[float, ExpectationBreakdown]:
    _, _, profile = expected_cost_profile(instance, t_pred, params, [T])
    bd = profile[T]
    return bd.expected, bd


# -- Monte-Carlo --------------------------------------------------------------


def _run_keys(table: OptTable, params: RandParams, t_pred: int, T: int, alphas: np.ndarray) -> np.ndarray:
    """Per-sample tuple that fixes the whole plan: first-phase exit and each BOPT's day count."""
    delta, k, s = params.delta, params.k, params.s
    ln_d = math.log(delta)
    ceiling = _budget_ceiling(table, params, t_pred, T)
    table.max_days_within(ceiling)
    optval = np.array([float(v) for v in table.optval])
    buy = math.inf if table.buy_cost is None else float(table.buy_cost)

    # same test, same order as first_phase_exit; k means "never left"
    ln_a = np.log(alphas)
    exit_at = np.full(len(alphas), k, dtype=np.int64)
    for i in range(k):
        hit = ln_a + i * ln_d >= (k - s) * ln_d
        exit_at = np.where(hit & (exit_at == k), i, exit_at)

    i_cap = k + 2 + max(0, math.ceil(math.log(ceiling) / ln_d))
    cols = [exit_at]
    for i in range(i_cap + 1):
        budget = np.minimum(alphas * delta**i, ceiling)
        slack = budget * (1 + BUDGET_RTOL)
        t_star = np.searchsorted(optval, slack, side="right") - 1
        t_star = np.where(buy <= slack, -1, t_star)
        cols.append(t_star)
    return np.stack(cols, axis=1)


def monte_carlo_expected_cost(instance: Instance, t_pred: int, params: RandParams, T: int,
                              n: int, seed) -> tuple[float, float]:
    """Sample mean of n simulated costs and its standard error.

    Runs with identical plans (same first-phase exit and same BOPT day counts)
    have identical cost, so each distinct plan is simulated once.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table, params = _rescaled(instance, t_pred, params)
    rng = np.random.default_rng(seed)
    alphas = sample_alphas(rng, params.delta, n)
    if T == 0:
        return 0.0, 0.0
    keys = _run_keys(table, params, t_pred, T, alphas)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    costs_unique = np.array([
        float(execute_plan(table, rand_plan(params, float(alphas[j]), t_pred), T).total_cost)
        for j in first
    ])
    costs = costs_unique[np.ravel(inverse)]
    mean = float(costs.mean())
    stderr = float(costs.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


# -- ratio reports ------------------------------------------------------------


def _report(T: int, cost, optval, base) -> RatioReport:
    ratio = cost / optval
    exponent = math.log(float(optval)) / math.log(float(base)) if base else math.nan
    return RatioReport(T, cost, optval, ratio, exponent)


def robustness_ratio(config: AlgorithmConfig, instance: Instance, t_pred: int,
                     T_range: Iterable[int]) -> tuple[RatioReport, list[RatioReport]]:
    """Per-T reports and the worst one.  Deterministic costs stay exact."""
    Ts = list(T_range)
    if not Ts or min(Ts) < 1 or max(Ts) > instance.horizon:
        raise InstanceError(f"T range must lie within 1..{instance.horizon}")
    if config.kind == "det":
        table, plan = prepare_det(instance, t_pred, config.lam)
        trace = execute_plan(table, plan, max(Ts))
        base = None if config.lam == 0 else 1 / config.lam
        reports = [_report(T, trace.cost_until(T, table.instance), table.value(T), base) for T in Ts]
    else:
        table, params, profile = expected_cost_profile(
            instance, t_pred, RandParams(config.delta, config.s), Ts)
        reports = [_report(T, profile[T].expected, table.value(T), params.delta) for T in Ts]
    worst = max(reports, key=lambda r: r.ratio)
    return worst, reports


def consistency_ratio(config: AlgorithmConfig, instance: Instance, t_pred: int) -> RatioReport:
    return robustness_ratio(config, instance, t_pred, [t_pred])[0]


# -- CSV ----------------------------------------------------------------------

CSV_COLUMNS = ("family", "lambda_or_delta", "s", "T", "That", "expected_cost", "optval",
               "ratio", "bound", "margin")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else repr(float(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_rows(family: str, config: AlgorithmConfig, t_pred: int,
                reports: Iterable[RatioReport]) -> list[tuple]:
    """CSV rows; the bound is the consistency bound at T = T_pred, else robustness."""
    rows = []
    p1, p2 = config.param_columns
    for r in reports:
        bound = config.consistency_bound if r.T == t_pred else config.robustness_bound
        margin = bound - r.ratio
        rows.append((family, p1, p2, r.T, t_pred, _fmt(r.expected_cost), _fmt(r.optval),
                     _fmt(r.ratio), _fmt(bound), _fmt(margin)))
    return rows


def write_csv(rows: Iterable[Sequence], out, header: Sequence[str] = CSV_COLUMNS,
              comment: str | None = None) -> None:
    if comment:
        out.write(f"# {comment}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def csv_text(rows, header=CSV_COLUMNS, comment=None) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, header, comment)
    return buf.getvalue()
