"""The deterministic and randomized algorithms as lazy plans, and the engine that runs them.

A plan is an (infinite) stream of steps.  Each step names a sub-solution to
append: ``bopt`` with a budget, ``opt`` with a predicted day count, or a
single ``option`` index.  :func:`execute_plan` buys the options of each
sub-solution in order, one per uncovered day, and stops the moment day T is
covered, possibly halfway through a sub-solution.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .instance import (
    INF,
    Instance,
    InstanceError,
    OptTable,
    Schedule,
    bopt,
    build_opt_table,
    cheapest_option,
    normalize_costs,
    rescale_for_det,
    rescale_for_rand,
)


class PlanDefect(RuntimeError):
    """A plan ran past its step cap without covering the horizon."""


@dataclass(frozen=True)
class DetParams:
    lam: Fraction

    def __post_init__(self):
        lam = Fraction(self.lam)
        if not 0 <= lam <= Fraction(1, 2):
            raise InstanceError(f"lambda must lie in [0, 1/2], got {lam}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class RandParams:
    delta: float
    s: float
    k: int | None = None

    def __post_init__(self):
        if not self.delta >= math.e:
            raise InstanceError(f"delta must be >= e, got {self.delta}")
        if not self.s >= 0:
            raise InstanceError(f"s must be >= 0, got {self.s}")
        if self.k is not None and self.k < self.s + 2:
            raise InstanceError(f"k must be >= s + 2, got k={self.k}, s={self.s}")

    def with_k(self, k: int) -> "RandParams":
        return RandParams(self.delta, self.s, k)


@dataclass(frozen=True)
class AlphaDraw:
    alpha: float
    delta: float
    source: tuple = ()

    def __post_init__(self):
        if not 1 <= self.alpha < self.delta:
            raise InstanceError(f"alpha must lie in [1, delta), got {self.alpha}")


@dataclass(frozen=True)
class Step:
    kind: str  # "bopt", "opt" or "option"
    arg: object
    phase: int  # 0 for the deterministic algorithm, else 1/2/3
    iteration: int


@dataclass(frozen=True)
class Plan:
    make_steps: Callable[[], Iterator[Step]] = field(repr=False)
    base: float | Fraction | None  # budget growth factor, None if budgets are not geometric
    k: int = 0
    label: str = ""

    def steps(self) -> Iterator[Step]:
        return self.make_steps()

    def head(self, n: int) -> list[Step]:
        return list(itertools.islice(self.steps(), n))


@dataclass(frozen=True)
class Purchase:
    step: int
    phase: int
    iteration: int
    option: int
    day: int
    cost: Fraction | float


@dataclass(frozen=True)
class ExecutionTrace:
    purchases: tuple[Purchase, ...]
    total_cost: Fraction | float
    covered_through: int | float
    halted_at_step: int | None

    def cost_until(self, T: int, instance: Instance):
        """Cost of the same run halted at an earlier day ``T``."""
        if T <= 0:
            return 0
        covered, cost = 0, 0
        for p in self.purchases:
            cost += p.cost
            covered += instance.options[p.option].duration
            if covered >= T:
                return cost
        raise PlanDefect(f"trace only covers {covered} days, asked for {T}")

    def to_jsonl(self) -> str:
        rows = []
        for p in self.purchases:
            cost = str(p.cost) if isinstance(p.cost, Fraction) else p.cost
            rows.append(json.dumps({"step": p.step, "phase": p.phase, "iter": p.iteration,
                                    "option": p.option, "day": p.day, "cost": cost}))
        return "\n".join(rows) + ("\n" if rows else "")


# -- plans --------------------------------------------------------------------


def det_plan(params: DetParams, k: int) -> Plan:
    """Iteration i appends BOPT((1/lam)**i)."""
    if params.lam == 0:
        raise InstanceError("lambda = 0 has its own plan, see det_plan_lambda_zero")
    base = 1 / params.lam

    def steps():
        budget = Fraction(1)
        for i in itertools.count():
            yield Step("bopt", budget, 0, i)
            budget *= base

    return Plan(steps, base, k, f"det(lambda={params.lam})")


def det_plan_lambda_zero(t_pred: int, instance: Instance) -> Plan:
    """Buy OPT(t_pred) up front, then keep renting the cheapest option."""
    cheapest = cheapest_option(instance)

    def steps():
        yield Step("opt", t_pred, 0, 0)
        for i in itertools.count(1):
            yield Step("option", cheapest, 0, i)

    return Plan(steps, None, 0, "det(lambda=0)")


def first_phase_exit(params: RandParams, alpha: float) -> int | None:
    """First iteration i < k with alpha*delta**i >= delta**(k-s), or None."""
    ln_d = math.log(params.delta)
    ln_a = math.log(alpha)
    limit = (params.k - params.s) * ln_d
    for i in range(params.k):
        if ln_a + i * ln_d >= limit:
            return i
    return None


def rand_plan(params: RandParams, alpha: AlphaDraw | float, t_pred: int) -> Plan:
    """Three-phase randomized plan for a rescaled instance with OPTVAL(t_pred) = delta**k."""
    if params.k is None:
        raise InstanceError("RandParams.k is unset; rescale the instance first")
    a = alpha.alpha if isinstance(alpha, AlphaDraw) else float(alpha)
    delta, k = params.delta, params.k
    if not 1 <= a < delta:
        raise InstanceError(f"alpha must lie in [1, delta), got {a}")
    exit_at = first_phase_exit(params, a)

    def steps():
        stop = k if exit_at is None else exit_at
        for i in range(stop):
            yield Step("bopt", a * delta**i, 1, i)
        if exit_at is not None:
            yield Step("opt", t_pred, 2, exit_at)
        for i in itertools.count(k):
            yield Step("bopt", a * delta**i, 3, i)

    return Plan(steps, delta, k, f"rand(delta={delta:g}, s={params.s:g}, alpha={a:.6g})")


def alpha_from_uniform(u: float, delta: float) -> float:
    """Inverse CDF of the density 1/(alpha ln delta) on [1, delta)."""
    a = delta**u
    if a >= delta:  # u within an ulp of 1
        a = math.nextafter(delta, 0.0)
    return max(a, 1.0)


def sample_alpha(seed, delta: float, index: int = 0) -> AlphaDraw:
    if not delta >= math.e:
        raise InstanceError(f"delta must be >= e, got {delta}")
    u = np.random.default_rng(seed).random(index + 1)[index]
    return AlphaDraw(alpha_from_uniform(float(u), delta), delta, (seed, index))


def sample_alphas(rng: np.random.Generator, delta: float, n: int) -> np.ndarray:
    a = np.power(delta, rng.random(n))
    return np.clip(a, 1.0, math.nextafter(delta, 0.0))


# -- execution ----------------------------------------------------------------


def materialize(table: OptTable, step: Step) -> Schedule:
    if step.kind == "bopt":
        return bopt(table, step.arg)
    if step.kind == "opt":
        return table.schedule(step.arg)
    if step.kind == "option":
        return Schedule.from_indices(table.instance, [step.arg])
    raise ValueError(f"unknown step kind {step.kind!r}")


def step_cap(table: OptTable, plan: Plan, T: int) -> int:
    if plan.base is None:
        return T + 10
    top = max(float(table.value(min(T, table.size))), float(table.value(table.horizon)), 1.0)
    return int(10 * (plan.k + math.log(top) / math.log(float(plan.base)) + 2))


def execute_plan(table: OptTable, plan: Plan, T: int) -> ExecutionTrace:
    zero = table.optval[0]
    if T < 0 or T > table.horizon:
        raise InstanceError(f"T={T} outside 0..{table.horizon}")
    if T == 0:
        return ExecutionTrace((), zero, 0, None)
    options = table.instance.options
    cap = step_cap(table, plan, T)
    purchases = []
    covered, total = 0, zero
    for n, step in enumerate(plan.steps()):
        if n >= cap:
            break
        for idx in materialize(table, step).options:
            opt = options[idx]
            purchases.append(Purchase(n, step.phase, step.iteration, idx, covered + 1, opt.cost))
            covered += opt.duration
            total += opt.cost
            if covered >= T:
                return ExecutionTrace(tuple(purchases), total, covered, n)
    raise PlanDefect(f"{plan.label}: {cap} steps did not cover {T} days")


# -- end-to-end helpers -------------------------------------------------------


def prepare_det(instance: Instance, t_pred: int, lam) -> tuple[OptTable, Plan]:
    """Normalize, rescale and build the table and plan for the deterministic algorithm."""
    params = DetParams(lam)
    inst, _ = normalize_costs(instance)
    if params.lam == 0:
        table = build_opt_table(inst)
        return table, det_plan_lambda_zero(t_pred, inst)
    inst, k = rescale_for_det(inst, t_pred, params.lam)
    return build_opt_table(inst), det_plan(params, k)


def prepare_rand(instance: Instance, t_pred: int, delta: float, s: float) -> tuple[OptTable, RandParams]:
    params = RandParams(delta, s)
    inst, _ = normalize_costs(instance)
    inst, k = rescale_for_rand(inst, t_pred, delta, s)
    return build_opt_table(inst), params.with_k(k)


def run_det(instance: Instance, t_pred: int, lam, T: int) -> tuple[ExecutionTrace, OptTable]:
    table, plan = prepare_det(instance, t_pred, lam)
    return execute_plan(table, plan, T), table


def run_rand(instance: Instance, t_pred: int, delta: float, s: float, T: int,
             alpha: AlphaDraw | float) -> tuple[ExecutionTrace, OptTable]:
    table, params = prepare_rand(instance, t_pred, delta, s)
    return execute_plan(table, rand_plan(params, alpha, t_pred), T), table
