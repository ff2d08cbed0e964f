"""Rental menus, the offline optimum DP, and the cost rescalings.

Costs are kept as :class:`fractions.Fraction` wherever possible.  The
randomized pipeline rescales by powers of an irrational ``delta`` and so
works with float costs; every comparison of a float budget against the
table goes through :func:`budget_ge` with a 1e-12 relative slack.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence

INF = math.inf

#: relative slack for comparing optval values against floating budgets
BUDGET_RTOL = 1e-12


class InstanceError(ValueError):
    """Raised for malformed instances or out-of-range queries."""


def as_number(x) -> Fraction | float:
    """Coerce to Fraction when exact, else float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Real):
        return float(x)
    raise TypeError(f"not a number: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def budget_ge(budget, value) -> bool:
    """``value <= budget``, exact for rationals, with relative slack otherwise."""
    if is_exact(budget) and is_exact(value):
        return value <= budget
    return value <= budget * (1 + BUDGET_RTOL)


@dataclass(frozen=True)
class RentalOption:
    duration: int | float  # positive int, or INF for buying
    cost: Fraction | float

    def __post_init__(self):
        d = self.duration
        if d != INF and (int(d) != d or d < 1):
            raise InstanceError(f"duration must be a positive integer or inf, got {d!r}")
        if d != INF:
            object.__setattr__(self, "duration", int(d))
        c = as_number(self.cost)
        if not c > 0:
            raise InstanceError(f"cost must be positive, got {c}")
        object.__setattr__(self, "cost", c)

    @property
    def is_buy(self) -> bool:
        return self.duration == INF


@dataclass(frozen=True)
class Instance:
    options: tuple[RentalOption, ...]
    horizon: int

    def __post_init__(self):
        opts = tuple(
            o if isinstance(o, RentalOption) else RentalOption(*o) for o in self.options
        )
        if not opts:
            raise InstanceError("an instance needs at least one option")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise InstanceError(f"horizon must be a positive integer, got {self.horizon!r}")
        object.__setattr__(self, "options", opts)
        object.__setattr__(self, "horizon", int(self.horizon))

    @property
    def exact(self) -> bool:
        return all(is_exact(o.cost) for o in self.options)

    @property
    def min_cost(self):
        return min(o.cost for o in self.options)

    def scaled(self, factor) -> "Instance":
        return Instance(
            tuple(RentalOption(o.duration, o.cost * factor) for o in self.options),
            self.horizon,
        )

    def with_horizon(self, horizon: int) -> "Instance":
        return Instance(self.options, horizon)

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        def cost_repr(c):
            return str(c) if is_exact(c) else float(c)

        return {
            "options": [
                {"days": "inf" if o.is_buy else o.duration, "cost": cost_repr(o.cost)}
                for o in self.options
            ],
            "horizon": self.horizon,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            raw_options = data["options"]
            horizon = data["horizon"]
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"instance JSON needs 'options' and 'horizon': {exc}") from None
        options = []
        for item in raw_options:
            days = item["days"]
            if isinstance(days, str):
                if days.lower() not in ("inf", "infinity"):
                    raise InstanceError(f"bad duration {days!r}")
                days = INF
            cost = item["cost"]
            if isinstance(cost, float):
                # json loaded without parse_float; recover the decimal literal
                cost = Fraction(repr(cost))
            options.append(RentalOption(days, Fraction(cost)))
        return cls(tuple(options), horizon)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text, parse_float=Fraction))


@dataclass(frozen=True)
class Schedule:
    """A sequence of option indices in purchase order."""

    options: tuple[int, ...]
    covered_days: int | float
    total_cost: Fraction | float

    @classmethod
    def from_indices(cls, instance: Instance, indices: Sequence[int]) -> "Schedule":
        covered = 0
        cost = Fraction(0) if instance.exact else 0.0
        for i in indices:
            covered += instance.options[i].duration
            cost += instance.options[i].cost
        return cls(tuple(indices), covered, cost)

    @property
    def is_empty(self) -> bool:
        return not self.options

    def __len__(self):
        return len(self.options)


@dataclass(frozen=True, eq=False)
class OptTable:
    """optval/choice arrays for t = 0..len-1 plus the cheapest buy cost.

    The arrays cover at least ``instance.horizon`` days.  When the menu has a
    buy option they run until optval first reaches ``buy_cost``; without one,
    :meth:`ensure` grows them on demand (values never change once computed).
    """

    instance: Instance
    optval: list = field(repr=False)
    choice: list = field(repr=False)
    buy_cost: Fraction | float | None
    buy_index: int | None

    @property
    def horizon(self) -> int:
        return self.instance.horizon

    @property
    def size(self) -> int:
        """Largest t with a computed entry."""
        return len(self.optval) - 1

    @property
    def saturated(self) -> bool:
        """True when optval[size] already equals the buy cost."""
        return self.buy_cost is not None and self.optval[-1] == self.buy_cost

    def _extend(self, t: int) -> None:
        opts = self.instance.options
        optval, choice = self.optval, self.choice
        for u in range(len(optval), t + 1):
            best, arg = None, None
            for i, o in enumerate(opts):
                c = o.cost if o.is_buy else o.cost + optval[max(u - o.duration, 0)]
                if best is None or c < best:
                    best, arg = c, i
            optval.append(best)
            choice.append(arg)

    def ensure(self, t: int) -> None:
        if t > self.size:
            self._extend(t)

    def value(self, t) -> Fraction | float:
        """OPTVAL(t); t may be INF when a buy option exists."""
        if t == INF:
            if self.buy_cost is None:
                raise InstanceError("no finite-cost solution covers infinitely many days")
            return self.buy_cost
        if t > self.size and self.saturated:
            return self.buy_cost
        self.ensure(t)
        return self.optval[t]

    def schedule(self, t) -> Schedule:
        """OPT(t) by backtracking, listed in chronological order."""
        if t == INF:
            if self.buy_index is None:
                raise InstanceError("no buy option in this menu")
            return Schedule.from_indices(self.instance, [self.buy_index])
        if t > self.size and self.saturated:
            t = self.size
        self.ensure(t)
        picked = []
        u = t
        while u > 0:
            i = self.choice[u]
            picked.append(i)
            d = self.instance.options[i].duration
            if d == INF:
                break
            u -= d
        picked.reverse()
        return Schedule.from_indices(self.instance, picked)

    def max_days_within(self, budget):
        """t* = max{t : optval[t] <= budget}, INF when buying fits, 0 if nothing does."""
        if self.buy_cost is not None and budget_ge(budget, self.buy_cost):
            return INF
        # optval is non-decreasing; grow until it passes the budget
        while budget_ge(budget, self.optval[-1]):
            if self.saturated:  # pragma: no cover - excluded by the buy check above
                return INF
            self._extend(2 * self.size + 1)
        lo, hi = 0, self.size  # optval[lo] <= budget < optval[hi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if budget_ge(budget, self.optval[mid]):
                lo = mid
            else:
                hi = mid
        return lo


def normalize_costs(instance: Instance) -> tuple[Instance, Fraction | float]:
    """Scale all costs so the cheapest one is at least 1."""
    m = instance.min_cost
    if m >= 1:
        return instance, Fraction(1) if is_exact(m) else 1.0
    scale = 1 / m
    return instance.scaled(scale), scale


def build_opt_table(instance: Instance) -> OptTable:
    if instance.horizon < 1:  # pragma: no cover - Instance already refuses this
        raise InstanceError("horizon must be positive")
    zero = Fraction(0) if instance.exact else 0.0
    buys = [(o.cost, i) for i, o in enumerate(instance.options) if o.is_buy]
    buy_cost, buy_index = min(buys) if buys else (None, None)
    table = OptTable(instance, [zero], [None], buy_cost, buy_index)
    table.ensure(instance.horizon)
    if buy_cost is not None:
        while table.optval[-1] < buy_cost:
            table._extend(table.size + 1)
    return table


def opt_schedule(table: OptTable, t: int) -> Schedule:
    if t < 0 or t > table.horizon:
        raise InstanceError(f"t={t} outside 0..{table.horizon}")
    return table.schedule(t)


def bopt(table: OptTable, budget) -> Schedule:
    """Cover as many days as possible for at most ``budget``."""
    if budget < 0:
        raise InstanceError(f"negative budget {budget}")
    t_star = table.max_days_within(budget)
    if t_star == 0:
        return Schedule((), 0, table.optval[0])
    return table.schedule(t_star)


def _ceil_log(value, base) -> int:
    """Smallest integer k >= 0 with base**k >= value, for exact rationals."""
    k, p = 0, Fraction(1)
    while p < value:
        p *= base
        k += 1
    return k


def rescale_for_det(instance: Instance, t_pred: int, lam) -> tuple[Instance, int]:
    """Scale costs up so that OPTVAL(t_pred) becomes (1/lam)**k exactly."""
    lam = Fraction(lam)
    if not 0 < lam <= Fraction(1, 2):
        raise InstanceError(f"lambda must lie in (0, 1/2], got {lam}")
    table = build_opt_table(instance)
    target = table.value(t_pred)
    if not is_exact(target):
        raise InstanceError("deterministic rescaling needs exact costs")
    if target < 1:
        raise InstanceError("normalize costs first (OPTVAL must be >= 1)")
    k = _ceil_log(target, 1 / lam)
    factor = (1 / lam) ** k / target
    return (instance if factor == 1 else instance.scaled(factor)), k


def log_ceil(x: float, tol: float = 1e-9) -> int:
    """ceil(x) that snaps values within ``tol`` of an integer onto it."""
    j = round(x)
    if abs(x - j) <= tol * max(1.0, abs(x)):
        return int(j)
    return math.ceil(x)


def rescale_for_rand(instance: Instance, t_pred: int, delta: float, s: float) -> tuple[Instance, int]:
    """Scale costs up so that OPTVAL(t_pred) = delta**k with integer k >= s + 2."""
    if not delta >= math.e:
        raise InstanceError(f"delta must be >= e, got {delta}")
    if not s >= 0:
        raise InstanceError(f"s must be >= 0, got {s}")
    table = build_opt_table(instance)
    target = table.value(t_pred)
    ln_delta = math.log(delta)
    k = max(math.ceil(s) + 2, log_ceil(math.log(target) / ln_delta))
    exponent = k * ln_delta - math.log(target)
    if abs(exponent) <= 1e-12 * max(1.0, k * ln_delta):
        return instance, k
    factor = math.exp(exponent)
    return Instance(
        tuple(RentalOption(o.duration, float(o.cost) * factor) for o in instance.options),
        instance.horizon,
    ), k


def cheapest_option(instance: Instance) -> int:
    return min(range(len(instance.options)), key=lambda i: (instance.options[i].cost, i))


def load_instance(path) -> Instance:
    with open(path) as fh:
        return Instance.from_json(fh.read())


def options_from_pairs(pairs: Iterable[tuple]) -> tuple[RentalOption, ...]:
    return tuple(RentalOption(d, c) for d, c in pairs)
