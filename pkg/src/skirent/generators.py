"""Instance families and prediction scenarios used by the tests and sweeps."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .instance import (
    INF,
    Instance,
    InstanceError,
    RentalOption,
    build_opt_table,
    normalize_costs,
)

#: distinct optval values must differ by more than this (relative)
BREAKPOINT_SEPARATION = 1e-9


@dataclass(frozen=True)
class ScenarioSpec:
    family: str
    params: tuple
    true_T: int
    predicted_T: int

    def __post_init__(self):
        if self.true_T < 1 or self.predicted_T < 1:
            raise InstanceError("T and T_pred must be >= 1")


def classic_two_option(buy_cost, horizon: int | None = None) -> Instance:
    """Rent for one day at cost 1 or buy at ``buy_cost``."""
    B = Fraction(buy_cost)
    if B < 1:
        raise InstanceError(f"buy cost must be >= 1, got {B}")
    if horizon is None:
        horizon = 4 * math.ceil(B)
    return Instance((RentalOption(1, 1), RentalOption(INF, B)), horizon)


def geometric_options(base, count: int, horizon: int | None = None) -> Instance:
    b = Fraction(base)
    if b <= 1:
        raise InstanceError("base must exceed 1")
    if count < 2:
        raise InstanceError("need at least two finite options")
    opts = [RentalOption(math.ceil(b**i), b**i) for i in range(count)]
    opts.append(RentalOption(INF, b**count))
    if horizon is None:
        horizon = 2 * math.ceil(b**count)
    inst, _ = normalize_costs(Instance(tuple(opts), horizon))
    return inst


def _separated(values) -> bool:
    vals = sorted(set(values))
    return all(b - a > BREAKPOINT_SEPARATION * b for a, b in zip(vals, vals[1:]))


def random_instance(seed: int, n_options: int = 4, max_days: int = 10, max_cost: int = 12) -> Instance:
    """Random menu with ``n_options - 1`` finite options and one buy option.

    Costs are rationals with denominator at most 64.  The horizon is set to
    1.5 times the first day on which buying becomes optimal (at least 12).
    """
    if n_options < 2 or max_days < 1 or max_cost < 1:
        raise InstanceError("bounds must be positive and allow a rental plus a buy")
    rng = random.Random(seed)
    while True:
        opts = []
        for _ in range(n_options - 1):
            days = rng.randint(1, max_days)
            cost = Fraction(rng.randint(64, 64 * max_cost), rng.randint(16, 64))
            opts.append(RentalOption(days, cost))
        cheapest = min(o.cost for o in opts)
        q = rng.randint(16, 64)
        buy = Fraction(rng.randint(math.ceil(2 * cheapest * q), math.ceil(8 * cheapest * q)), q)
        opts.insert(rng.randrange(n_options), RentalOption(INF, buy))
        inst, _ = normalize_costs(Instance(tuple(opts), 1))
        table = build_opt_table(inst)
        if not _separated(table.optval):
            continue
        horizon = max(12, math.ceil(1.5 * table.size))
        return inst.with_horizon(horizon)


def suite(n_random: int = 20) -> list[tuple[str, Instance]]:
    """Instance suite: classic B in {2, 4, 10}, geometric (2, 4), random seeds 0..n-1."""
    out = [(f"classic-B{B}", classic_two_option(B)) for B in (2, 4, 10)]
    out.append(("geometric-b2-n4", geometric_options(2, 4)))
    out += [(f"random-s{seed}", random_instance(seed)) for seed in range(n_random)]
    return out


def prediction_grid(instance: Instance, count: int = 4) -> list[int]:
    """A spread of predicted day counts across 1..horizon."""
    H = instance.horizon
    picks = {1, H}
    for j in range(1, count - 1):
        picks.add(max(1, round(j * H / (count - 1))))
    return sorted(picks)
