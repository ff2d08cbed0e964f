"""Learning-augmented multi-option ski rental: algorithms, exact evaluation, and bounds."""

__version__ = "0.1.0"

from .instance import (
    INF,
    Instance,
    InstanceError,
    OptTable,
    RentalOption,
    Schedule,
    bopt,
    build_opt_table,
    normalize_costs,
    opt_schedule,
    options_from_pairs,
    rescale_for_det,
    rescale_for_rand,
)
from .generators import classic_two_option, geometric_options, random_instance, suite
from .algorithms import (
    AlphaDraw,
    DetParams,
    ExecutionTrace,
    Plan,
    RandParams,
    det_plan,
    det_plan_lambda_zero,
    execute_plan,
    rand_plan,
    run_det,
    run_rand,
    sample_alpha,
)
from .evaluator import (
    AlgorithmConfig,
    consistency_ratio,
    exact_expected_cost,
    monte_carlo_expected_cost,
    robustness_ratio,
)
from .tradeoff import chi, rho
