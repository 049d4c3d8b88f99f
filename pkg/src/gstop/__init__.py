"""Optimal stopping under volatility uncertainty.

Lattice kernels for sublinear (worst-case) expectations, robust Snell
envelopes with stopping regions, infinite-horizon fixed points, dyadic
refinement toward the obstacle variational inequality, and exhaustive
small-instance oracles that certify every construction.
"""

__version__ = "0.1.0"

from .errors import (BudgetError, ConfigError, EngineError, EngineFaultError,
                     StabilityError, ValidationError)
from .gkernel import (LatticeFunction, LatticeModel, StepKernelChoice,
                      VolatilityBand, g_function, maximal_expectation,
                      step_inf, step_sup)
from .dynamics import (GsdeCoefficients, TransitionSpec, generator_step,
                       markov_consistency_check, transition_T)
from .snell import (PayoffSpec, StoppingRegion, ValueSurface,
                    martingale_to_hit_check, snell_inf, snell_sup,
                    wald_bellman_finite)
from .horizon import (IterationConfig, admissibility_tail,
                      fixed_point_diagnostic, superharmonic_check,
                      superharmonic_envelope, value_iterate)
from .refine import (ObstacleSolution, RefinementLadder, dyadic_ladder,
                     hitting_time_value_check, solve_obstacle)
from . import oracle

__all__ = [
    "BudgetError", "ConfigError", "EngineError", "EngineFaultError",
    "StabilityError", "ValidationError",
    "LatticeFunction", "LatticeModel", "StepKernelChoice", "VolatilityBand",
    "g_function", "maximal_expectation", "step_inf", "step_sup",
    "GsdeCoefficients", "TransitionSpec", "generator_step",
    "markov_consistency_check", "transition_T",
    "PayoffSpec", "StoppingRegion", "ValueSurface", "martingale_to_hit_check",
    "snell_inf", "snell_sup", "wald_bellman_finite",
    "IterationConfig", "admissibility_tail", "fixed_point_diagnostic",
    "superharmonic_check", "superharmonic_envelope", "value_iterate",
    "ObstacleSolution", "RefinementLadder", "dyadic_ladder",
    "hitting_time_value_check", "solve_obstacle",
    "oracle",
    "__version__",
]
