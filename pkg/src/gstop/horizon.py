"""Infinite-horizon values: fixed-point iteration, superharmonic envelopes,
and tail diagnostics.

The value of stopping the Markov dynamics at integer periods solves
``F = max(f, beta * T F)`` with ``T`` the one-period worst-case transition
operator and ``beta`` a per-period discount factor.  Iterating from the
reward itself produces a pointwise nondecreasing sequence converging to the
minimal fixed point; with ``beta = 1`` convergence is only guaranteed on
absorbing or otherwise killed instances, so non-convergence is always
reported, never silently accepted.

Discounting is treated as killing: every operator in this module compounds
``beta`` per unit time, so a step of length ``dt`` carries the factor
``beta ** dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BudgetError, ValidationError
from .dynamics import TransitionSpec, transition_T
from .gkernel import check_lattice_function
from .snell import TIE_REL_TOL, StoppingRegion

_ENVELOPE_COST_CAP = 4_000_000  # generator substeps across all levels


@dataclass(frozen=True)
class IterationConfig:
    """Fixed-point iteration controls.

    ``discount`` is the per-period factor in (0, 1]; 1 reproduces the
    undiscounted setting, anything smaller guarantees geometric convergence.
    """

    tol: float = 1e-9
    max_iter: int = 500
    discount: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise ValidationError("tol must be finite and positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        if not 0.0 < self.discount <= 1.0:
            raise ValidationError("discount must lie in (0, 1]")


@dataclass
class ValueIterationResult:
    values: np.ndarray
    payoff: np.ndarray
    residual: float
    iterations: int
    converged: bool
    min_increment: float       # most negative pointwise increment observed
    region: StoppingRegion     # stationary: nodes where the value meets the reward

    @property
    def root_value(self) -> float:
        return float(self.values[self.values.size // 2])


def _as_node_values(f, spec: TransitionSpec) -> np.ndarray:
    """Evaluate a callable on the grid, or validate an array as-is."""
    if callable(f):
        f = np.asarray(f(spec.grid.nodes()), dtype=float)
    return check_lattice_function(np.asarray(f, dtype=float), spec.grid)


def _bellman(values: np.ndarray, f_vals: np.ndarray, spec: TransitionSpec,
             discount: float) -> np.ndarray:
    return np.maximum(f_vals, discount * transition_T(values, spec))


def value_iterate(f: Callable, spec: TransitionSpec, cfg: IterationConfig,
                  start: Optional[np.ndarray] = None) -> ValueIterationResult:
    """Iterate ``F <- max(f, beta*T F)`` from ``F = f`` (or ``start``).

    Started at the reward, iterates are pointwise nondecreasing and the limit
    is the minimal fixed point dominating the reward.
    """
    f_vals = _as_node_values(f, spec)
    current = f_vals.copy() if start is None else check_lattice_function(
        np.asarray(start, dtype=float), spec.grid)
    residual = math.inf
    min_increment = 0.0
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        updated = _bellman(current, f_vals, spec, cfg.discount)
        delta = updated - current
        min_increment = min(min_increment, float(np.min(delta)))
        residual = float(np.max(np.abs(delta)))
        current = updated
        if residual < cfg.tol:
            break
    final_residual = float(np.max(np.abs(
        _bellman(current, f_vals, spec, cfg.discount) - current)))
    tie = TIE_REL_TOL * (1.0 + np.abs(f_vals))
    region = StoppingRegion.from_stationary_mask(current - f_vals <= tie)
    return ValueIterationResult(values=current, payoff=f_vals,
                                residual=final_residual, iterations=iterations,
                                converged=final_residual < cfg.tol,
                                min_increment=min_increment, region=region)


def superharmonic_envelope(g: Callable, spec: TransitionSpec, n_max: int,
                           discount: float = 1.0,
                           cost_cap: int = _ENVELOPE_COST_CAP) -> np.ndarray:
    """Iterated envelope construction for the smallest superharmonic dominator.

    Level ``n`` replaces the current function with its running max over the
    discounted semigroup sampled at times ``k * 2**-n`` periods for ``k`` up
    to ``4**n``; levels are pointwise nondecreasing because waiting zero time
    is always allowed.  Every level's times are realized on the kernel
    sub-grid of the given spec (``spec.substeps`` must be divisible by
    ``2**n_max``), so all levels share one base step and functions that are
    superharmonic on that grid are left unchanged.
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if not 0.0 < discount <= 1.0:
        raise ValidationError("discount must lie in (0, 1]")
    if spec.substeps % (1 << n_max) != 0:
        raise ValidationError(
            f"spec.substeps ({spec.substeps}) must be divisible by 2^n_max "
            f"({1 << n_max}) to realize the dyadic time sets on the kernel grid")
    total_cost = spec.substeps * ((1 << (n_max + 1)) - 2)
    if total_cost > cost_cap:
        raise BudgetError(
            f"envelope to level {n_max} needs ~{total_cost} substeps, "
            f"cap is {cost_cap}", estimate=total_cost, budget=cost_cap)
    current = _as_node_values(g, spec)
    for n in range(1, n_max + 1):
        sub = TransitionSpec(coeffs=spec.coeffs, band=spec.band,
                             period=spec.period * 2.0 ** (-n),
                             substeps=spec.substeps // (1 << n), grid=spec.grid)
        factor = discount ** (2.0 ** (-n))
        iterate = current.copy()
        best = current.copy()
        for _ in range(4 ** n):
            iterate = factor * transition_T(iterate, sub)
            np.maximum(best, iterate, out=best)
        current = best
    return current


@dataclass(frozen=True)
class SuperharmonicReport:
    """Gaps (T^k F - F)+ for k = 1..horizons under the discounted operator."""

    max_gap: float
    gaps: tuple
    tol: float
    passed: bool


def superharmonic_check(F, spec: TransitionSpec, discount: float = 1.0,
                        horizons: int = 5, tol: float = 1e-10) -> SuperharmonicReport:
    """Check ``beta^k T^k F <= F`` nodewise for k = 1..horizons."""
    F = check_lattice_function(F, spec.grid)
    gaps = []
    iterate = F.copy()
    for _ in range(horizons):
        iterate = discount * transition_T(iterate, spec)
        gaps.append(float(np.max(iterate - F)))
    worst = max(0.0, max(gaps))
    return SuperharmonicReport(max_gap=worst, gaps=tuple(gaps), tol=tol,
                               passed=worst < tol)


@dataclass(frozen=True)
class TailReport:
    """Worst-case probabilities that the first hit of the region is late."""

    horizons: tuple
    tails: tuple
    nonincreasing: bool
    final: float


def admissibility_tail(region: StoppingRegion, spec: TransitionSpec,
                       N_list) -> TailReport:
    """Worst-case (sup over endpoint policies) probability that the first
    entry into the stationary region happens after N periods, for each N.

    Computed by a backward sweep on survival indicators: probabilities stay
    in [0, 1] because every step is a monotone average.
    """
    if not region.stationary:
        raise ValidationError("tail diagnostics need a stationary region")
    mask = region.mask_at(0)
    if mask.shape != (spec.grid.n_nodes,):
        raise ValidationError("region mask does not match the grid")
    horizons = sorted(int(n) for n in N_list)
    if not horizons or horizons[0] < 0:
        raise ValidationError("horizons must be nonnegative integers")
    outside = (~mask).astype(float)
    survive = outside.copy()    # after 0 periods: survived iff started outside
    tails = {}
    steps_done = 0
    for N in horizons:
        while steps_done < N:
            survive = outside * transition_T(survive, spec)
            steps_done += 1
        tails[N] = float(survive[spec.grid.center_index])
    seq = tuple(tails[N] for N in horizons)
    nonincr = all(seq[k + 1] <= seq[k] + 1e-12 for k in range(len(seq) - 1))
    return TailReport(horizons=tuple(horizons), tails=seq,
                      nonincreasing=nonincr, final=seq[-1])


@dataclass(frozen=True)
class FixedPointDiagnostic:
    """Multi-start uniqueness surrogate: gap between the fixed points reached
    from the reward and from a dominating constant."""

    gap: float
    lower_converged: bool
    upper_converged: bool
    multiple: bool


def fixed_point_diagnostic(f: Callable, spec: TransitionSpec,
                           cfg: IterationConfig,
                           gap_tol: float = 1e-6) -> FixedPointDiagnostic:
    """Run the iteration from below (the reward) and from above (a constant
    dominating it); a persistent gap flags fixed-point multiplicity.  The
    true uniqueness condition involves behaviour at infinity and is not
    machine-checkable; this surrogate only reports, it does not decide.
    """
    lower = value_iterate(f, spec, cfg)
    f_vals = lower.payoff
    top = float(np.max(np.abs(f_vals))) + 1.0
    upper = value_iterate(f, spec, cfg, start=np.full_like(f_vals, top))
    gap = float(np.max(np.abs(upper.values - lower.values)))
    return FixedPointDiagnostic(gap=gap, lower_converged=lower.converged,
                                upper_converged=upper.converged,
                                multiple=gap > gap_tol)
