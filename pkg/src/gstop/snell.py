"""Finite-horizon robust Snell envelopes and stopping regions.

The value surface is built by backward induction: the terminal value equals
the terminal payoff, and each earlier value combines the current payoff with
the one-step worst-case continuation value - pointwise max for the sup
variant (stop to collect the most), pointwise min for the inf variant (the
stopper minimizes while the continuation expectation stays worst-case, a
min-max game).  Both variants therefore step with the same sup kernel; only
the combine differs.  The sup surface is the smallest supermartingale under
the kernel dominating the payoff; the inf surface is the largest
submartingale it dominates.  The stopping region collects the nodes where
the value meets the payoff, and the first hit of that region is an optimal
stopping rule.

Backward steps come either from a plain :class:`~gstop.gkernel.LatticeModel`
(one kernel step per stage) or from a :class:`~gstop.dynamics.TransitionSpec`
(one Markov period per stage).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ValidationError
from .dynamics import TransitionSpec, transition_T, transition_T_with_choice
from .gkernel import LatticeModel, check_lattice_function, step_sup

# default numerical proxy for the exact-equality region membership test
TIE_REL_TOL = 1e-10


@dataclass(frozen=True)
class PayoffSpec:
    """Reward specification: a single state function or one function per step.

    ``lower``/``upper`` are declared bounds used as evaluation guards; they
    default to unchecked.  The single-function (Markov) case expects a
    bounded, Lipschitz reward on the grid span.
    """

    markov: Optional[Callable] = None
    per_step: Optional[Tuple[Callable, ...]] = None
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if (self.markov is None) == (self.per_step is None):
            raise ValidationError("specify exactly one of markov or per_step")
        if not self.lower <= self.upper:
            raise ValidationError("lower bound must not exceed upper bound")

    @classmethod
    def from_function(cls, f: Callable, lower: float = -math.inf,
                      upper: float = math.inf) -> "PayoffSpec":
        return cls(markov=f, lower=lower, upper=upper)

    @classmethod
    def from_steps(cls, fns: Sequence[Callable], lower: float = -math.inf,
                   upper: float = math.inf) -> "PayoffSpec":
        return cls(per_step=tuple(fns), lower=lower, upper=upper)

    @classmethod
    def constant_sequence(cls, values: Sequence[float]) -> "PayoffSpec":
        """Deterministic payoff sequence, constant across nodes at each step."""
        vals = [float(v) for v in values]
        return cls(per_step=tuple((lambda c: (lambda x: np.full_like(
            np.asarray(x, dtype=float), c)))(v) for v in vals))

    @property
    def n_declared_steps(self) -> Optional[int]:
        return None if self.per_step is None else len(self.per_step) - 1

    def values_at(self, n: int, states: np.ndarray) -> np.ndarray:
        if self.per_step is not None:
            if not 0 <= n < len(self.per_step):
                raise ValidationError(
                    f"payoff defined for steps 0..{len(self.per_step)-1}, got {n}")
            fn = self.per_step[n]
        else:
            fn = self.markov
        out = np.asarray(fn(np.asarray(states, dtype=float)), dtype=float)
        if out.shape != np.shape(states):
            raise ValidationError("payoff function must map states elementwise")
        if not np.all(np.isfinite(out)):
            raise ValidationError(f"payoff at step {n} has non-finite values")
        slack = 1e-12 * (1.0 + np.max(np.abs(out)))
        if np.any(out < self.lower - slack) or np.any(out > self.upper + slack):
            raise ValidationError(f"payoff at step {n} leaves declared bounds")
        return out


@dataclass
class ValueSurface:
    """Backward-induction values, the payoff they dominate, and the rates chosen."""

    values: np.ndarray       # (N+1, n_nodes)
    payoff: np.ndarray       # (N+1, n_nodes)
    chosen_rate: np.ndarray  # (N, n_nodes): rate acting at the start of step n
    mode: str                # "sup" or "inf"
    model: Optional[LatticeModel] = None
    spec: Optional[TransitionSpec] = None

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    @property
    def center_index(self) -> int:
        g = self.model if self.model is not None else self.spec.grid
        return g.center_index

    @property
    def root_value(self) -> float:
        return float(self.values[0, self.center_index])

    def states(self) -> np.ndarray:
        g = self.model if self.model is not None else self.spec.grid
        return g.nodes()

    def continuation(self, n: int) -> np.ndarray:
        """Recompute the step-n continuation value from the stored surface.

        Both variants continue under the worst-case (sup) kernel; the inf
        variant only changes how payoff and continuation are combined.
        """
        nxt = self.values[n + 1]
        if self.model is not None:
            return step_sup(nxt, self.model)[0]
        return transition_T(nxt, self.spec, "sup")


@dataclass
class StoppingRegion:
    """Per-step node sets where the value meets the payoff.

    Membership uses the tolerance ``value - payoff <= tie_rel_tol*(1+|payoff|)``;
    exact equality is meaningless in floating point.  On ties the certified
    object is the value, not the region's boundary nodes.
    """

    masks: np.ndarray  # bool, (N+1, n_nodes); row N is all True
    tie_rel_tol: float = TIE_REL_TOL
    stationary: bool = False

    @classmethod
    def from_surface(cls, surface: ValueSurface,
                     tie_rel_tol: float = TIE_REL_TOL) -> "StoppingRegion":
        gap = surface.values - surface.payoff
        masks = np.abs(gap) <= tie_rel_tol * (1.0 + np.abs(surface.payoff))
        masks[-1, :] = True
        return cls(masks=masks, tie_rel_tol=tie_rel_tol)

    @classmethod
    def from_stationary_mask(cls, mask: np.ndarray,
                             tie_rel_tol: float = TIE_REL_TOL) -> "StoppingRegion":
        return cls(masks=np.asarray(mask, dtype=bool).reshape(1, -1),
                   tie_rel_tol=tie_rel_tol, stationary=True)

    @property
    def n_steps(self) -> int:
        return self.masks.shape[0] - 1

    def mask_at(self, n: int) -> np.ndarray:
        return self.masks[0] if self.stationary else self.masks[n]

    def first_hit(self, j: int, path_nodes: Sequence[int]) -> int:
        """First step >= j whose visited node lies in the region.

        ``path_nodes[k]`` is the node index occupied at step ``j + k``.  The
        terminal step always stops, so a full-length path always hits.
        """
        for k, node in enumerate(path_nodes):
            if self.mask_at(min(j + k, self.n_steps))[node]:
                return j + k
        raise ValidationError("path ended before reaching the terminal step")


StageModel = Union[LatticeModel, TransitionSpec]


def _stage_geometry(model: StageModel) -> LatticeModel:
    return model if isinstance(model, LatticeModel) else model.grid


def _stage_step(values: np.ndarray, model: StageModel
                ) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(model, LatticeModel):
        out, choice = step_sup(values, model)
        return out, choice.v
    return transition_T_with_choice(values, model, "sup")


def _snell(payoff: PayoffSpec, model: StageModel, N: Optional[int], mode: str
           ) -> Tuple[ValueSurface, StoppingRegion]:
    geom = _stage_geometry(model)
    if N is None:
        N = payoff.n_declared_steps if payoff.n_declared_steps is not None \
            else geom.n_steps
    if N < 0:
        raise ValidationError("horizon must be >= 0 steps")
    if payoff.n_declared_steps is not None and payoff.n_declared_steps < N:
        raise ValidationError(
            f"payoff declares {payoff.n_declared_steps} steps but horizon is {N}")
    states = geom.nodes()
    pay = np.stack([payoff.values_at(n, states) for n in range(N + 1)])
    values = np.empty_like(pay)
    rates = np.empty((N, geom.n_nodes))
    values[N] = pay[N]
    combine = np.maximum if mode == "sup" else np.minimum
    for n in range(N - 1, -1, -1):
        cont, v = _stage_step(values[n + 1], model)
        values[n] = combine(pay[n], cont)
        rates[n] = v
    surface = ValueSurface(values=values, payoff=pay, chosen_rate=rates, mode=mode,
                           model=model if isinstance(model, LatticeModel) else None,
                           spec=model if isinstance(model, TransitionSpec) else None)
    return surface, StoppingRegion.from_surface(surface)


def snell_sup(payoff: PayoffSpec, model: StageModel, N: Optional[int] = None
              ) -> Tuple[ValueSurface, StoppingRegion]:
    """Robust optimal-stopping value: max of payoff and worst-case continuation."""
    return _snell(payoff, model, N, "sup")


def snell_inf(payoff: PayoffSpec, model: StageModel, N: Optional[int] = None
              ) -> Tuple[ValueSurface, StoppingRegion]:
    """Dual construction: min of payoff and worst-case continuation."""
    return _snell(payoff, model, N, "inf")


@dataclass
class WaldBellmanResult:
    """Fixed-horizon dynamic-programming iterates and their cross-check gap."""

    iterates: List[np.ndarray]   # F^0 .. F^N
    factorization_gap: float     # max |surface value - F^(N-n)| over (n, node)

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]


def wald_bellman_finite(f: Callable, spec: TransitionSpec, N: int) -> WaldBellmanResult:
    """Iterate F^n = max(f, T F^(n-1)) from F^0 = f, and verify that the
    backward-induction surface for the same reward factors through the
    iterates stage by stage."""
    if N < 0:
        raise ValidationError("N must be >= 0")
    states = spec.grid.nodes()
    f_vals = check_lattice_function(np.asarray(f(states), dtype=float), spec.grid)
    iterates = [f_vals]
    for _ in range(N):
        iterates.append(np.maximum(f_vals, transition_T(iterates[-1], spec)))
    surface, _ = snell_sup(PayoffSpec.from_function(f), spec, N)
    gap = 0.0
    for n in range(N + 1):
        gap = max(gap, float(np.max(np.abs(surface.values[n] - iterates[N - n]))))
    return WaldBellmanResult(iterates=iterates, factorization_gap=gap)


@dataclass(frozen=True)
class MartingaleReport:
    """Stopped-surface replay result."""

    max_violation: float
    tol: float
    passed: bool
    checked_points: int


def martingale_to_hit_check(surface: ValueSurface, region: StoppingRegion,
                            tol: float = 1e-12) -> MartingaleReport:
    """Replay the surface forward: wherever the region has not been hit, the
    value must equal the one-step continuation value (the stopped surface is
    a martingale under the kernel up to the first hit)."""
    if region.masks.shape != surface.values.shape:
        raise ValidationError("surface and region must come from the same run")
    worst = 0.0
    checked = 0
    for n in range(surface.n_steps):
        cont = surface.continuation(n)
        going = ~region.mask_at(n)
        if np.any(going):
            worst = max(worst, float(np.max(
                np.abs(surface.values[n][going] - cont[going]))))
            checked += int(np.sum(going))
    return MartingaleReport(max_violation=worst, tol=tol,
                            passed=worst < tol, checked_points=checked)
