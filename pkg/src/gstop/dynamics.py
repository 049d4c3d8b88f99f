"""Markov state dynamics under volatility uncertainty.

The state follows a one-dimensional diffusion whose driving noise has an
ambiguous quadratic-variation rate ``v`` in a :class:`~gstop.gkernel.VolatilityBand`,
with drift ``b(x)``, a rate-proportional drift ``h(x)`` (the contribution of
the quadratic-variation integral), and diffusion coefficient ``sigma(x)``.
One explicit substep of the induced nonlinear generator is

    f(x) + dt * sup_v [ (b(x) + v*h(x)) * f'(x) + 0.5 * v * sigma(x)^2 * f''(x) ]

with the first derivative upwinded by the sign of the effective drift and
the second derivative central.  The per-node objective is affine in ``v``,
so only the band endpoints are examined.  The one-period transition
operator ``transition_T`` composes substeps.

All steps are monotone (weights sum to one and are nonnegative under the
stability condition), hence contractions in the sup norm, constant
preserving, and order preserving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Tuple

import numpy as np

from .errors import StabilityError, ValidationError
from .gkernel import (LatticeFunction, LatticeModel, VolatilityBand,
                      check_lattice_function, reflect_pad)


@dataclass(frozen=True)
class GsdeCoefficients:
    """State-dependent coefficients (b, h, sigma) with a declared Lipschitz constant.

    ``lip_const`` bounds |b(x)-b(y)| + |h(x)-h(y)| + |sigma(x)-sigma(y)|
    by lip_const*|x-y|; it is spot-checked on random grid pairs when a
    transition spec is built.
    """

    b: Callable[[np.ndarray], np.ndarray]
    h: Callable[[np.ndarray], np.ndarray]
    sigma: Callable[[np.ndarray], np.ndarray]
    lip_const: float
    name: str = "custom"

    @classmethod
    def affine(cls, b0: float = 0.0, b1: float = 0.0, h0: float = 0.0,
               h1: float = 0.0, s0: float = 1.0, s1: float = 0.0) -> "GsdeCoefficients":
        """b(x)=b0+b1*x, h(x)=h0+h1*x, sigma(x)=s0+s1*x."""
        return cls(
            b=lambda x: b0 + b1 * np.asarray(x, dtype=float),
            h=lambda x: h0 + h1 * np.asarray(x, dtype=float),
            sigma=lambda x: s0 + s1 * np.asarray(x, dtype=float),
            lip_const=abs(b1) + abs(h1) + abs(s1),
            name="affine",
        )

    @classmethod
    def geometric(cls, drift: float = 0.0, carry: float = 0.0,
                  vol: float = 1.0) -> "GsdeCoefficients":
        """All coefficients proportional to the state: b=drift*x, h=carry*x, sigma=vol*x."""
        return cls(
            b=lambda x: drift * np.asarray(x, dtype=float),
            h=lambda x: carry * np.asarray(x, dtype=float),
            sigma=lambda x: vol * np.asarray(x, dtype=float),
            lip_const=abs(drift) + abs(carry) + abs(vol),
            name="geometric",
        )

    @classmethod
    def from_table(cls, xs, b_vals, h_vals, sigma_vals) -> "GsdeCoefficients":
        """Piecewise-linear coefficients interpolated from a table."""
        xs = np.asarray(xs, dtype=float)
        cols = [np.asarray(v, dtype=float) for v in (b_vals, h_vals, sigma_vals)]
        if xs.ndim != 1 or xs.size < 2 or any(c.shape != xs.shape for c in cols):
            raise ValidationError("table coefficients need matching 1-D arrays of length >= 2")
        if not np.all(np.diff(xs) > 0):
            raise ValidationError("table abscissae must be strictly increasing")
        slopes = sum(np.max(np.abs(np.diff(c) / np.diff(xs))) for c in cols)
        bt, ht, st = cols
        return cls(
            b=lambda x: np.interp(x, xs, bt),
            h=lambda x: np.interp(x, xs, ht),
            sigma=lambda x: np.interp(x, xs, st),
            lip_const=float(slopes),
            name="table",
        )

    def lipschitz_spot_check(self, lo: float, hi: float, pairs: int = 64,
                             seed: int = 0) -> float:
        """Max observed Lipschitz ratio over random pairs in [lo, hi]."""
        rng = np.random.default_rng(seed)
        x = rng.uniform(lo, hi, size=pairs)
        y = rng.uniform(lo, hi, size=pairs)
        keep = np.abs(x - y) > 1e-9 * (1.0 + abs(hi - lo))
        x, y = x[keep], y[keep]
        if x.size == 0:
            return 0.0
        num = (np.abs(self.b(x) - self.b(y)) + np.abs(self.h(x) - self.h(y))
               + np.abs(self.sigma(x) - self.sigma(y)))
        return float(np.max(num / np.abs(x - y)))


@dataclass(frozen=True)
class TransitionSpec:
    """One Markov period of the dynamics on a fixed grid geometry.

    ``grid`` supplies geometry only (x0, dx, half_width, band); the substep
    length is ``period / substeps`` and must satisfy the monotone-scheme
    bound with the worst-case per-node drift and diffusion.
    """

    coeffs: GsdeCoefficients
    band: VolatilityBand
    period: float
    substeps: int
    grid: LatticeModel

    def __post_init__(self):
        if not math.isfinite(self.period) or self.period <= 0.0:
            raise ValidationError("period must be finite and positive")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValidationError("substeps must be an integer >= 1")
        if self.grid.band != self.band:
            raise ValidationError("grid band must match the transition band")
        bad = _stability_violation(self)
        if bad is not None:
            idx, state, req = bad
            raise StabilityError(
                f"substep dt={self.dt:.6g} violates stability at node {idx} "
                f"(state {state:.6g}); need dt <= {req:.6g}",
                node_index=idx, state=state, dt=self.dt, required_dt=req)
        observed = self.coeffs.lipschitz_spot_check(
            float(self.grid.nodes()[0]), float(self.grid.nodes()[-1]))
        if observed > self.coeffs.lip_const * (1.0 + 1e-9) + 1e-12:
            raise ValidationError(
                f"coefficients exceed declared Lipschitz constant: observed "
                f"{observed:.6g} > declared {self.coeffs.lip_const:.6g}")

    @property
    def dt(self) -> float:
        return self.period / self.substeps

    @cached_property
    def _node_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.grid.nodes()
        s = np.asarray(self.coeffs.sigma(x), dtype=float)
        return (np.asarray(self.coeffs.b(x), dtype=float),
                np.asarray(self.coeffs.h(x), dtype=float),
                s * s)

    @classmethod
    def build(cls, coeffs: GsdeCoefficients, band: VolatilityBand, period: float,
              x0: float, dx: float, half_width: int,
              substeps: int | None = None) -> "TransitionSpec":
        """Construct grid geometry and, if unset, the smallest power-of-two
        substep count meeting stability."""
        # geometry carrier; its own dt is the largest pure-kernel-stable value
        grid = LatticeModel(x0=x0, dx=dx, dt=dx * dx / band.sigma2_max,
                            n_steps=0, half_width=half_width, band=band)
        if substeps is None:
            req = _required_dt(coeffs, band, grid)
            substeps = 1
            while period / substeps > req:
                substeps *= 2
        return cls(coeffs=coeffs, band=band, period=period,
                   substeps=int(substeps), grid=grid)


def _step_rate_bound(coeffs: GsdeCoefficients, band: VolatilityBand,
                     grid: LatticeModel) -> np.ndarray:
    """Per-node bound R(x) with stability iff dt * max R <= 1."""
    x = grid.nodes()
    b = np.asarray(coeffs.b(x), dtype=float)
    h = np.asarray(coeffs.h(x), dtype=float)
    s2 = np.asarray(coeffs.sigma(x), dtype=float) ** 2
    rate = np.zeros_like(x)
    for v in (band.sigma2_min, band.sigma2_max):
        mu = b + v * h
        rate = np.maximum(rate, np.abs(mu) / grid.dx + v * s2 / (grid.dx * grid.dx))
    return rate


def _required_dt(coeffs: GsdeCoefficients, band: VolatilityBand,
                 grid: LatticeModel) -> float:
    worst = float(np.max(_step_rate_bound(coeffs, band, grid)))
    return math.inf if worst == 0.0 else 1.0 / worst


def _stability_violation(spec: TransitionSpec):
    rate = _step_rate_bound(spec.coeffs, spec.band, spec.grid)
    worst_idx = int(np.argmax(rate))
    worst = float(rate[worst_idx])
    if worst > 0.0 and spec.dt * worst > 1.0 + 1e-12:
        return worst_idx, float(spec.grid.nodes()[worst_idx]), 1.0 / worst
    return None


def _generator_candidates(f: np.ndarray, spec: TransitionSpec):
    """Candidate substep values for both band endpoints (nodes on last axis)."""
    b, h, s2 = spec._node_arrays
    dx, dt = spec.grid.dx, spec.dt
    pad = reflect_pad(f)
    up, down = pad[..., 2:], pad[..., :-2]
    d2 = (up - 2.0 * f + down) / (dx * dx)
    fwd = (up - f) / dx
    bwd = (f - down) / dx
    out = []
    for v in (spec.band.sigma2_min, spec.band.sigma2_max):
        mu = b + v * h
        slope = np.where(mu >= 0.0, fwd, bwd)
        out.append(f + dt * (mu * slope + 0.5 * (v * s2) * d2))
    return out


def generator_step(f, spec: TransitionSpec, mode: str = "sup") -> LatticeFunction:
    """One explicit substep of the nonlinear generator."""
    values, _ = generator_step_with_choice(f, spec, mode)
    return values


def generator_step_with_choice(f, spec: TransitionSpec, mode: str = "sup"
                               ) -> Tuple[LatticeFunction, np.ndarray]:
    """One substep plus the per-node maximizing (or minimizing) rate."""
    if mode not in ("sup", "inf"):
        raise ValidationError(f"mode must be 'sup' or 'inf', got {mode!r}")
    f = check_lattice_function(f, spec.grid)
    bad = _stability_violation(spec)
    if bad is not None:
        idx, state, req = bad
        raise StabilityError(
            f"substep dt={spec.dt:.6g} violates stability at node {idx}",
            node_index=idx, state=state, dt=spec.dt, required_dt=req)
    cand_lo, cand_hi = _generator_candidates(f, spec)
    lo, hi = spec.band.sigma2_min, spec.band.sigma2_max
    if mode == "sup":
        values = np.maximum(cand_lo, cand_hi)
        v = np.where(cand_hi >= cand_lo, hi, lo)
    else:
        values = np.minimum(cand_lo, cand_hi)
        v = np.where(cand_lo <= cand_hi, lo, hi)
    return values, v


def transition_T(f, spec: TransitionSpec, mode: str = "sup") -> LatticeFunction:
    """One-period transition operator: ``substeps`` composed generator steps."""
    values, _ = transition_T_with_choice(f, spec, mode)
    return values


def transition_T_with_choice(f, spec: TransitionSpec, mode: str = "sup"
                             ) -> Tuple[LatticeFunction, np.ndarray]:
    """One period of the transition operator plus the rate chosen at the
    period's first substep (the instantaneous control at the period start)."""
    values = check_lattice_function(f, spec.grid)
    first_v = None
    for k in range(spec.substeps):
        values, v = generator_step_with_choice(values, spec, mode)
        if k == spec.substeps - 1:
            first_v = v
    # the backward sweep applies substeps in reverse time, so the control
    # acting at the period start is the one from the last composed substep
    return values, first_v


@dataclass(frozen=True)
class ConsistencyReport:
    """Semigroup self-check result."""

    s: int
    t: int
    max_discrepancy: float
    passed: bool


def markov_consistency_check(f: Callable, spec: TransitionSpec, s: int, t: int,
                             tol: float = 1e-12) -> ConsistencyReport:
    """Verify the discrete semigroup property T^(s+t) f = T^s (T^t f) nodewise."""
    if s < 1 or t < 1:
        raise ValidationError("s and t must be >= 1 periods")
    vals = check_lattice_function(np.asarray(f(spec.grid.nodes()), dtype=float),
                                  spec.grid)
    lhs = vals
    for _ in range(s + t):
        lhs = transition_T(lhs, spec)
    rhs = vals
    for _ in range(t):
        rhs = transition_T(rhs, spec)
    for _ in range(s):
        rhs = transition_T(rhs, spec)
    gap = float(np.max(np.abs(lhs - rhs)))
    return ConsistencyReport(s=s, t=t, max_discrepancy=gap, passed=gap < tol)
