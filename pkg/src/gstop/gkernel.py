"""One-step sublinear expectation kernel on a recombining lattice.

The ambiguity model is an interval of admissible quadratic-variation rates
(a :class:`VolatilityBand`).  A single kernel step evaluates, per node, the
worst-case (or best-case) trinomial average over the rate chosen at that
node.  Because the one-step objective is affine in the rate, only the band
endpoints are ever examined; ties go to the upper endpoint for the sup
kernel and the lower endpoint for the inf kernel.

Lattice functions are plain ``numpy`` float arrays with one entry per node;
:func:`check_lattice_function` validates shape and finiteness.

Boundary policy: the outermost nodes use a reflected stencil (the ghost
neighbour outside the grid takes the value of the mirror node inside), which
keeps every step monotone, constant preserving, and within the convex hull
of the input.  Grids are expected to be wide enough that the root value is
insensitive to this truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import ValidationError

# A lattice function is a 1-D float array, one value per node.
LatticeFunction = np.ndarray


@dataclass(frozen=True)
class VolatilityBand:
    """Closed interval [sigma2_min, sigma2_max] of variance-per-unit-time rates."""

    sigma2_min: float
    sigma2_max: float

    def __post_init__(self):
        lo, hi = self.sigma2_min, self.sigma2_max
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("volatility band endpoints must be finite")
        if not (0.0 < lo <= hi):
            raise ValidationError(
                f"volatility band needs 0 < sigma2_min <= sigma2_max, got ({lo}, {hi})")

    @property
    def degenerate(self) -> bool:
        return self.sigma2_min == self.sigma2_max


@dataclass(frozen=True)
class LatticeModel:
    """Recombining spatial grid with a uniform time step.

    Nodes sit at ``x0 + i*dx`` for ``i`` in ``[-half_width, half_width]``;
    every time step carries the same node set.  ``dx**2 >= sigma2_max*dt``
    guarantees nonnegative trinomial weights for every admissible rate.
    """

    x0: float
    dx: float
    dt: float
    n_steps: int
    half_width: int
    band: VolatilityBand

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.dx) and math.isfinite(self.dt)):
            raise ValidationError("lattice geometry must be finite")
        if self.dx <= 0.0 or self.dt <= 0.0:
            raise ValidationError("dx and dt must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise ValidationError("n_steps must be a nonnegative integer")
        if int(self.half_width) != self.half_width or self.half_width < 1:
            raise ValidationError("half_width must be an integer >= 1")
        if self.band.sigma2_max * self.dt > self.dx * self.dx:
            raise ValidationError(
                f"stability violated: need dx^2 >= sigma2_max*dt, got "
                f"dx^2={self.dx*self.dx:.6g} < {self.band.sigma2_max*self.dt:.6g}")

    @property
    def n_nodes(self) -> int:
        return 2 * self.half_width + 1

    @property
    def center_index(self) -> int:
        return self.half_width

    def nodes(self) -> np.ndarray:
        """States x0 + i*dx, i = -half_width..half_width."""
        i = np.arange(-self.half_width, self.half_width + 1, dtype=float)
        return self.x0 + i * self.dx


def check_lattice_function(values, model: LatticeModel) -> LatticeFunction:
    """Validate and return a lattice function as a float array."""
    f = np.asarray(values, dtype=float)
    if f.shape != (model.n_nodes,):
        raise ValidationError(
            f"lattice function has shape {f.shape}, expected ({model.n_nodes},)")
    if not np.all(np.isfinite(f)):
        raise ValidationError("lattice function must have finite entries only")
    return f


@dataclass(frozen=True)
class StepKernelChoice:
    """Per-node rate chosen by a kernel step and its trinomial weights."""

    v: np.ndarray
    p_up: np.ndarray
    p_mid: np.ndarray
    p_down: np.ndarray

    @classmethod
    def from_rates(cls, v: np.ndarray, model: LatticeModel) -> "StepKernelChoice":
        q = v * model.dt / (2.0 * model.dx * model.dx)
        return cls(v=v, p_up=q, p_mid=1.0 - 2.0 * q, p_down=q)


def g_function(a, band: VolatilityBand):
    """Sublinear generator: 0.5*(sigma2_max*max(a,0) - sigma2_min*max(-a,0)).

    Accepts scalars or arrays; positively homogeneous and monotone in ``a``.
    """
    a = np.asarray(a, dtype=float)
    out = 0.5 * (band.sigma2_max * np.maximum(a, 0.0)
                 - band.sigma2_min * np.maximum(-a, 0.0))
    return float(out) if out.ndim == 0 else out


def reflect_pad(f: np.ndarray) -> np.ndarray:
    """Append ghost entries mirroring the first/last interior neighbours.

    Works on 1-D arrays or batches with nodes on the last axis.
    """
    if f.ndim == 1:
        return np.concatenate((f[1:2], f, f[-2:-1]))
    return np.concatenate((f[..., 1:2], f, f[..., -2:-1]), axis=-1)


def _second_difference(f: np.ndarray, model: LatticeModel) -> np.ndarray:
    pad = reflect_pad(f)
    return (pad[..., 2:] - 2.0 * f + pad[..., :-2]) / (model.dx * model.dx)


def _step(f, model: LatticeModel, mode: str) -> Tuple[LatticeFunction, StepKernelChoice]:
    f = check_lattice_function(f, model)
    a = _second_difference(f, model)
    lo, hi = model.band.sigma2_min, model.band.sigma2_max
    cand_lo = f + model.dt * (0.5 * lo * a)
    cand_hi = f + model.dt * (0.5 * hi * a)
    if mode == "sup":
        values = np.maximum(cand_lo, cand_hi)
        v = np.where(cand_hi >= cand_lo, hi, lo)
    else:
        values = np.minimum(cand_lo, cand_hi)
        v = np.where(cand_lo <= cand_hi, lo, hi)
    return values, StepKernelChoice.from_rates(v, model)


def step_sup(f, model: LatticeModel) -> Tuple[LatticeFunction, StepKernelChoice]:
    """Worst-case one-step conditional expectation (per-node sup over rates)."""
    return _step(f, model, "sup")


def step_inf(f, model: LatticeModel) -> Tuple[LatticeFunction, StepKernelChoice]:
    """Best-case one-step conditional expectation (per-node inf over rates)."""
    return _step(f, model, "inf")


def maximal_expectation(phi: Callable, band: VolatilityBand, t: float,
                        samples: int = 10_000) -> float:
    """Expectation of phi(accumulated quadratic variation at time t).

    Equals the supremum of ``phi`` over ``[sigma2_min*t, sigma2_max*t]``,
    computed by a uniform grid of ``samples`` interior points plus both
    endpoints.  The default resolution is adequate for Lipschitz integrands
    and for indicators whose plateau is wider than the sample spacing;
    override ``samples`` otherwise.
    """
    if not math.isfinite(t) or t < 0.0:
        raise ValidationError(f"time must be finite and >= 0, got {t}")
    lo, hi = band.sigma2_min * t, band.sigma2_max * t
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    grid = np.linspace(lo, hi, samples + 2)
    try:
        vals = np.asarray(phi(grid), dtype=float)
        if vals.shape != grid.shape:
            raise TypeError
    except Exception:
        vals = np.array([float(phi(x)) for x in grid])
    if not np.all(np.isfinite(vals)):
        raise ValidationError("phi must be finite on the rate interval")
    return float(np.max(vals))
