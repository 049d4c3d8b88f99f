"""Continuous-time limits: dyadic exercise-date refinement and the obstacle
variational inequality.

A Bermudan value with exercise dates on the dyadic grid ``k * 2**-n`` of a
unit horizon is computed per level with one shared kernel discretization, so
refinement acts on stopping opportunities only and the ladder of root values
is nondecreasing by construction.  Its continuous-time limit is the solution
of the obstacle problem for the worst-case generator, obtained by projecting
every explicit substep onto the obstacle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import EngineFaultError, ValidationError
from .dynamics import TransitionSpec, generator_step
from .gkernel import check_lattice_function
from .snell import TIE_REL_TOL, PayoffSpec, snell_sup

_LADDER_TOL = 1e-12


def _level_spec(spec: TransitionSpec, n: int) -> TransitionSpec:
    """Per-level spec with dates 2**-n apart and the shared kernel substep."""
    dates = 1 << n
    return TransitionSpec(coeffs=spec.coeffs, band=spec.band,
                          period=1.0 / dates, substeps=spec.substeps // dates,
                          grid=spec.grid)


@dataclass
class RefinementLadder:
    """Root values and surfaces per refinement level over a unit horizon."""

    levels: List[int]
    root_values: List[float]
    surfaces: List[np.ndarray] = field(repr=False)
    horizon: float = 1.0

    def increments(self) -> List[float]:
        return [b - a for a, b in zip(self.root_values, self.root_values[1:])]


def dyadic_ladder(payoff: PayoffSpec, spec: TransitionSpec, n_min: int,
                  n_max: int) -> RefinementLadder:
    """Bermudan values with 2**n exercise dates for n = n_min..n_max.

    ``spec`` must cover the whole unit horizon (period 1) and its substep
    count must be divisible by 2**n_max so every level reuses the same
    kernel step.  A ladder decrease beyond tolerance is an internal fault.
    """
    if not 0 <= n_min <= n_max:
        raise ValidationError("need 0 <= n_min <= n_max")
    if abs(spec.period - 1.0) > 1e-12:
        raise ValidationError("refinement ladder expects a unit-horizon spec")
    if spec.substeps % (1 << n_max) != 0:
        raise ValidationError(
            f"substeps ({spec.substeps}) must be divisible by 2^n_max "
            f"({1 << n_max}) so levels share the kernel step")
    levels, roots, surfaces = [], [], []
    for n in range(n_min, n_max + 1):
        surface, _ = snell_sup(payoff, _level_spec(spec, n), N=1 << n)
        levels.append(n)
        roots.append(surface.root_value)
        surfaces.append(surface.values)
    for a, b in zip(roots, roots[1:]):
        if b < a - _LADDER_TOL:
            raise EngineFaultError(
                f"refinement ladder decreased: {a!r} -> {b!r}")
    return RefinementLadder(levels=levels, root_values=roots, surfaces=surfaces)


@dataclass
class ObstacleSolution:
    """Projected-scheme solution of the obstacle problem.

    ``values`` holds the stored time levels (terminal row last), ``exercise``
    the full-resolution contact masks, ``boundary`` the lowest exercising
    state per stored level (NaN when the contact set is empty there).
    ``discrete_complementarity`` is the max pointwise defect of
    min(u - obstacle, u - continuation), which the projection makes exact;
    ``pde_residual_l1`` is a grid-averaged complementarity residual measured
    with centred differences against the continuous-form generator and is
    the quantity that shrinks under refinement.
    """

    values: np.ndarray          # (store_steps+1, n_nodes)
    times: np.ndarray           # (store_steps+1,)
    obstacle: np.ndarray        # (n_nodes,)
    exercise_full: np.ndarray = field(repr=False)   # bool, (substeps+1, n_nodes)
    boundary: np.ndarray = field(repr=False)        # (store_steps+1,)
    dt: float = 0.0
    dx: float = 0.0
    substeps: int = 0
    store_every: int = 1
    tie_rel_tol: float = TIE_REL_TOL
    discrete_complementarity: float = 0.0
    pde_residual_l1: float = 0.0

    @property
    def root_value(self) -> float:
        return float(self.values[0, self.values.shape[1] // 2])

    def stored_exercise(self) -> np.ndarray:
        return self.exercise_full[:: self.store_every]


def _pde_residual_row(u_prev: np.ndarray, u_mid: np.ndarray, u_next: np.ndarray,
                      exercise_mid: np.ndarray, obstacle: np.ndarray,
                      spec: TransitionSpec) -> Tuple[float, int]:
    """Interior complementarity defect at one time level.

    Measured with centred differences in both time and space against the
    continuous-form generator.  Points within two nodes of the contact
    boundary are excluded: the continuous solution itself has a curvature
    jump there, so the pointwise defect cannot vanish under refinement;
    away from that collar it shrinks at first order.  Returns the summed
    defect and the number of points measured.
    """
    b, h, s2 = spec._node_arrays
    dx, dt = spec.grid.dx, spec.dt
    du_dt = (u_next[1:-1] - u_prev[1:-1]) / (2.0 * dt)
    slope = (u_mid[2:] - u_mid[:-2]) / (2.0 * dx)
    curve = (u_mid[2:] - 2.0 * u_mid[1:-1] + u_mid[:-2]) / (dx * dx)
    gen = None
    for v in (spec.band.sigma2_min, spec.band.sigma2_max):
        cand = (b[1:-1] + v * h[1:-1]) * slope + 0.5 * v * s2[1:-1] * curve
        gen = cand if gen is None else np.maximum(gen, cand)
    defect = np.abs(np.minimum(u_mid[1:-1] - obstacle[1:-1], -(du_dt + gen)))
    flips = np.flatnonzero(exercise_mid[1:] != exercise_mid[:-1])
    keep = np.ones(defect.size, dtype=bool)
    for col in flips:
        lo = max(col - 2, 0)
        keep[lo:col + 3] = False
    return float(np.sum(defect[keep])), int(np.sum(keep))


def solve_obstacle(payoff: PayoffSpec, spec: TransitionSpec,
                   store_steps: Optional[int] = None,
                   tie_rel_tol: float = TIE_REL_TOL) -> ObstacleSolution:
    """Backward sweep ``u <- max(obstacle, generator substep of u)`` at the
    finest time grid of a unit-horizon spec."""
    if abs(spec.period - 1.0) > 1e-12:
        raise ValidationError("obstacle solver expects a unit-horizon spec")
    if payoff.markov is None:
        raise ValidationError("obstacle solver needs a single-function payoff")
    M = spec.substeps
    if store_steps is None:
        store_steps = min(M, 256)
    if store_steps < 1 or M % store_steps != 0:
        raise ValidationError(
            f"store_steps ({store_steps}) must divide the substep count ({M})")
    stride = M // store_steps
    states = spec.grid.nodes()
    obstacle = check_lattice_function(payoff.values_at(0, states), spec.grid)
    tie = tie_rel_tol * (1.0 + np.abs(obstacle))

    values = np.empty((store_steps + 1, spec.grid.n_nodes))
    exercise = np.zeros((M + 1, spec.grid.n_nodes), dtype=bool)
    u = obstacle.copy()
    values[store_steps] = u
    exercise[M] = True
    worst_discrete = 0.0
    residual_sum = 0.0
    residual_points = 0
    u_two_ahead = None
    for k in range(M - 1, -1, -1):
        u_next = u
        cont = generator_step(u_next, spec)
        u = np.maximum(obstacle, cont)
        exercise[k] = (u - obstacle) <= tie
        worst_discrete = max(worst_discrete, float(np.max(np.abs(
            np.minimum(u - obstacle, u - cont)))))
        if u_two_ahead is not None:
            row_sum, row_pts = _pde_residual_row(u, u_next, u_two_ahead,
                                                 exercise[k + 1], obstacle, spec)
            residual_sum += row_sum
            residual_points += row_pts
        u_two_ahead = u_next
        if k % stride == 0:
            values[k // stride] = u
    boundary = np.full(store_steps + 1, math.nan)
    for row in range(store_steps + 1):
        hit = np.flatnonzero(exercise[row * stride])
        if hit.size:
            boundary[row] = states[hit[0]]
    return ObstacleSolution(
        values=values, times=np.linspace(0.0, 1.0, store_steps + 1),
        obstacle=obstacle, exercise_full=exercise, boundary=boundary,
        dt=spec.dt, dx=spec.grid.dx, substeps=M, store_every=stride,
        tie_rel_tol=tie_rel_tol, discrete_complementarity=worst_discrete,
        pde_residual_l1=residual_sum / max(residual_points, 1))


@dataclass(frozen=True)
class HittingReport:
    """Stopped-payoff replay against the solution surface."""

    max_gap: float
    scale: float
    samples: int
    passed: bool


def hitting_time_value_check(solution: ObstacleSolution, payoff: PayoffSpec,
                             spec: TransitionSpec, samples: int = 20,
                             seed: int = 0) -> HittingReport:
    """Re-evaluate the rule `stop at the first contact with the obstacle`
    by an independent worst-case backward sweep and compare with the stored
    surface at sampled (time, node) points.  The tolerance scale is
    5 * (dx + dt) of the scheme."""
    M = solution.substeps
    obstacle = solution.obstacle
    w = obstacle.copy()
    replayed = np.empty_like(solution.values)
    replayed[-1] = w
    for k in range(M - 1, -1, -1):
        w = np.where(solution.exercise_full[k], obstacle,
                     generator_step(w, spec))
        if k % solution.store_every == 0:
            replayed[k // solution.store_every] = w
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, solution.values.shape[0], size=samples)
    cols = rng.integers(0, solution.values.shape[1], size=samples)
    gap = float(np.max(np.abs(replayed[rows, cols] - solution.values[rows, cols])))
    scale = 5.0 * (solution.dx + solution.dt)
    return HittingReport(max_gap=gap, scale=scale, samples=samples,
                         passed=gap <= scale)
