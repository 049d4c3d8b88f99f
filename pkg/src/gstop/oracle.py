"""Ground-truth engines for tiny instances.

Small stopping problems are certified by literal enumeration: every adapted
stopping rule (one stop/continue bit per reachable time-node pair) is
crossed with per-node endpoint rate choices, and expectations are evaluated
by plain linear trinomial sweeps.  Policies never need interior rates
because the per-node objective is affine in the rate, so an endpoint policy
attains every extremum.

Also provides classical linear-expectation comparators (lattice backward
induction, a binomial-tree American put, an explicit projected finite
difference scheme) and randomized dominating-surface generators for
minimality tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .errors import BudgetError, ValidationError
from .gkernel import LatticeModel, check_lattice_function, step_sup
from .snell import PayoffSpec

_CHUNK = 1 << 14


@dataclass(frozen=True)
class ScenarioPolicy:
    """Adapted rate assignment: rates[n, i] acts at step n in node i."""

    rates: np.ndarray  # (N, n_nodes), entries in {sigma2_min, sigma2_max}

    def validate(self, model: LatticeModel) -> None:
        lo, hi = model.band.sigma2_min, model.band.sigma2_max
        ok = np.isclose(self.rates, lo) | np.isclose(self.rates, hi)
        if not np.all(ok):
            raise ValidationError("policy rates must sit at the band endpoints")


@dataclass(frozen=True)
class StoppingRule:
    """Adapted stop/continue table; stopping is forced at the terminal step."""

    stop: np.ndarray  # bool, (N+1, n_nodes)

    def __post_init__(self):
        if not np.all(self.stop[-1]):
            raise ValidationError("terminal step must stop everywhere")


@dataclass
class OracleCertificate:
    """Value with an attaining (rule, policy) pair and enumeration metadata."""

    value: float
    rule: StoppingRule
    policy: ScenarioPolicy
    objective: str           # "sup" or "infsup"
    n_rules: int
    decision_points: List[Tuple[int, int]]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "objective": self.objective,
            "n_rules": self.n_rules,
            "decision_points": [[int(n), int(i)] for n, i in self.decision_points],
            "rule_stop": self.rule.stop.astype(int).tolist(),
            "policy_rates": self.policy.rates.tolist(),
        }


def reachable_masks(model: LatticeModel, N: int) -> np.ndarray:
    """Nodes visitable from the root within each step (bool, (N+1, n_nodes))."""
    masks = np.zeros((N + 1, model.n_nodes), dtype=bool)
    masks[0, model.center_index] = True
    for n in range(N):
        cur = masks[n]
        nxt = cur.copy()
        nxt[:-1] |= cur[1:]
        nxt[1:] |= cur[:-1]
        masks[n + 1] = nxt
    return masks


def _linear_step(w: np.ndarray, v, model: LatticeModel) -> np.ndarray:
    """Linear trinomial average with per-element rates; nodes on the last axis."""
    q = np.asarray(v, dtype=float) * model.dt / (2.0 * model.dx * model.dx)
    if w.ndim == 1:
        pad = np.concatenate((w[1:2], w, w[-2:-1]))
    else:
        pad = np.concatenate((w[..., 1:2], w, w[..., -2:-1]), axis=-1)
    up, down = pad[..., 2:], pad[..., :-2]
    return q * up + (1.0 - 2.0 * q) * w + q * down


def _payoff_table(payoff: PayoffSpec, model: LatticeModel, N: int) -> np.ndarray:
    states = model.nodes()
    return np.stack([payoff.values_at(n, states) for n in range(N + 1)])


def _decision_points(model: LatticeModel, N: int) -> List[Tuple[int, int]]:
    reach = reachable_masks(model, N)
    return [(n, i) for n in range(N) for i in range(model.n_nodes) if reach[n, i]]


def _guard_budget(kind: str, count_bits: int, budget: int) -> int:
    if count_bits >= 63 or (1 << count_bits) > budget:
        est = 2 ** count_bits
        raise BudgetError(
            f"{kind} enumeration needs {est} cases, over the budget of {budget}",
            estimate=int(min(est, 10 ** 18)), budget=budget)
    return 1 << count_bits


def _rule_chunk_values(pay: np.ndarray, model: LatticeModel,
                       pts: Sequence[Tuple[int, int]], r_lo: int, r_hi: int
                       ) -> np.ndarray:
    """Root values for rules r_lo..r_hi-1 (inner max over endpoint rates)."""
    N = pay.shape[0] - 1
    lo, hi = model.band.sigma2_min, model.band.sigma2_max
    r = np.arange(r_lo, r_hi, dtype=np.uint64)
    R = r.size
    w = np.broadcast_to(pay[N], (R, model.n_nodes)).copy()
    for n in range(N - 1, -1, -1):
        cont = np.maximum(_linear_step(w, lo, model), _linear_step(w, hi, model))
        w = cont
        for k, (pn, pi) in enumerate(pts):
            if pn != n:
                continue
            stops = ((r >> np.uint64(k)) & np.uint64(1)).astype(bool)
            w[stops, pi] = pay[n, pi]
    return w[:, model.center_index]


def enumerate_rule_values(payoff: PayoffSpec, model: LatticeModel, N: int,
                          rule_budget: int = 10 ** 7
                          ) -> Tuple[np.ndarray, List[Tuple[int, int]]]:
    """Worst-case-policy value of every adapted stopping rule.

    Rules are indexed by the integer whose k-th bit means `stop` at the k-th
    reachable decision point in (step, node) order.
    """
    if N < 0 or N > 4:
        raise ValidationError("exhaustive oracles support 0 <= N <= 4")
    pay = _payoff_table(payoff, model, N)
    pts = _decision_points(model, N)
    n_rules = _guard_budget("rule", len(pts), rule_budget)
    values = np.empty(n_rules)
    for r_lo in range(0, n_rules, _CHUNK):
        r_hi = min(r_lo + _CHUNK, n_rules)
        values[r_lo:r_hi] = _rule_chunk_values(pay, model, pts, r_lo, r_hi)
    return values, pts


def _rule_from_index(r: int, pts: Sequence[Tuple[int, int]], N: int,
                     n_nodes: int) -> StoppingRule:
    stop = np.zeros((N + 1, n_nodes), dtype=bool)
    stop[N, :] = True
    for k, (n, i) in enumerate(pts):
        if (r >> k) & 1:
            stop[n, i] = True
    return StoppingRule(stop=stop)


def evaluate_rule_worst_policy(payoff: PayoffSpec, model: LatticeModel,
                               rule: StoppingRule
                               ) -> Tuple[float, ScenarioPolicy]:
    """Value of one rule under the maximizing endpoint policy, with the
    attaining policy (ties resolved to the upper endpoint)."""
    N = rule.stop.shape[0] - 1
    pay = _payoff_table(payoff, model, N)
    lo, hi = model.band.sigma2_min, model.band.sigma2_max
    rates = np.empty((N, model.n_nodes))
    w = pay[N].copy()
    for n in range(N - 1, -1, -1):
        c_lo, c_hi = _linear_step(w, lo, model), _linear_step(w, hi, model)
        rates[n] = np.where(c_hi >= c_lo, hi, lo)
        w = np.where(rule.stop[n], pay[n], np.maximum(c_lo, c_hi))
    return float(w[model.center_index]), ScenarioPolicy(rates=rates)


def evaluate_rule_policy(payoff: PayoffSpec, model: LatticeModel,
                         rule: StoppingRule, policy: ScenarioPolicy) -> float:
    """Purely linear replay of a fixed (rule, policy) pair."""
    N = rule.stop.shape[0] - 1
    pay = _payoff_table(payoff, model, N)
    w = pay[N].copy()
    for n in range(N - 1, -1, -1):
        cont = _linear_step(w, policy.rates[n], model)
        w = np.where(rule.stop[n], pay[n], cont)
    return float(w[model.center_index])


def _enumerate(payoff: PayoffSpec, model: LatticeModel, N: int, objective: str,
               rule_budget: int) -> OracleCertificate:
    values, pts = enumerate_rule_values(payoff, model, N, rule_budget)
    if objective == "sup":
        best = int(np.argmax(values))   # first occurrence: smallest rule index
    else:
        best = int(np.argmin(values))
    rule = _rule_from_index(best, pts, N, model.n_nodes)
    value, policy = evaluate_rule_worst_policy(payoff, model, rule)
    return OracleCertificate(value=value, rule=rule, policy=policy,
                             objective=objective, n_rules=values.size,
                             decision_points=pts)


def enumerate_sup(payoff: PayoffSpec, model: LatticeModel, N: int,
                  rule_budget: int = 10 ** 7) -> OracleCertificate:
    """Exact sup over stopping rules of the worst-case-policy expectation."""
    return _enumerate(payoff, model, N, "sup", rule_budget)


def enumerate_infsup(payoff: PayoffSpec, model: LatticeModel, N: int,
                     rule_budget: int = 10 ** 7) -> OracleCertificate:
    """Exact game value: min over rules of the max over policies."""
    return _enumerate(payoff, model, N, "infsup", rule_budget)


def enumerate_sup_policy_outer(payoff: PayoffSpec, model: LatticeModel, N: int,
                               policy_budget: int = 10 ** 7) -> float:
    """Exchange-order computation: outer loop over endpoint policies, inner
    classical linear backward induction per fixed policy."""
    if N < 0 or N > 4:
        raise ValidationError("exhaustive oracles support 0 <= N <= 4")
    pay = _payoff_table(payoff, model, N)
    pts = _decision_points(model, N)
    n_pol = _guard_budget("policy", len(pts), policy_budget)
    lo, hi = model.band.sigma2_min, model.band.sigma2_max
    best = -math.inf
    for p_lo in range(0, n_pol, _CHUNK):
        p_hi = min(p_lo + _CHUNK, n_pol)
        p = np.arange(p_lo, p_hi, dtype=np.uint64)
        P = p.size
        v_table = np.full((P, N, model.n_nodes), lo)
        for k, (pn, pi) in enumerate(pts):
            bit = ((p >> np.uint64(k)) & np.uint64(1)).astype(bool)
            v_table[bit, pn, pi] = hi
        w = np.broadcast_to(pay[N], (P, model.n_nodes)).copy()
        for n in range(N - 1, -1, -1):
            w = np.maximum(pay[n], _linear_step(w, v_table[:, n, :], model))
        best = max(best, float(np.max(w[:, model.center_index])))
    return best


def policy_sup_expectation(f_vals, model: LatticeModel, k: int,
                           policy_budget: int = 10 ** 7) -> np.ndarray:
    """Per starting node, the max over endpoint policies of the linear
    k-step expectation of a terminal function (no stopping)."""
    f_vals = check_lattice_function(f_vals, model)
    if k < 0:
        raise ValidationError("k must be >= 0")
    n_bits = k * model.n_nodes
    n_pol = _guard_budget("policy", n_bits, policy_budget)
    lo, hi = model.band.sigma2_min, model.band.sigma2_max
    out = np.full(model.n_nodes, -math.inf)
    for p_lo in range(0, n_pol, _CHUNK):
        p_hi = min(p_lo + _CHUNK, n_pol)
        p = np.arange(p_lo, p_hi, dtype=np.uint64)
        P = p.size
        w = np.broadcast_to(f_vals, (P, model.n_nodes)).copy()
        for n in range(k - 1, -1, -1):
            v = np.empty((P, model.n_nodes))
            for i in range(model.n_nodes):
                bit = ((p >> np.uint64(n * model.n_nodes + i)) & np.uint64(1)
                       ).astype(bool)
                v[:, i] = np.where(bit, hi, lo)
            w = _linear_step(w, v, model)
        out = np.maximum(out, w.max(axis=0))
    return out


def classical_snell(payoff: PayoffSpec, model: LatticeModel, N: int,
                    objective: str = "sup") -> np.ndarray:
    """Standard linear-expectation backward induction (degenerate band only).

    ``objective`` picks the combine: "sup" takes max(payoff, continuation),
    "inf" takes min; both reduce the robust recursions when the band is a
    single point.
    """
    if not model.band.degenerate:
        raise ValidationError("classical backward induction needs a degenerate band")
    if objective not in ("sup", "inf"):
        raise ValidationError("objective must be 'sup' or 'inf'")
    combine = np.maximum if objective == "sup" else np.minimum
    pay = _payoff_table(payoff, model, N)
    v = model.band.sigma2_min
    surface = np.empty_like(pay)
    surface[N] = pay[N]
    for n in range(N - 1, -1, -1):
        surface[n] = combine(pay[n], _linear_step(surface[n + 1], v, model))
    return surface


def classical_trinomial_sweep(f_vals, model: LatticeModel, steps: int) -> np.ndarray:
    """Linear heat-semigroup comparator: iterated trinomial averaging."""
    if not model.band.degenerate:
        raise ValidationError("linear semigroup comparator needs a degenerate band")
    w = check_lattice_function(f_vals, model)
    for _ in range(steps):
        w = _linear_step(w, model.band.sigma2_min, model)
    return w


def crr_american_put(s0: float, strike: float, sigma: float, maturity: float,
                     steps: int, rate: float = 0.0) -> float:
    """Binomial-tree American put on a geometric price tree."""
    if steps < 1 or sigma <= 0.0 or maturity <= 0.0:
        raise ValidationError("need steps >= 1, sigma > 0, maturity > 0")
    dt = maturity / steps
    u = math.exp(sigma * math.sqrt(dt))
    d = 1.0 / u
    disc = math.exp(-rate * dt)
    p = (math.exp(rate * dt) - d) / (u - d)
    if not 0.0 <= p <= 1.0:
        raise ValidationError("binomial step probability left [0, 1]")
    prices = s0 * d ** np.arange(steps, -1, -1.0) * u ** np.arange(0, steps + 1.0)
    values = np.maximum(strike - prices, 0.0)
    for n in range(steps - 1, -1, -1):
        prices = prices[1:] / u
        values = np.maximum(np.maximum(strike - prices, 0.0),
                            disc * (p * values[1:] + (1.0 - p) * values[:-1]))
    return float(values[0])


def classical_fd_american(payoff_fn: Callable, drift_fn: Callable,
                          diff2_fn: Callable, x0: float, dx: float,
                          half_width: int, horizon: float, substeps: int
                          ) -> Tuple[float, np.ndarray]:
    """Explicit projected finite-difference American value, written as an
    independent comparator: upwind drift, central total diffusion rate
    ``diff2_fn(x)`` (variance per unit time), mirror-ghost boundaries.

    Returns the value at x0 and the full time-0 value row.
    """
    x = x0 + dx * np.arange(-half_width, half_width + 1, dtype=float)
    obstacle = np.asarray(payoff_fn(x), dtype=float)
    mu = np.asarray(drift_fn(x), dtype=float)
    s2 = np.asarray(diff2_fn(x), dtype=float)
    dt = horizon / substeps
    worst = float(np.max(np.abs(mu) / dx + s2 / (dx * dx)))
    if worst * dt > 1.0 + 1e-12:
        raise ValidationError(
            f"comparator unstable: dt={dt:.3g} exceeds {1.0 / worst:.3g}")
    u = obstacle.copy()
    for _ in range(substeps):
        ghosted = np.concatenate((u[1:2], u, u[-2:-1]))
        upn, dwn = ghosted[2:], ghosted[:-2]
        slope = np.where(mu >= 0.0, (upn - u) / dx, (u - dwn) / dx)
        curems = (upn - 2.0 * u + dwn) / (dx * dx)
        u = np.maximum(obstacle, u + dt * (mu * slope + 0.5 * s2 * curems))
    return float(u[half_width]), u


def random_dominator(payoff: PayoffSpec, model: LatticeModel, N: int,
                     seed: int, scale: float = 0.1) -> np.ndarray:
    """Randomized supermartingale surface dominating the payoff: nonnegative
    perturbations are added while sweeping backward, so every row dominates
    both the payoff and its own one-step continuation."""
    if scale < 0.0:
        raise ValidationError("perturbation scale must be >= 0")
    rng = np.random.default_rng(seed)
    pay = _payoff_table(payoff, model, N)
    surface = np.empty_like(pay)
    surface[N] = pay[N] + scale * rng.random(model.n_nodes)
    for n in range(N - 1, -1, -1):
        cont, _ = step_sup(surface[n + 1], model)
        surface[n] = np.maximum(pay[n], cont) + scale * rng.random(model.n_nodes)
    return surface
