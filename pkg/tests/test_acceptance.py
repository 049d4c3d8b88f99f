"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria execute.  Every tolerance is pinned here; nothing is calibrated at
run time.
"""

import json
import math
import time

import numpy as np

from gstop import (GsdeCoefficients, IterationConfig, LatticeModel,
                   PayoffSpec, TransitionSpec, VolatilityBand, dyadic_ladder,
                   martingale_to_hit_check, snell_inf, snell_sup,
                   solve_obstacle, step_inf, step_sup, superharmonic_check,
                   superharmonic_envelope, value_iterate)
from gstop import oracle
from gstop.cli import emit_boundary as cli_emit_boundary
from gstop.cli import run as cli_run
from gstop.gkernel import maximal_expectation
from conftest import random_lipschitz_payoff

# zero-rate at-the-money Black-Scholes put, K=1, sigma=0.2, T=1:
# K*(2*Phi(sigma*sqrt(T)/2) - 1); with zero rates early exercise is free,
# so this is also the American value the classical references approximate
BS_PUT_02 = 0.07965567455405798


def _line(n, passed, detail):
    print(f"[criterion {n}] {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {n}: {detail}"


def _criterion1_instances():
    """50 randomized small instances shared by criteria 1 and 5."""
    rng = np.random.default_rng(51)
    out = []
    for _ in range(50):
        N = int(rng.integers(1, 5))
        half_width = int(rng.integers(1, 5))
        lo = float(rng.uniform(0.2, 1.5))
        hi = lo + float(rng.uniform(0.0, 1.5))
        dt = float(rng.uniform(0.05, 0.4))
        dx = float(np.sqrt(hi * dt) * rng.uniform(1.0, 1.6))
        model = LatticeModel(x0=float(rng.uniform(-1.0, 1.0)), dx=dx, dt=dt,
                             n_steps=N, half_width=half_width,
                             band=VolatilityBand(lo, hi))
        out.append((model, random_lipschitz_payoff(rng, N)))
    return out


def test_criterion_1_oracle_equivalence():
    started = time.perf_counter()
    worst_sup = worst_inf = 0.0
    for model, payoff in _criterion1_instances():
        N = model.n_steps
        sup_surface, _ = snell_sup(payoff, model, N)
        inf_surface, _ = snell_inf(payoff, model, N)
        worst_sup = max(worst_sup, abs(
            sup_surface.root_value - oracle.enumerate_sup(payoff, model, N).value))
        worst_inf = max(worst_inf, abs(
            inf_surface.root_value - oracle.enumerate_infsup(payoff, model, N).value))
    elapsed = time.perf_counter() - started
    _line(1, worst_sup < 1e-12 and worst_inf < 1e-12 and elapsed < 60.0,
          f"50 instances: max sup gap {worst_sup:.2e}, max inf gap "
          f"{worst_inf:.2e}, runtime {elapsed:.1f}s (< 60s)")


def test_criterion_2_classical_reduction():
    band = VolatilityBand(1.0, 1.0)  # degenerate: plain 20% lognormal diffusion
    coeffs = GsdeCoefficients.geometric(vol=0.2)
    payoff = PayoffSpec.from_function(lambda x: np.maximum(1.0 - x, 0.0),
                                      lower=0.0, upper=1.0)

    spec64 = TransitionSpec.build(coeffs, band, period=1.0 / 64, x0=1.0,
                                  dx=0.0045, half_width=200)
    surface, _ = snell_sup(payoff, spec64, 64)
    crr64 = oracle.crr_american_put(1.0, 1.0, 0.2, 1.0, 64)
    snell_gap = abs(surface.root_value - crr64) / crr64
    snell_anchor = abs(surface.root_value - BS_PUT_02) / BS_PUT_02

    spec_fd = TransitionSpec.build(coeffs, band, period=1.0, x0=1.0,
                                   dx=0.0045, half_width=200, substeps=8192)
    solution = solve_obstacle(payoff, spec_fd, store_steps=256)
    ref, _ = oracle.classical_fd_american(
        lambda x: np.maximum(1.0 - x, 0.0), lambda x: np.zeros_like(x),
        lambda x: (0.2 * x) ** 2, 1.0, 0.0045, 200, 1.0, 8192)
    fd_gap = abs(solution.root_value - ref) / ref
    fd_anchor = abs(solution.root_value - BS_PUT_02) / BS_PUT_02

    ok = (snell_gap <= 5e-3 and fd_gap <= 5e-3
          and snell_anchor <= 5e-3 and fd_anchor <= 5e-3)
    _line(2, ok,
          f"64-date value {surface.root_value:.6f} vs binomial ref {crr64:.6f} "
          f"({snell_gap:.2%}); 256x401 obstacle {solution.root_value:.6f} vs "
          f"classical FD {ref:.6f} ({fd_gap:.2e} rel); closed-form anchors "
          f"{snell_anchor:.2%}/{fd_anchor:.2%} (all <= 0.5%)")


def test_criterion_3_worked_example_regressions():
    band = VolatilityBand(1.0, 2.0)
    powers = [maximal_expectation(lambda x, a=a: (x - 1.0) ** a + 1.0, band, 1.0)
              for a in (1.0, 1.5, 2.0)]

    fat = VolatilityBand(0.25, 1.0)
    indicators = [maximal_expectation(
        lambda x, n=n: ((x > 1.0 - 1.0 / n) & (x < 1.0)).astype(float), fat, 1.0)
        for n in (2, 5, 10, 50, 100)]
    limit = maximal_expectation(lambda x: np.zeros_like(x), fat, 1.0)

    spec = TransitionSpec.build(GsdeCoefficients.affine(s0=1.0), band,
                                period=0.25, x0=0.0, dx=0.5, half_width=4)
    res = value_iterate(lambda x: np.full_like(x, 0.7), spec,
                        IterationConfig(tol=1e-12, max_iter=50, discount=1.0))
    flat = float(np.max(np.abs(res.values - 0.7)))
    above = value_iterate(lambda x: np.full_like(x, 0.7), spec,
                          IterationConfig(tol=1e-12, max_iter=50, discount=1.0),
                          start=np.full(spec.grid.n_nodes, 2.0))

    ok = (powers == [2.0, 2.0, 2.0] and indicators == [1.0] * 5
          and limit == 0.0 and flat == 0.0 and res.converged
          and np.all(above.values == 2.0))
    _line(3, ok,
          f"power family {powers} == 2 exactly; shrinking indicators "
          f"{indicators} == 1 with limit {limit}; constant reward fixed "
          f"point flat to {flat:.1e} (minimal selection; larger fixed points "
          f"exist and are found from above)")


def test_criterion_4_kernel_property_suite():
    rng = np.random.default_rng(4242)
    tol = 1e-12
    violations = 0
    checked = 0
    for _ in range(10):
        lo = float(rng.uniform(0.2, 1.5))
        hi = lo + float(rng.uniform(0.0, 1.5))
        dt = float(rng.uniform(0.05, 0.4))
        dx = float(np.sqrt(hi * dt) * rng.uniform(1.0, 1.6))
        half_width = int(rng.integers(2, 6))
        band = VolatilityBand(lo, hi)
        model = LatticeModel(x0=0.0, dx=dx, dt=dt, n_steps=1,
                             half_width=half_width, band=band)
        wide = LatticeModel(x0=0.0, dx=dx, dt=dt, n_steps=1,
                            half_width=half_width,
                            band=VolatilityBand(lo * 0.5, hi * 1.0))
        for _ in range(100):
            f = rng.normal(size=model.n_nodes) * rng.uniform(0.5, 3.0)
            g = f + rng.uniform(0.0, 1.0, size=model.n_nodes)
            lam = float(rng.uniform(0.0, 4.0))
            c = float(rng.uniform(-5.0, 5.0))
            checked += 1
            sf = step_sup(f, model)[0]
            sg = step_sup(g, model)[0]
            if np.any(step_sup(np.full(model.n_nodes, c), model)[0] != c):
                violations += 1  # constant preservation (exact)
            if np.any(sf > sg + tol):
                violations += 1  # monotonicity
            if np.any(step_sup(f + g, model)[0] > sf + sg + tol):
                violations += 1  # sublinearity
            if np.any(np.abs(step_sup(lam * f, model)[0] - lam * sf) > tol):
                violations += 1  # positive homogeneity
            if np.any(np.abs(step_inf(f, model)[0] + step_sup(-f, model)[0]) > tol):
                violations += 1  # duality
            if np.any(step_sup(f, wide)[0] < sf - tol):
                violations += 1  # band monotonicity
    _line(4, violations == 0 and checked == 1000,
          f"{checked} randomized lattice functions x 6 properties, "
          f"{violations} violations beyond 1e-12")


def test_criterion_5_supermartingale_minimality_suite():
    worst_replay = 0.0
    dominator_failures = 0
    structure_ok = True
    for model, payoff in _criterion1_instances():
        N = model.n_steps
        surface, region = snell_sup(payoff, model, N)
        if not np.all(surface.values >= surface.payoff - 1e-12):
            structure_ok = False
        for n in range(N):
            cont, _ = step_sup(surface.values[n + 1], model)
            if not np.all(surface.values[n] >= cont - 1e-12):
                structure_ok = False
        report = martingale_to_hit_check(surface, region, tol=1e-12)
        worst_replay = max(worst_replay, report.max_violation)
        for seed in range(100):
            dom = oracle.random_dominator(payoff, model, N, seed=seed, scale=0.2)
            if dom[0, model.center_index] < surface.root_value - 1e-12:
                dominator_failures += 1
    ok = structure_ok and worst_replay < 1e-12 and dominator_failures == 0
    _line(5, ok,
          f"50 instances: dominance/supermartingale structure ok, worst "
          f"stopped-replay violation {worst_replay:.2e} (< 1e-12), "
          f"{dominator_failures} of 5000 random dominators below the value")


def test_criterion_6_infinite_horizon_convergence():
    band = VolatilityBand(1.0, 2.0)
    spec = TransitionSpec.build(GsdeCoefficients.affine(s0=0.005), band,
                                period=1.0, x0=1.0, dx=0.00125, half_width=40)
    payoff = lambda x: np.maximum(1.0 - x, 0.0)
    cfg = IterationConfig(tol=1e-12, max_iter=300, discount=0.9)
    res = value_iterate(payoff, spec, cfg)
    sup_rep = superharmonic_check(res.values, spec, discount=0.9)
    envelope = superharmonic_envelope(payoff, spec, 4, discount=0.9)
    env_gap = float(np.max(np.abs(envelope - res.values)))
    excess = float(np.max(res.values - res.payoff))
    ok = (res.converged and res.residual < 1e-9 and res.iterations <= 300
          and res.min_increment >= 0.0 and sup_rep.max_gap < 1e-10
          and env_gap < 1e-3 and excess > 1e-3)
    _line(6, ok,
          f"residual {res.residual:.2e} in {res.iterations} iterations, "
          f"min increment {res.min_increment:.1e}, superharmonic gap "
          f"{sup_rep.max_gap:.2e} (< 1e-10), envelope(4) gap {env_gap:.2e} "
          f"(< 1e-3) on a put with genuine continuation value {excess:.1e}")


def test_criterion_7_dyadic_refinement():
    started = time.perf_counter()
    band = VolatilityBand(0.04, 0.09)
    coeffs = GsdeCoefficients.geometric(carry=0.5, vol=1.0)
    payoff = PayoffSpec.from_function(lambda x: np.maximum(1.0 - x, 0.0),
                                      lower=0.0, upper=1.0)
    spec = TransitionSpec.build(coeffs, band, period=1.0, x0=1.0, dx=0.01,
                                half_width=80, substeps=4096)
    ladder = dyadic_ladder(payoff, spec, 1, 8)
    solution = solve_obstacle(payoff, spec, store_steps=256)
    u0 = solution.root_value
    monotone = all(b >= a - 1e-12 for a, b in
                   zip(ladder.root_values, ladder.root_values[1:]))
    gap4 = abs(ladder.root_values[3] - u0)
    gap8 = abs(ladder.root_values[7] - u0)
    elapsed = time.perf_counter() - started
    ok = monotone and gap8 < gap4 and elapsed < 300.0
    _line(7, ok,
          f"levels 1..8 nondecreasing ({ladder.root_values[0]:.6f} -> "
          f"{ladder.root_values[-1]:.6f}), |V^8 - u| = {gap8:.2e} < "
          f"|V^4 - u| = {gap4:.2e}, runtime {elapsed:.1f}s (< 300s)")


def test_criterion_8_determinism(tmp_path):
    configs = {
        "finite": {
            "kind": "snell_finite", "seed": 7,
            "band": {"sigma2_min": 1.0, "sigma2_max": 2.0},
            "payoff": {"name": "sequence", "values": [1.0, 3.0, 2.0]},
            "grid": {"x0": 1.0, "dx": math.sqrt(2.0), "dt": 1.0,
                     "half_width": 2, "n_steps": 2},
        },
        "obstacle": {
            "kind": "obstacle", "seed": 7,
            "band": {"sigma2_min": 0.04, "sigma2_max": 0.09},
            "payoff": {"name": "put", "strike": 1.0},
            "dynamics": {"name": "geometric", "carry": 0.5, "vol": 1.0},
            "grid": {"x0": 1.0, "dx": 0.04, "half_width": 20, "substeps": 512},
            "store_steps": 64,
        },
        "regression": {"kind": "regression", "seed": 7},
    }
    artifacts = ("value.csv", "region.csv", "report.json", "boundary.csv")
    all_equal = True
    for name, payload in configs.items():
        blobs = []
        for attempt in ("a", "b"):
            out = tmp_path / f"{name}-{attempt}"
            cfg = dict(payload, output_dir=str(out))
            cfg_path = tmp_path / f"{name}-{attempt}.json"
            cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
            assert cli_run(str(cfg_path)) == 0
            assert cli_emit_boundary(str(out)) == 0
            blobs.append({art: (out / art).read_bytes() for art in artifacts})
        if blobs[0] != blobs[1]:
            all_equal = False
    _line(8, all_equal,
          "repeated runs of finite, obstacle, and regression configs "
          "produced byte-identical value.csv, region.csv, report.json, "
          "boundary.csv")
