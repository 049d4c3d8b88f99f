"""Batch front door: config ingestion, run orchestration, artifact emission.

A run is described by a JSON config (no silent defaults for the band or the
grid), executes one pipeline, and writes four artifacts into its output
directory:

* ``value.csv``    - columns ``step,time,node_index,state,value``
* ``region.csv``   - columns ``step,time,node_index,state`` (exercising nodes)
* ``report.json``  - pipeline-specific results, deterministic
* ``manifest.json``- config hash, engine version, timings (not deterministic)

Numbers in CSVs carry 17 significant digits so doubles round-trip exactly;
all writes are atomic (write-temp-then-rename).  Exit codes: 0 success,
2 invalid config or usage, 3 numerical non-convergence or failed checks,
1 any other engine failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .errors import ConfigError, EngineError
from .dynamics import GsdeCoefficients, TransitionSpec
from .gkernel import LatticeModel, VolatilityBand, maximal_expectation
from .horizon import (IterationConfig, admissibility_tail,
                      fixed_point_diagnostic, superharmonic_check,
                      value_iterate)
from .refine import dyadic_ladder, hitting_time_value_check, solve_obstacle
from .snell import (PayoffSpec, martingale_to_hit_check, snell_inf,
                    snell_sup)
from . import oracle as oracle_mod

KINDS = ("snell_finite", "snell_infinite", "dyadic", "obstacle", "oracle",
         "regression")
ENV_OUTPUT_ROOT = "GSTOP_OUTPUT_ROOT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3


@dataclass
class ProblemConfig:
    """Validated run description; round-trips through dicts unchanged."""

    kind: str
    output_dir: str
    seed: int
    band: Optional[dict] = None
    payoff: Optional[dict] = None
    grid: Optional[dict] = None
    dynamics: Optional[dict] = None
    objective: str = "sup"
    horizon_steps: Optional[int] = None
    iteration: Optional[dict] = None
    levels: Optional[dict] = None
    store_steps: Optional[int] = None
    tail_horizons: Optional[List[int]] = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ProblemConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object", field="<root>")
        known = {f.name for f in dataclasses.fields(cls)}
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}", field=key)
        if "kind" not in raw:
            raise ConfigError("missing required field 'kind'", field="kind")
        if raw["kind"] not in KINDS:
            raise ConfigError(
                f"kind must be one of {KINDS}, got {raw['kind']!r}", field="kind")
        for req in ("output_dir", "seed"):
            if req not in raw:
                raise ConfigError(f"missing required field {req!r}", field=req)
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            if val is not None:
                out[f.name] = val
        return out

    def validate(self) -> None:
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer", field="seed")
        if self.objective not in ("sup", "inf"):
            raise ConfigError("objective must be 'sup' or 'inf'",
                              field="objective")
        if self.kind == "regression":
            return
        for req in ("band", "payoff", "grid"):
            if getattr(self, req) is None:
                raise ConfigError(
                    f"kind {self.kind!r} requires field {req!r} "
                    "(no silent defaults)", field=req)
        _require_keys(self.band, ("sigma2_min", "sigma2_max"), "band")
        if self.kind in ("snell_finite", "oracle"):
            if self.horizon_steps is None and self.kind == "oracle":
                raise ConfigError("oracle runs need horizon_steps",
                                  field="horizon_steps")
        if self.kind == "snell_infinite" and self.iteration is None:
            raise ConfigError("snell_infinite needs an iteration block",
                              field="iteration")
        if self.kind == "dyadic":
            if self.levels is None:
                raise ConfigError("dyadic runs need a levels block",
                                  field="levels")
            _require_keys(self.levels, ("n_min", "n_max"), "levels")


def _require_keys(block: dict, keys, name: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{name} must be an object", field=name)
    for key in keys:
        if key not in block:
            raise ConfigError(f"missing field {name}.{key}", field=f"{name}.{key}")


def _number(block: dict, name: str, key: str, *, required: bool = True,
            default=None):
    if key not in block:
        if required:
            raise ConfigError(f"missing field {name}.{key}", field=f"{name}.{key}")
        return default
    val = block[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool) \
            or not math.isfinite(float(val)):
        raise ConfigError(f"{name}.{key} must be a finite number",
                          field=f"{name}.{key}")
    return float(val)


def _build_band(cfg: ProblemConfig) -> VolatilityBand:
    lo = _number(cfg.band, "band", "sigma2_min")
    hi = _number(cfg.band, "band", "sigma2_max")
    try:
        return VolatilityBand(lo, hi)
    except EngineError as exc:
        raise ConfigError(str(exc), field="band") from exc


def _build_payoff(cfg: ProblemConfig) -> PayoffSpec:
    block = cfg.payoff
    _require_keys(block, ("name",), "payoff")
    name = block["name"]
    if name == "put":
        strike = _number(block, "payoff", "strike")
        return PayoffSpec.from_function(
            lambda x: np.maximum(strike - x, 0.0), lower=0.0, upper=strike)
    if name == "capped_put":
        strike = _number(block, "payoff", "strike")
        cap = _number(block, "payoff", "cap")
        return PayoffSpec.from_function(
            lambda x: np.minimum(cap, np.maximum(strike - x, 0.0)),
            lower=0.0, upper=cap)
    if name == "call":
        strike = _number(block, "payoff", "strike")
        return PayoffSpec.from_function(
            lambda x: np.maximum(x - strike, 0.0), lower=0.0)
    if name == "constant":
        c = _number(block, "payoff", "value")
        return PayoffSpec.from_function(
            lambda x: np.full_like(np.asarray(x, dtype=float), c),
            lower=c, upper=c)
    if name == "sequence":
        values = block.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("payoff.values must be a nonempty list",
                              field="payoff.values")
        return PayoffSpec.constant_sequence([float(v) for v in values])
    raise ConfigError(f"unknown payoff {name!r}", field="payoff.name")


def _build_coeffs(cfg: ProblemConfig) -> GsdeCoefficients:
    block = cfg.dynamics or {"name": "affine"}
    name = block.get("name", "affine")
    if name == "affine":
        return GsdeCoefficients.affine(
            b0=_number(block, "dynamics", "b0", required=False, default=0.0),
            b1=_number(block, "dynamics", "b1", required=False, default=0.0),
            h0=_number(block, "dynamics", "h0", required=False, default=0.0),
            h1=_number(block, "dynamics", "h1", required=False, default=0.0),
            s0=_number(block, "dynamics", "s0", required=False, default=1.0),
            s1=_number(block, "dynamics", "s1", required=False, default=0.0))
    if name == "geometric":
        return GsdeCoefficients.geometric(
            drift=_number(block, "dynamics", "drift", required=False, default=0.0),
            carry=_number(block, "dynamics", "carry", required=False, default=0.0),
            vol=_number(block, "dynamics", "vol", required=False, default=1.0))
    if name == "table":
        for key in ("xs", "b", "h", "sigma"):
            if not isinstance(block.get(key), list):
                raise ConfigError(f"dynamics.{key} must be a list",
                                  field=f"dynamics.{key}")
        return GsdeCoefficients.from_table(block["xs"], block["b"], block["h"],
                                           block["sigma"])
    raise ConfigError(f"unknown dynamics {name!r}", field="dynamics.name")


def _build_lattice(cfg: ProblemConfig, band: VolatilityBand) -> LatticeModel:
    g = cfg.grid
    _require_keys(g, ("x0", "dx", "dt", "half_width", "n_steps"), "grid")
    try:
        return LatticeModel(x0=_number(g, "grid", "x0"),
                            dx=_number(g, "grid", "dx"),
                            dt=_number(g, "grid", "dt"),
                            n_steps=int(g["n_steps"]),
                            half_width=int(g["half_width"]), band=band)
    except EngineError as exc:
        raise ConfigError(str(exc), field="grid") from exc


def _build_spec(cfg: ProblemConfig, band: VolatilityBand,
                period: Optional[float] = None) -> TransitionSpec:
    g = cfg.grid
    _require_keys(g, ("x0", "dx", "half_width"), "grid")
    coeffs = _build_coeffs(cfg)
    if period is None:
        period = _number(g, "grid", "period", required=False, default=1.0)
    substeps = g.get("substeps")
    try:
        return TransitionSpec.build(
            coeffs, band, period=period, x0=_number(g, "grid", "x0"),
            dx=_number(g, "grid", "dx"), half_width=int(g["half_width"]),
            substeps=None if substeps is None else int(substeps))
    except EngineError as exc:
        raise ConfigError(str(exc), field="grid") from exc


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8", newline="")
    os.replace(tmp, path)


def _write_csv(path: Path, header: List[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _surface_rows(values: np.ndarray, states: np.ndarray, times):
    for n in range(values.shape[0]):
        t = float(times[n])
        for i in range(values.shape[1]):
            yield (n, t, i - values.shape[1] // 2, float(states[i]),
                   float(values[n, i]))


def _region_rows(masks: np.ndarray, states: np.ndarray, times):
    for n in range(masks.shape[0]):
        t = float(times[n])
        for i in np.flatnonzero(masks[n]):
            yield (n, t, int(i) - masks.shape[1] // 2, float(states[int(i)]))


def _write_surface_artifacts(out: Path, values: np.ndarray, masks: np.ndarray,
                             states: np.ndarray, times) -> None:
    _write_csv(out / "value.csv", ["step", "time", "node_index", "state", "value"],
               _surface_rows(values, states, times))
    _write_csv(out / "region.csv", ["step", "time", "node_index", "state"],
               _region_rows(masks, states, times))


def _report_common(cfg: ProblemConfig) -> dict:
    return {"kind": cfg.kind, "seed": cfg.seed, "objective": cfg.objective}


def _run_snell_finite(cfg: ProblemConfig, out: Path) -> dict:
    band = _build_band(cfg)
    payoff = _build_payoff(cfg)
    if cfg.dynamics is None:
        model = _build_lattice(cfg, band)
        N = cfg.horizon_steps if cfg.horizon_steps is not None else model.n_steps
        stage_len = model.dt
    else:
        model = _build_spec(cfg, band)
        if cfg.horizon_steps is None:
            raise ConfigError("dynamics-driven runs need horizon_steps",
                              field="horizon_steps")
        N = cfg.horizon_steps
        stage_len = model.period
    runner = snell_sup if cfg.objective == "sup" else snell_inf
    surface, region = runner(payoff, model, N)
    times = [n * stage_len for n in range(N + 1)]
    _write_surface_artifacts(out, surface.values, region.masks,
                             surface.states(), times)
    martingale = martingale_to_hit_check(surface, region)
    report = _report_common(cfg)
    report.update({
        "root_value": surface.root_value,
        "n_steps": N,
        "tie_rel_tol": region.tie_rel_tol,
        "martingale_check": {"max_violation": martingale.max_violation,
                             "passed": martingale.passed},
    })
    return report


def _run_snell_infinite(cfg: ProblemConfig, out: Path) -> dict:
    band = _build_band(cfg)
    payoff = _build_payoff(cfg)
    spec = _build_spec(cfg, band)
    it = cfg.iteration
    icfg = IterationConfig(
        tol=_number(it, "iteration", "tol"),
        max_iter=int(it.get("max_iter", 500)),
        discount=_number(it, "iteration", "discount"))
    if payoff.markov is None:
        raise ConfigError("infinite-horizon runs need a single-function payoff",
                          field="payoff")
    result = value_iterate(payoff.markov, spec, icfg)
    states = spec.grid.nodes()
    _write_surface_artifacts(out, result.values[None, :],
                             result.region.masks, states, [0.0])
    shp = superharmonic_check(result.values, spec, discount=icfg.discount)
    horizons = cfg.tail_horizons or [1, 2, 4, 8, 16]
    tails = admissibility_tail(result.region, spec, horizons)
    diag = fixed_point_diagnostic(payoff.markov, spec, icfg)
    report = _report_common(cfg)
    report.update({
        "root_value": float(result.values[spec.grid.center_index]),
        "iterations": result.iterations,
        "residual": result.residual,
        "converged": result.converged,
        "min_increment": result.min_increment,
        "superharmonic": {"max_gap": shp.max_gap, "passed": shp.passed},
        "tail": {"horizons": list(tails.horizons), "values": list(tails.tails),
                 "nonincreasing": tails.nonincreasing},
        "fixed_point_diagnostic": {"gap": diag.gap, "multiple": diag.multiple},
    })
    return report


def _run_dyadic(cfg: ProblemConfig, out: Path) -> dict:
    band = _build_band(cfg)
    payoff = _build_payoff(cfg)
    if payoff.markov is None:
        raise ConfigError("dyadic runs need a single-function payoff",
                          field="payoff")
    spec = _build_spec(cfg, band, period=1.0)
    n_min, n_max = int(cfg.levels["n_min"]), int(cfg.levels["n_max"])
    ladder = dyadic_ladder(payoff, spec, n_min, n_max)
    finest = ladder.surfaces[-1]
    dates = finest.shape[0] - 1
    times = [k / dates for k in range(dates + 1)]
    states = spec.grid.nodes()
    pay = np.stack([payoff.values_at(0, states)] * (dates + 1))
    masks = np.abs(finest - pay) <= 1e-10 * (1.0 + np.abs(pay))
    masks[-1, :] = True
    _write_surface_artifacts(out, finest, masks, states, times)
    report = _report_common(cfg)
    report.update({
        "levels": ladder.levels,
        "root_values": ladder.root_values,
        "increments": ladder.increments(),
    })
    return report


def _run_obstacle(cfg: ProblemConfig, out: Path) -> dict:
    band = _build_band(cfg)
    payoff = _build_payoff(cfg)
    spec = _build_spec(cfg, band, period=1.0)
    solution = solve_obstacle(payoff, spec, store_steps=cfg.store_steps)
    states = spec.grid.nodes()
    _write_surface_artifacts(out, solution.values, solution.stored_exercise(),
                             states, solution.times)
    hit = hitting_time_value_check(solution, payoff, spec, seed=cfg.seed)
    report = _report_common(cfg)
    report.update({
        "root_value": solution.root_value,
        "dt": solution.dt,
        "dx": solution.dx,
        "substeps": solution.substeps,
        "discrete_complementarity": solution.discrete_complementarity,
        "pde_residual_l1": solution.pde_residual_l1,
        "hitting_check": {"max_gap": hit.max_gap, "scale": hit.scale,
                          "passed": hit.passed},
    })
    if band.degenerate and payoff.markov is not None:
        ref, _ = oracle_mod.classical_fd_american(
            payoff.markov,
            lambda x: np.asarray(spec.coeffs.b(x), dtype=float)
            + band.sigma2_min * np.asarray(spec.coeffs.h(x), dtype=float),
            lambda x: band.sigma2_min
            * np.asarray(spec.coeffs.sigma(x), dtype=float) ** 2,
            spec.grid.x0, spec.grid.dx, spec.grid.half_width, 1.0,
            spec.substeps)
        gap = abs(solution.root_value - ref) / max(abs(ref), 1e-300)
        report["classical_comparison"] = {"reference_value": ref,
                                          "relative_gap": gap}
    return report


def _run_oracle(cfg: ProblemConfig, out: Path) -> dict:
    band = _build_band(cfg)
    payoff = _build_payoff(cfg)
    model = _build_lattice(cfg, band)
    N = int(cfg.horizon_steps)
    if cfg.objective == "sup":
        cert = oracle_mod.enumerate_sup(payoff, model, N)
        surface, region = snell_sup(payoff, model, N)
    else:
        cert = oracle_mod.enumerate_infsup(payoff, model, N)
        surface, region = snell_inf(payoff, model, N)
    times = [n * model.dt for n in range(N + 1)]
    _write_surface_artifacts(out, surface.values, region.masks,
                             surface.states(), times)
    report = _report_common(cfg)
    report.update({
        "engine_value": surface.root_value,
        "oracle": cert.to_dict(),
        "abs_gap": abs(surface.root_value - cert.value),
    })
    return report


def run_regression_suite() -> List[dict]:
    """Built-in regression checks of the worked closed-form examples."""
    checks = []

    band = VolatilityBand(1.0, 2.0)
    vals = {}
    for alpha in (1.0, 1.5, 2.0):
        vals[alpha] = maximal_expectation(
            lambda x, a=alpha: (x - 1.0) ** a + 1.0, band, 1.0)
    checks.append({
        "name": "maximal_distribution_power_family",
        "passed": all(v == 2.0 for v in vals.values()),
        "detail": {str(k): v for k, v in vals.items()},
    })

    fat_band = VolatilityBand(0.25, 1.0)
    seq = {}
    for n in (2, 5, 10, 50, 100):
        seq[n] = maximal_expectation(
            lambda x, n=n: ((x > 1.0 - 1.0 / n) & (x < 1.0)).astype(float),
            fat_band, 1.0)
    limit = maximal_expectation(lambda x: np.zeros_like(x), fat_band, 1.0)
    checks.append({
        "name": "upper_limit_expectation_failure",
        "passed": all(v == 1.0 for v in seq.values()) and limit == 0.0,
        "detail": {"per_n": {str(k): v for k, v in seq.items()},
                   "limit_payoff": limit},
    })

    spec = TransitionSpec.build(GsdeCoefficients.affine(s0=1.0),
                                VolatilityBand(1.0, 2.0), period=0.25,
                                x0=0.0, dx=0.5, half_width=4)
    c = 0.7
    cfg = IterationConfig(tol=1e-12, max_iter=50, discount=1.0)
    res = value_iterate(lambda x: np.full_like(x, c), spec, cfg)
    diag = fixed_point_diagnostic(lambda x: np.full_like(x, c), spec, cfg)
    flat = float(np.max(np.abs(res.values - c)))
    checks.append({
        "name": "constant_reward_minimal_fixed_point",
        "passed": bool(flat < 1e-12 and res.converged and diag.multiple),
        "detail": {"max_deviation": flat, "iterations": res.iterations,
                   "other_fixed_points_detected": diag.multiple},
    })
    return checks


def _run_regression(cfg: ProblemConfig, out: Path) -> dict:
    checks = run_regression_suite()
    report = _report_common(cfg)
    report.update({"checks": checks,
                   "passed": all(c["passed"] for c in checks)})
    return report


_RUNNERS: dict = {
    "snell_finite": _run_snell_finite,
    "snell_infinite": _run_snell_infinite,
    "dyadic": _run_dyadic,
    "obstacle": _run_obstacle,
    "oracle": _run_oracle,
    "regression": _run_regression,
}


def resolve_output_dir(cfg: ProblemConfig) -> Path:
    root = os.environ.get(ENV_OUTPUT_ROOT)
    out = Path(cfg.output_dir)
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


def run(config_path: str) -> int:
    """Execute the pipeline selected by the config file; returns exit status."""
    started = time.perf_counter()
    try:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"config error: cannot read {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON in {config_path}: {exc}",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = ProblemConfig.from_dict(raw)
        roundtrip = ProblemConfig.from_dict(cfg.to_dict())
        if roundtrip != cfg:
            raise ConfigError("config does not round-trip", field="<root>")
        out = resolve_output_dir(cfg)
        out.mkdir(parents=True, exist_ok=True)
        parse_done = time.perf_counter()
        report = _RUNNERS[cfg.kind](cfg, out)
        run_done = time.perf_counter()
        if cfg.kind == "regression":
            _write_csv(out / "value.csv",
                       ["step", "time", "node_index", "state", "value"], [])
            _write_csv(out / "region.csv",
                       ["step", "time", "node_index", "state"], [])
        _write_json(out / "report.json", report)
        manifest = {
            "config_sha256": hashlib.sha256(
                json.dumps(cfg.to_dict(), sort_keys=True).encode()).hexdigest(),
            "engine_version": __version__,
            "timings_s": {"parse": parse_done - started,
                          "run": run_done - parse_done},
            "created_unix": time.time(),
        }
        _write_json(out / "manifest.json", manifest)
    except ConfigError as exc:
        field = f" (field: {exc.field})" if exc.field else ""
        print(f"config error: {exc}{field}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 1
    if report.get("converged") is False:
        print(f"non-convergence: residual {report['residual']:.3e} "
              f"after {report['iterations']} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    if cfg.kind == "regression" and not report["passed"]:
        failing = [c["name"] for c in report["checks"] if not c["passed"]]
        print(f"regression failures: {failing}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"ok: wrote artifacts to {out}")
    return EXIT_OK


def emit_boundary(run_dir: str) -> int:
    """Summarize region.csv as (time, lowest exercising state) per step."""
    region_path = Path(run_dir) / "region.csv"
    if not region_path.exists():
        print(f"error: no region.csv in {run_dir}", file=sys.stderr)
        return EXIT_CONFIG
    lowest: dict = {}
    lines = region_path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "step,time,node_index,state":
        print("error: region.csv has an unexpected header", file=sys.stderr)
        return EXIT_CONFIG
    for line in lines[1:]:
        step_s, time_s, _idx, state_s = line.split(",")
        key = (int(step_s), float(time_s))
        state = float(state_s)
        if key not in lowest or state < lowest[key]:
            lowest[key] = state
    rows = [(t, lowest[(s, t)]) for (s, t) in sorted(lowest)]
    _write_csv(Path(run_dir) / "boundary.csv", ["time", "critical_state"], rows)
    print(f"ok: wrote {Path(run_dir) / 'boundary.csv'}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gstop",
        description="Optimal stopping under volatility uncertainty.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a run config")
    p_run.add_argument("config", help="path to a JSON run configuration")
    p_reg = sub.add_parser("regress", help="run the built-in regression suite")
    p_reg.add_argument("--out", default="gstop-regress",
                       help="output directory (default: gstop-regress)")
    p_emit = sub.add_parser("emit-boundary",
                            help="derive boundary.csv from a finished run")
    p_emit.add_argument("run_dir", help="directory holding region.csv")
    sub.add_parser("version", help="print the engine version")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config)
    if args.command == "regress":
        cfg = {"kind": "regression", "output_dir": args.out, "seed": 0}
        tmp = Path(args.out)
        tmp.mkdir(parents=True, exist_ok=True)
        cfg_path = tmp / "regress-config.json"
        cfg_path.write_text(json.dumps(cfg, sort_keys=True), encoding="utf-8")
        return run(str(cfg_path))
    if args.command == "emit-boundary":
        return emit_boundary(args.run_dir)
    if args.command == "version":
        print(__version__)
        return EXIT_OK
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
