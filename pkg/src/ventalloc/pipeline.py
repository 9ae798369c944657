"""End-to-end run: ingest -> scenarios -> model -> solve -> report.

A run is a pure function of its configuration: fixed seed, strategy and
limits reproduce the report byte for byte.  The per-scenario strategy is
the default; scenario copies share nothing, so solving them separately
and combining by probability is exact, and the solves may fan out over a
thread pool.  The monolithic strategy builds and solves the full
extensive form in one piece and exists mainly to cross-validate the
decomposition.

Stage failures are wrapped in StageError so callers (CLI, job runner)
can report which of ingest/scenario/model/solve/report broke.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

from .instance import PlanningInstance, load_instance
from .model import (
    ScenarioPlan, build_extensive_form, compute_big_m,
    extract_plan, single_scenario_model,
)
from .report import ReportBundle, ScenarioOutcome, build_report, emit_report, daily_curve_csv
from .scenario import (
    CaseSpec, ScenarioSet, case_spec, generate_scenarios, load_forecast,
    load_scenario_set, scenario_set_to_dict,
)
from .solver import SolveLimits, SolveResult, branch_and_bound
from . import lpformats

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PER_SCENARIO = "per-scenario"
MONOLITHIC = "monolithic"


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"{stage} stage failed: {message}")


@dataclass(frozen=True)
class RunConfig:
    instance_path: str
    forecast_path: str | None = None
    scenarios_path: str | None = None     # reuse a saved set instead of sampling
    case: str | dict = "I"                # preset label, or custom CaseSpec fields
    scenario_count: int = 24
    seed: int = 0
    limits: SolveLimits = field(default_factory=SolveLimits)
    strategy: str = PER_SCENARIO
    max_workers: int = 1
    tighten_switch_cap: bool = False
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.strategy not in (PER_SCENARIO, MONOLITHIC):
            raise ValueError(f"strategy must be {PER_SCENARIO!r} or {MONOLITHIC!r}")
        if self.scenario_count < 1:
            raise ValueError("scenario_count must be >= 1")
        if self.forecast_path is None and self.scenarios_path is None:
            raise ValueError("need a forecast_path or a scenarios_path")


def config_to_dict(config: RunConfig) -> dict:
    doc = asdict(config)
    doc["schema_version"] = SCHEMA_VERSION
    return doc


def config_from_dict(doc: dict) -> RunConfig:
    doc = dict(doc)
    doc.pop("schema_version", None)
    limits = doc.get("limits")
    if isinstance(limits, dict):
        doc["limits"] = SolveLimits(**limits)
    try:
        return RunConfig(**doc)
    except TypeError as exc:
        raise ValueError(f"malformed run config: {exc}") from None


@dataclass
class RunOutput:
    config: RunConfig
    instance: PlanningInstance
    scenarios: ScenarioSet
    plans: list[ScenarioPlan]
    results: list[SolveResult]
    report: ReportBundle


def _apply_overrides(instance: PlanningInstance, overrides: dict) -> PlanningInstance:
    if not overrides:
        return instance
    known = {"gamma", "tau", "rho", "central_initial", "production"}
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown override fields: {sorted(unknown)}")
    return instance.replace_rates(**overrides)


def _audit_big_m(instance: PlanningInstance, plans) -> dict:
    """Strictness audit: the switch rows should keep z within the constant."""
    worst = 0.0
    for plan in plans:
        for ni in range(instance.num_regions):
            for t in range(1, instance.num_periods + 1):
                excess = plan.z[ni, t - 1] - compute_big_m(instance, ni, t)
                worst = max(worst, excess)
    if worst > 1e-6:
        log.warning("big-M audit: z exceeds the deactivation constant by %.3e", worst)
    return {"big_m_max_excess": float(max(worst, 0.0))}


def run(config: RunConfig, progress=None) -> RunOutput:
    """Execute the whole pipeline; deterministic for a fixed config."""
    try:
        instance = _apply_overrides(load_instance(config.instance_path), config.overrides)
    except Exception as exc:
        raise StageError("ingest", str(exc)) from exc

    try:
        if config.scenarios_path:
            scenarios = load_scenario_set(config.scenarios_path)
        else:
            forecasts = _load_forecast_file(config.forecast_path, instance)
            base = CaseSpec(**config.case) if isinstance(config.case, dict) else config.case
            spec = case_spec(base, scenario_count=config.scenario_count)
            scenarios = generate_scenarios(forecasts, spec, config.seed)
    except StageError:
        raise
    except Exception as exc:
        raise StageError("scenario", str(exc)) from exc

    plans, results = solve_scenarios(instance, scenarios, config, progress=progress)

    try:
        outcomes, stats = _summarize(plans, results, config.strategy)
        stats.update(_audit_big_m(instance, plans))
        bundle = build_report(instance, scenarios, plans, outcomes,
                              strategy=config.strategy, solver_stats=stats)
    except Exception as exc:
        raise StageError("report", str(exc)) from exc
    return RunOutput(config=config, instance=instance, scenarios=scenarios,
                     plans=plans, results=results, report=bundle)


def _load_forecast_file(path, instance: PlanningInstance):
    with open(path, "r", encoding="utf-8") as fh:
        return load_forecast(fh, instance.horizon, instance.region_ids)


def solve_scenarios(instance: PlanningInstance, scenarios: ScenarioSet,
                    config: RunConfig, progress=None):
    """Solve every scenario under the configured strategy."""
    try:
        if config.strategy == MONOLITHIC:
            model = build_extensive_form(instance, scenarios,
                                         tighten_switch_cap=config.tighten_switch_cap)
            result = branch_and_bound(model, config.limits)
            if result.incumbent is None:
                raise StageError("solve", f"extensive form ended {result.status}")
            plans = [extract_plan(model, result.incumbent, w)
                     for w in range(scenarios.num_scenarios)]
            results = [result] * scenarios.num_scenarios
            if progress:
                progress(scenarios.num_scenarios, scenarios.num_scenarios)
            return plans, results

        def solve_one(w: int):
            model = single_scenario_model(instance, scenarios, w,
                                          tighten_switch_cap=config.tighten_switch_cap)
            result = branch_and_bound(model, config.limits)
            if result.incumbent is None:
                raise StageError("solve", f"scenario {w} ended {result.status}")
            return extract_plan(model, result.incumbent, w), result

        n = scenarios.num_scenarios
        if config.max_workers > 1:
            with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
                futures = [pool.submit(solve_one, w) for w in range(n)]
                pairs = []
                for done, fut in enumerate(futures, start=1):
                    pairs.append(fut.result())
                    if progress:
                        progress(done, n)
        else:
            pairs = []
            for w in range(n):
                pairs.append(solve_one(w))
                if progress:
                    progress(w + 1, n)
        return [p for p, _ in pairs], [r for _, r in pairs]
    except StageError:
        raise
    except Exception as exc:
        raise StageError("solve", str(exc)) from exc


def _summarize(plans, results, strategy):
    outcomes = []
    for plan, result in zip(plans, results):
        per_scenario_bound = result.best_bound if strategy == PER_SCENARIO else None
        outcomes.append(ScenarioOutcome(
            omega=plan.omega,
            status=result.status,
            objective=plan.shortage,
            best_bound=None if per_scenario_bound is None else float(per_scenario_bound),
            node_count=result.node_count if strategy == PER_SCENARIO else 0,
            simplex_iterations=result.simplex_iterations if strategy == PER_SCENARIO else 0,
        ))
    if strategy == MONOLITHIC:
        stats = {
            "total_nodes": results[0].node_count,
            "total_simplex_iterations": results[0].simplex_iterations,
            "extensive_best_bound": float(results[0].best_bound),
        }
    else:
        stats = {
            "total_nodes": sum(r.node_count for r in results),
            "total_simplex_iterations": sum(r.simplex_iterations for r in results),
        }
    return outcomes, stats


def write_outputs(output: RunOutput, out_dir) -> dict[str, str]:
    """Persist the run artifacts; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    def put(name, data: bytes):
        path = os.path.join(out_dir, name)
        with open(path, "wb") as fh:
            fh.write(data)
        paths[name] = path

    put("report.json", emit_report(output.report, "json"))
    put("flows.csv", emit_report(output.report, "csv"))
    put("daily_shortage.csv", daily_curve_csv(output.report, output.instance).encode())
    put("config.json", (json.dumps(config_to_dict(output.config), indent=2, sort_keys=True,
                                   default=str) + "\n").encode())
    put("scenarios.json", (json.dumps(scenario_set_to_dict(output.scenarios)) + "\n").encode())
    return paths


def export_scenario_models(instance: PlanningInstance, scenarios: ScenarioSet,
                           fmt: str, out_dir, monolithic: bool = False,
                           tighten_switch_cap: bool = False) -> list[str]:
    """Write solver-ready model files for the external-solver path."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if monolithic:
        model = build_extensive_form(instance, scenarios, tighten_switch_cap)
        path = os.path.join(out_dir, f"extensive.{fmt}")
        with open(path, "wb") as fh:
            fh.write(lpformats.export_model(model, fmt))
        written.append(path)
        return written
    for w in range(scenarios.num_scenarios):
        model = single_scenario_model(instance, scenarios, w, tighten_switch_cap)
        path = os.path.join(out_dir, f"scenario_{w:03d}.{fmt}")
        with open(path, "wb") as fh:
            fh.write(lpformats.export_model(model, fmt))
        written.append(path)
    return written


def report_from_solutions(instance: PlanningInstance, scenarios: ScenarioSet,
                          solution_dir) -> ReportBundle:
    """Rebuild a report from externally produced `scenario_%03d.sol` files."""
    plans = []
    outcomes = []
    for w in range(scenarios.num_scenarios):
        path = os.path.join(solution_dir, f"scenario_{w:03d}.sol")
        if not os.path.exists(path):
            raise StageError("report", f"missing solution file {path}")
        model = single_scenario_model(instance, scenarios, w)
        with open(path, "r", encoding="utf-8") as fh:
            named = lpformats.read_solution(fh.read())
        values = lpformats.assignment_from_names(model, named)
        plan = extract_plan(model, values, w)
        plans.append(plan)
        outcomes.append(ScenarioOutcome(omega=w, status="External", objective=plan.shortage))
    return build_report(instance, scenarios, plans, outcomes, strategy="external",
                        solver_stats={"source": "imported solutions"})
