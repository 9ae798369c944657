"""Summary metrics over per-scenario plans, and report serialization.

All metrics are probability-weighted aggregates of the per-scenario
incumbents:

  total            sum_w p_w sum_{t,n} e[n,t]
  worst day        max_t sum_w p_w sum_n e[n,t]
  worst day-state  max_{t,n} sum_w p_w e[n,t]
  total inflow_n   sum_t sum_w p_w x[n,t]      (outflow likewise over z)
  net flow_n       inflow_n - outflow_n

Argmax ties break toward the earliest period, then instance region
order.  Reports keep the full per-scenario detail alongside the
expectations, since each scenario carries its own plan.  Serialized
reports contain no wall-clock fields, so a rerun with the same seed is
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, asdict

import numpy as np

from .instance import PlanningInstance, instance_to_dict
from .model import ScenarioPlan
from .scenario import ScenarioSet

SCHEMA_VERSION = 1


class ReportError(ValueError):
    pass


def _check(plans, probabilities) -> None:
    if len(plans) != len(probabilities):
        raise ReportError(
            f"{len(plans)} scenario solutions for {len(probabilities)} probabilities"
        )


def total_shortage(plans, probabilities) -> float:
    _check(plans, probabilities)
    return float(sum(p * plan.e.sum() for plan, p in zip(plans, probabilities)))


def daily_expected_shortage(plans, probabilities) -> np.ndarray:
    _check(plans, probabilities)
    return sum(p * plan.e.sum(axis=0) for plan, p in zip(plans, probabilities))


def worst_day(plans, probabilities) -> tuple[float, int]:
    """(value, period); earliest period wins ties."""
    curve = daily_expected_shortage(plans, probabilities)
    t_idx = int(np.argmax(curve))              # argmax returns the first maximum
    return float(curve[t_idx]), t_idx + 1


def worst_day_state(plans, probabilities) -> tuple[float, int, str]:
    """(value, period, region id); ties earliest period, then region order."""
    _check(plans, probabilities)
    grid = sum(p * plan.e for plan, p in zip(plans, probabilities))
    regions = plans[0].region_ids
    best = (-np.inf, 0, 0)
    for t in range(grid.shape[1]):
        for n in range(grid.shape[0]):
            if grid[n, t] > best[0]:
                best = (float(grid[n, t]), t, n)
    value, t, n = best
    return value, t + 1, regions[n]


@dataclass(frozen=True)
class FlowRow:
    region: str
    total_inflow: float
    total_outflow: float

    @property
    def net_flow(self) -> float:
        return self.total_inflow - self.total_outflow


def flows(plans, probabilities) -> list[FlowRow]:
    _check(plans, probabilities)
    regions = plans[0].region_ids
    inflow = sum(p * plan.x.sum(axis=1) for plan, p in zip(plans, probabilities))
    outflow = sum(p * plan.z.sum(axis=1) for plan, p in zip(plans, probabilities))
    return [
        FlowRow(region=r, total_inflow=float(inflow[n]), total_outflow=float(outflow[n]))
        for n, r in enumerate(regions)
    ]


def region_flow(plans, probabilities, region: str) -> FlowRow:
    for row in flows(plans, probabilities):
        if row.region == region:
            return row
    raise ReportError(f"no region {region!r} in the solutions")


# --- report bundle -----------------------------------------------------------

@dataclass(frozen=True)
class ScenarioOutcome:
    omega: int
    status: str
    objective: float                 # unweighted shortage of this scenario's plan
    best_bound: float | None = None  # per-scenario proof, when solved separately
    node_count: int = 0
    simplex_iterations: int = 0


@dataclass(frozen=True)
class ReportBundle:
    instance: dict
    seed: int
    case: dict
    strategy: str
    probabilities: tuple[float, ...]
    outcomes: tuple[ScenarioOutcome, ...]
    total: float
    worst_day_value: float
    worst_day_period: int
    worst_day_date: str
    worst_day_state_value: float
    worst_day_state_period: int
    worst_day_state_date: str
    worst_day_state_region: str
    daily_expected_shortage: tuple[float, ...]
    flow_rows: tuple[FlowRow, ...]
    plans: tuple[dict, ...]           # per-scenario x/z/y/s/e/g grids, JSON-ready
    solver_stats: dict | None = None  # run totals (nodes, iterations, audit)


def _plan_to_dict(plan: ScenarioPlan) -> dict:
    return {
        "omega": plan.omega,
        "x": plan.x.tolist(),
        "z": plan.z.tolist(),
        "e": plan.e.tolist(),
        "g": plan.g.tolist(),
        "y": plan.y.tolist(),
        "s": plan.s.tolist(),
    }


def build_report(instance: PlanningInstance, scenarios: ScenarioSet,
                 plans, outcomes, strategy: str,
                 solver_stats: dict | None = None) -> ReportBundle:
    p = scenarios.probabilities
    _check(plans, p)
    value_day, t_day = worst_day(plans, p)
    value_ds, t_ds, region_ds = worst_day_state(plans, p)
    curve = daily_expected_shortage(plans, p)
    return ReportBundle(
        instance=instance_to_dict(instance),
        seed=scenarios.seed,
        case=asdict(scenarios.case),
        strategy=strategy,
        probabilities=tuple(p),
        outcomes=tuple(outcomes),
        total=total_shortage(plans, p),
        worst_day_value=value_day,
        worst_day_period=t_day,
        worst_day_date=instance.horizon.date_of(t_day).isoformat(),
        worst_day_state_value=value_ds,
        worst_day_state_period=t_ds,
        worst_day_state_date=instance.horizon.date_of(t_ds).isoformat(),
        worst_day_state_region=region_ds,
        daily_expected_shortage=tuple(float(v) for v in curve),
        flow_rows=tuple(flows(plans, p)),
        plans=tuple(_plan_to_dict(plan) for plan in plans),
        solver_stats=dict(solver_stats or {}),
    )


def report_to_dict(bundle: ReportBundle) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "run": {
            "seed": bundle.seed,
            "case": bundle.case,
            "strategy": bundle.strategy,
            "instance": bundle.instance,
            "probabilities": list(bundle.probabilities),
            "scenario_outcomes": [asdict(o) for o in bundle.outcomes],
            "solver": dict(bundle.solver_stats or {}),
        },
        "shortage": {
            "total": bundle.total,
            "worst_day": {
                "value": bundle.worst_day_value,
                "period": bundle.worst_day_period,
                "date": bundle.worst_day_date,
            },
            "worst_day_state": {
                "value": bundle.worst_day_state_value,
                "period": bundle.worst_day_state_period,
                "date": bundle.worst_day_state_date,
                "region": bundle.worst_day_state_region,
            },
            "daily_expected": list(bundle.daily_expected_shortage),
            "per_scenario_objective": [o.objective for o in bundle.outcomes],
        },
        "flows": [
            {
                "region": row.region,
                "total_inflow": row.total_inflow,
                "total_outflow": row.total_outflow,
                "net_flow": row.net_flow,
            }
            for row in bundle.flow_rows
        ],
        "plans": [dict(p) for p in bundle.plans],
    }


def report_from_dict(doc: dict) -> ReportBundle:
    run = doc["run"]
    shortage = doc["shortage"]
    return ReportBundle(
        instance=run["instance"],
        seed=run["seed"],
        case=run["case"],
        strategy=run["strategy"],
        probabilities=tuple(run["probabilities"]),
        outcomes=tuple(ScenarioOutcome(**o) for o in run["scenario_outcomes"]),
        total=shortage["total"],
        worst_day_value=shortage["worst_day"]["value"],
        worst_day_period=shortage["worst_day"]["period"],
        worst_day_date=shortage["worst_day"]["date"],
        worst_day_state_value=shortage["worst_day_state"]["value"],
        worst_day_state_period=shortage["worst_day_state"]["period"],
        worst_day_state_date=shortage["worst_day_state"]["date"],
        worst_day_state_region=shortage["worst_day_state"]["region"],
        daily_expected_shortage=tuple(shortage["daily_expected"]),
        flow_rows=tuple(
            FlowRow(region=f["region"], total_inflow=f["total_inflow"],
                    total_outflow=f["total_outflow"])
            for f in doc["flows"]
        ),
        plans=tuple(doc["plans"]),
        solver_stats=dict(run.get("solver", {})),
    )


def emit_report(bundle: ReportBundle, fmt: str) -> bytes:
    """JSON is the lossless form; CSV is the per-region flow table."""
    if fmt == "json":
        return (json.dumps(report_to_dict(bundle), sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["region", "total_inflow", "total_outflow", "net_flow"])
        for row in bundle.flow_rows:
            w.writerow([row.region, row.total_inflow, row.total_outflow, row.net_flow])
        return out.getvalue().encode()
    raise ReportError(f"unknown report format {fmt!r}")


def parse_report(data: bytes | str) -> ReportBundle:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return report_from_dict(json.loads(data))


def daily_curve_csv(bundle: ReportBundle, instance: PlanningInstance) -> str:
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(["period", "date", "expected_shortage"])
    for t, v in enumerate(bundle.daily_expected_shortage, start=1):
        w.writerow([t, instance.horizon.date_of(t).isoformat(), v])
    return out.getvalue()
