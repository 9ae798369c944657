"""Command line entry points mirroring the run pipeline."""

from __future__ import annotations

import json
import sys

import click

from .instance import load_instance
from .pipeline import (
    MONOLITHIC, PER_SCENARIO, RunConfig, StageError, export_scenario_models,
    report_from_solutions, run, write_outputs,
)
from .report import emit_report
from .scenario import (
    CaseSpec, case_spec, generate_scenarios, load_forecast,
    load_scenario_set, save_scenario_set,
)
from .solver import SolveLimits


def _case_option(case, right_tail_prob, right_weight, left_weight, partitions, count):
    if right_tail_prob is not None:
        return CaseSpec(
            right_tail_prob=right_tail_prob,
            right_tail_weight=right_weight if right_weight is not None else 1.0,
            left_tail_weight=left_weight if left_weight is not None else 1.0,
            partitions=partitions or 50,
            scenario_count=count or 24,
            label="custom",
        )
    return case_spec(case, scenario_count=count, partitions=partitions)


@click.group()
def main():
    """Planning engine for stockpile allocation under demand scenarios."""


@main.command("generate-scenarios")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--forecast", "forecast_path", required=True, type=click.Path(exists=True))
@click.option("--case", default="I", show_default=True,
              help="preset label I..IV, or use --right-tail-prob for a custom case")
@click.option("--right-tail-prob", type=float, default=None)
@click.option("--right-weight", type=float, default=None)
@click.option("--left-weight", type=float, default=None)
@click.option("--partitions", type=int, default=None)
@click.option("--count", type=int, default=None, help="scenarios to draw")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def generate_scenarios_cmd(instance_path, forecast_path, case, right_tail_prob,
                           right_weight, left_weight, partitions, count, seed, out_path):
    """Sample a weighted demand-scenario set from a forecast CSV."""
    instance = load_instance(instance_path)
    with open(forecast_path, "r", encoding="utf-8") as fh:
        forecasts = load_forecast(fh, instance.horizon, instance.region_ids)
    spec = _case_option(case, right_tail_prob, right_weight, left_weight, partitions, count)
    ss = generate_scenarios(forecasts, spec, seed)
    save_scenario_set(ss, out_path)
    click.echo(f"wrote {ss.num_scenarios} scenarios (case {spec.label}, seed {seed}) to {out_path}")


def _limits_options(fn):
    fn = click.option("--time-limit", type=float, default=3600.0, show_default=True)(fn)
    fn = click.option("--rel-gap", type=float, default=1e-6, show_default=True)(fn)
    fn = click.option("--abs-gap", type=float, default=1e-9, show_default=True)(fn)
    fn = click.option("--node-limit", type=int, default=None)(fn)
    return fn


@main.command("solve")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--forecast", "forecast_path", default=None, type=click.Path())
@click.option("--scenarios", "scenarios_path", default=None, type=click.Path(),
              help="reuse a saved scenario set instead of sampling")
@click.option("--case", default="I", show_default=True)
@click.option("--right-tail-prob", type=float, default=None,
              help="define a custom case instead of a preset label")
@click.option("--right-weight", type=float, default=None)
@click.option("--left-weight", type=float, default=None)
@click.option("--partitions", type=int, default=None)
@click.option("--count", type=int, default=24, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--strategy", type=click.Choice([PER_SCENARIO, MONOLITHIC]),
              default=PER_SCENARIO, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_limits_options
@click.option("--out-dir", required=True, type=click.Path())
def solve_cmd(instance_path, forecast_path, scenarios_path, case, right_tail_prob,
              right_weight, left_weight, partitions, count, seed,
              strategy, workers, time_limit, rel_gap, abs_gap, node_limit, out_dir):
    """Run the full pipeline and write report.json / flows.csv to OUT_DIR."""
    from dataclasses import asdict

    if right_tail_prob is not None:
        case = asdict(_case_option(case, right_tail_prob, right_weight,
                                   left_weight, partitions, count))
    config = RunConfig(
        instance_path=instance_path,
        forecast_path=forecast_path,
        scenarios_path=scenarios_path,
        case=case,
        scenario_count=count,
        seed=seed,
        strategy=strategy,
        max_workers=workers,
        limits=SolveLimits(time_limit=time_limit, relative_gap=rel_gap,
                           absolute_gap=abs_gap, node_limit=node_limit),
    )
    try:
        output = run(config, progress=lambda s, t: click.echo(f"solved {s}/{t}", err=True))
    except StageError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    paths = write_outputs(output, out_dir)
    click.echo(f"total expected shortage: {output.report.total:.2f}")
    click.echo(f"report: {paths['report.json']}")


@main.command("export-model")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--scenarios", "scenarios_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["lp", "mps"]), default="mps",
              show_default=True)
@click.option("--monolithic", is_flag=True, default=False)
@click.option("--out-dir", required=True, type=click.Path())
def export_model_cmd(instance_path, scenarios_path, fmt, monolithic, out_dir):
    """Write solver-ready model files for an external MIP solver."""
    instance = load_instance(instance_path)
    scenarios = load_scenario_set(scenarios_path)
    written = export_scenario_models(instance, scenarios, fmt, out_dir, monolithic=monolithic)
    click.echo(f"wrote {len(written)} file(s) under {out_dir}")


@main.command("report")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--scenarios", "scenarios_path", required=True, type=click.Path(exists=True))
@click.option("--solutions", "solution_dir", required=True, type=click.Path(exists=True),
              help="directory of scenario_%03d.sol files (`name value` lines)")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path())
def report_cmd(instance_path, scenarios_path, solution_dir, fmt, out_path):
    """Build a report from externally solved per-scenario solution files."""
    instance = load_instance(instance_path)
    scenarios = load_scenario_set(scenarios_path)
    try:
        bundle = report_from_solutions(instance, scenarios, solution_dir)
    except StageError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    data = emit_report(bundle, fmt)
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(data.decode("utf-8"), nl=False)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
@click.option("--runs-dir", default="runs", show_default=True)
@click.option("--data-dir", default=None, help="directory bundled inputs resolve against")
@click.option("--workers", type=int, default=2, show_default=True,
              help="solver worker threads")
def serve_cmd(host, port, runs_dir, data_dir, workers):
    """Start the local planning service for the what-if UI."""
    import uvicorn

    from .service import create_app

    app = create_app(runs_dir=runs_dir, data_dir=data_dir, max_workers=workers)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
