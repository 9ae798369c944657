import json
import os

import pytest
from click.testing import CliRunner

from ventalloc.cli import main

from conftest import FIXTURES

INSTANCE = os.path.join(FIXTURES, "instance.json")
FORECAST = os.path.join(FIXTURES, "forecast.csv")


@pytest.fixture
def runner():
    return CliRunner()


def test_generate_scenarios_writes_set(runner, tmp_path):
    out = tmp_path / "scen.json"
    result = runner.invoke(main, [
        "generate-scenarios", "--instance", INSTANCE, "--forecast", FORECAST,
        "--case", "IV", "--count", "4", "--seed", "9", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    assert doc["seed"] == 9 and len(doc["scenarios"]) == 4
    assert doc["case"]["right_tail_prob"] == 0.75


def test_custom_case_flags(runner, tmp_path):
    out = tmp_path / "scen.json"
    result = runner.invoke(main, [
        "generate-scenarios", "--instance", INSTANCE, "--forecast", FORECAST,
        "--right-tail-prob", "0.6", "--right-weight", "2", "--left-weight", "1",
        "--count", "3", "--seed", "1", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text())["case"]["label"] == "custom"


def test_solve_end_to_end(runner, tmp_path):
    out_dir = tmp_path / "run"
    result = runner.invoke(main, [
        "solve", "--instance", INSTANCE, "--forecast", FORECAST,
        "--case", "I", "--count", "2", "--seed", "4",
        "--rel-gap", "1e-9", "--abs-gap", "1e-12",
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((out_dir / "report.json").read_text())
    assert report["run"]["seed"] == 4
    assert "total" in report["shortage"]


def test_solve_reuses_saved_scenarios(runner, tmp_path):
    scen = tmp_path / "scen.json"
    runner.invoke(main, [
        "generate-scenarios", "--instance", INSTANCE, "--forecast", FORECAST,
        "--case", "II", "--count", "2", "--seed", "6", "--out", str(scen),
    ])
    out_dir = tmp_path / "run"
    result = runner.invoke(main, [
        "solve", "--instance", INSTANCE, "--scenarios", str(scen),
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    assert (out_dir / "flows.csv").exists()


def test_export_then_report_round_trip(runner, tmp_path):
    scen = tmp_path / "scen.json"
    runner.invoke(main, [
        "generate-scenarios", "--instance", INSTANCE, "--forecast", FORECAST,
        "--case", "I", "--count", "2", "--seed", "2", "--out", str(scen),
    ])
    models = tmp_path / "models"
    result = runner.invoke(main, [
        "export-model", "--instance", INSTANCE, "--scenarios", str(scen),
        "--format", "mps", "--out-dir", str(models),
    ])
    assert result.exit_code == 0, result.output
    assert sorted(os.listdir(models)) == ["scenario_000.mps", "scenario_001.mps"]

    # solve locally, dump solutions in the external `name value` layout
    from ventalloc.instance import load_instance
    from ventalloc.lpformats import write_solution
    from ventalloc.model import single_scenario_model
    from ventalloc.scenario import load_scenario_set
    from ventalloc.solver import SolveLimits, branch_and_bound

    instance = load_instance(INSTANCE)
    scenarios = load_scenario_set(scen)
    sols = tmp_path / "sols"
    os.makedirs(sols)
    for w in range(2):
        model = single_scenario_model(instance, scenarios, w)
        res = branch_and_bound(model, SolveLimits(time_limit=60))
        (sols / f"scenario_{w:03d}.sol").write_text(write_solution(model, res.incumbent))

    result = runner.invoke(main, [
        "report", "--instance", INSTANCE, "--scenarios", str(scen),
        "--solutions", str(sols), "--format", "json",
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["run"]["strategy"] == "external"


def test_solve_failure_exits_nonzero(runner, tmp_path):
    result = runner.invoke(main, [
        "solve", "--instance", INSTANCE, "--forecast", str(tmp_path / "nope.csv"),
        "--out-dir", str(tmp_path / "out"),
    ])
    assert result.exit_code == 1
    assert "scenario stage failed" in result.output


def test_help_documents_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    for sub in ("generate-scenarios", "solve", "report", "serve", "export-model"):
        assert sub in result.output
