import json
import os

import pytest

from ventalloc.instance import load_instance
from ventalloc.model import conservation_residuals
from ventalloc.pipeline import (
    MONOLITHIC, RunConfig, StageError, config_from_dict, config_to_dict,
    export_scenario_models, report_from_solutions, run, write_outputs,
)
from ventalloc.report import emit_report
from ventalloc.scenario import load_scenario_set
from ventalloc.solver import SolveLimits

TIGHT = SolveLimits(time_limit=120.0, relative_gap=1e-9, absolute_gap=1e-12)


def fixture_config(fixture_instance_path, fixture_forecast_path, **kw):
    base = dict(
        instance_path=fixture_instance_path,
        forecast_path=fixture_forecast_path,
        case="II",
        scenario_count=2,
        seed=3,
        limits=TIGHT,
    )
    base.update(kw)
    return RunConfig(**base)


class TestRun:
    def test_fixture_end_to_end(self, fixture_instance_path, fixture_forecast_path):
        out = run(fixture_config(fixture_instance_path, fixture_forecast_path))
        assert len(out.plans) == 2
        assert all(o.status == "Optimal" for o in out.report.outcomes)
        for plan in out.plans:
            assert conservation_residuals(out.instance, plan).max() < 1e-6
        assert out.report.total == pytest.approx(
            sum(p * plan.shortage for p, plan in zip(out.scenarios.probabilities, out.plans)),
            abs=1e-9,
        )
        # expected units leaving the center are bounded by what it ever holds
        net_total = sum(r.net_flow for r in out.report.flow_rows)
        assert net_total <= out.instance.central_initial + sum(out.instance.production) + 1e-9

    def test_unknown_forecast_fails_at_scenario_stage(self, fixture_instance_path):
        cfg = RunConfig(instance_path=fixture_instance_path,
                        forecast_path="no/such/file.csv", scenario_count=2)
        with pytest.raises(StageError) as err:
            run(cfg)
        assert err.value.stage == "scenario"

    def test_unknown_instance_fails_at_ingest(self, fixture_forecast_path):
        cfg = RunConfig(instance_path="missing.json", forecast_path=fixture_forecast_path)
        with pytest.raises(StageError) as err:
            run(cfg)
        assert err.value.stage == "ingest"

    def test_same_seed_byte_identical_report(self, fixture_instance_path, fixture_forecast_path):
        cfg = fixture_config(fixture_instance_path, fixture_forecast_path, seed=11)
        a = emit_report(run(cfg).report, "json")
        b = emit_report(run(cfg).report, "json")
        assert a == b

    def test_strategies_agree(self, fixture_instance_path, fixture_forecast_path):
        per = run(fixture_config(fixture_instance_path, fixture_forecast_path))
        mono = run(fixture_config(fixture_instance_path, fixture_forecast_path,
                                  strategy=MONOLITHIC))
        assert mono.report.total == pytest.approx(per.report.total, abs=1e-6)

    def test_worker_pool_matches_serial(self, fixture_instance_path, fixture_forecast_path):
        serial = run(fixture_config(fixture_instance_path, fixture_forecast_path, seed=5))
        parallel = run(fixture_config(fixture_instance_path, fixture_forecast_path,
                                      seed=5, max_workers=4))
        assert emit_report(serial.report, "json") == emit_report(parallel.report, "json")

    def test_overrides_applied(self, fixture_instance_path, fixture_forecast_path):
        cfg = fixture_config(fixture_instance_path, fixture_forecast_path,
                             overrides={"tau": 0.0, "central_initial": 0})
        out = run(cfg)
        assert out.instance.tau == (0.0, 0.0)
        assert out.instance.central_initial == 0

    def test_progress_reported(self, fixture_instance_path, fixture_forecast_path):
        seen = []
        run(fixture_config(fixture_instance_path, fixture_forecast_path),
            progress=lambda s, t: seen.append((s, t)))
        assert seen == [(1, 2), (2, 2)]


class TestOutputsAndConfig:
    def test_write_outputs_layout(self, tmp_path, fixture_instance_path, fixture_forecast_path):
        out = run(fixture_config(fixture_instance_path, fixture_forecast_path))
        paths = write_outputs(out, tmp_path)
        for name in ("report.json", "flows.csv", "daily_shortage.csv",
                     "config.json", "scenarios.json"):
            assert os.path.exists(paths[name])
        saved = load_scenario_set(paths["scenarios.json"])
        assert saved.seed == out.scenarios.seed

    def test_config_round_trip(self, fixture_instance_path, fixture_forecast_path):
        cfg = fixture_config(fixture_instance_path, fixture_forecast_path,
                             strategy=MONOLITHIC, max_workers=3)
        doc = json.loads(json.dumps(config_to_dict(cfg)))
        assert config_from_dict(doc) == cfg

    def test_custom_case_spec_accepted(self, fixture_instance_path, fixture_forecast_path):
        custom = {"right_tail_prob": 0.9, "right_tail_weight": 3.0,
                  "left_tail_weight": 1.0, "partitions": 10, "label": "custom"}
        cfg = fixture_config(fixture_instance_path, fixture_forecast_path, case=custom)
        out = run(cfg)
        assert out.scenarios.case.right_tail_prob == 0.9
        assert out.scenarios.case.partitions == 10
        doc = json.loads(json.dumps(config_to_dict(cfg)))
        assert config_from_dict(doc) == cfg

    def test_config_rejects_unknown_strategy(self, fixture_instance_path):
        with pytest.raises(ValueError):
            RunConfig(instance_path=fixture_instance_path,
                      forecast_path="f.csv", strategy="magic")


class TestExternalSolverPath:
    def test_export_then_import_solutions(self, tmp_path, fixture_instance_path,
                                          fixture_forecast_path):
        out = run(fixture_config(fixture_instance_path, fixture_forecast_path))
        scen_path = write_outputs(out, tmp_path)["scenarios.json"]
        scenarios = load_scenario_set(scen_path)
        instance = load_instance(fixture_instance_path)

        model_dir = tmp_path / "models"
        files = export_scenario_models(instance, scenarios, "mps", model_dir)
        assert len(files) == 2 and all(os.path.exists(f) for f in files)

        # play the external solver: dump our own incumbents as `name value`
        from ventalloc.lpformats import write_solution
        from ventalloc.model import single_scenario_model
        sol_dir = tmp_path / "sols"
        os.makedirs(sol_dir)
        for w, res in enumerate(out.results):
            model = single_scenario_model(instance, scenarios, w)
            with open(sol_dir / f"scenario_{w:03d}.sol", "w") as fh:
                fh.write(write_solution(model, res.incumbent))

        bundle = report_from_solutions(instance, scenarios, sol_dir)
        assert bundle.total == pytest.approx(out.report.total, abs=1e-9)
        assert [o.status for o in bundle.outcomes] == ["External", "External"]

    def test_missing_solution_file_flagged(self, tmp_path, fixture_instance_path,
                                           fixture_forecast_path):
        out = run(fixture_config(fixture_instance_path, fixture_forecast_path))
        scen_path = write_outputs(out, tmp_path)["scenarios.json"]
        scenarios = load_scenario_set(scen_path)
        instance = load_instance(fixture_instance_path)
        with pytest.raises(StageError, match="scenario_000.sol"):
            report_from_solutions(instance, scenarios, tmp_path / "empty")
