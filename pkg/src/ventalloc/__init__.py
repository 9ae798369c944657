"""Planning engine for allocating a scarce stockpile under demand scenarios."""

from .instance import (
    Horizon, InstanceValidationError, PlanningInstance, Region,
    cumulative_production, load_instance, save_instance, usable_initial_inventory,
    validate_instance,
)
from .scenario import (
    CASE_PRESETS, CaseSpec, DemandScenario, ForecastSeries, ScenarioSet,
    generate_scenarios, load_forecast, normalize_weights, sample_tail_partition,
)
from .model import (
    MilpModel, ScenarioPlan, VariableKey, build_extensive_form, compute_big_m,
    conservation_residuals, extract_plan, grid_counts, single_scenario_model,
)
from .solver import (
    SolveLimits, SolveResult, Violation, branch_and_bound, check_feasibility,
    solve_lp_relaxation,
)
from .lpformats import export_model, parse_lp, parse_mps, read_solution
from .report import (
    FlowRow, ReportBundle, build_report, emit_report, flows, parse_report,
    total_shortage, worst_day, worst_day_state,
)
from .pipeline import RunConfig, RunOutput, StageError, run

__version__ = "0.1.0"
