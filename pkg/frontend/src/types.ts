/** Payload shapes mirrored from the service (docs/schemas.md). */

export interface SolveLimitsPayload {
  time_limit?: number;
  relative_gap?: number;
  absolute_gap?: number;
  node_limit?: number | null;
}

export interface Overrides {
  gamma?: number;
  tau?: number;
  rho?: number;
  central_initial?: number;
  production?: number[];
}

export interface CustomCase {
  right_tail_prob: number;
  right_tail_weight: number;
  left_tail_weight: number;
  partitions?: number;
  label?: string;
}

export interface RunConfigPayload {
  instance_path: string;
  forecast_path?: string | null;
  scenarios_path?: string | null;
  case: string | CustomCase;
  scenario_count: number;
  seed: number;
  strategy?: "per-scenario" | "monolithic";
  limits?: SolveLimitsPayload;
  overrides?: Overrides;
}

export type JobState = "Queued" | "Running" | "Done" | "Failed";

export interface JobRecord {
  schema_version: number;
  job_id: string;
  state: JobState;
  progress: { solved: number; total: number };
  error?: string | null;
}

export interface ScenarioOutcome {
  omega: number;
  status: string;
  objective: number;
}

export interface FlowRowDoc {
  region: string;
  total_inflow: number;
  total_outflow: number;
  net_flow: number;
}

export interface ReportDoc {
  schema_version: number;
  run: {
    seed: number;
    case: { label: string; right_tail_prob: number };
    strategy: string;
    instance: { horizon: { start_date: string; num_periods: number } };
    probabilities: number[];
    scenario_outcomes: ScenarioOutcome[];
  };
  shortage: {
    total: number;
    worst_day: { value: number; period: number; date: string };
    worst_day_state: { value: number; period: number; date: string; region: string };
    daily_expected: number[];
    per_scenario_objective: number[];
  };
  flows: FlowRowDoc[];
}

export interface CasePreset {
  label: string;
  right_tail_prob: number;
  right_tail_weight: number;
  left_tail_weight: number;
  partitions: number;
  scenario_count: number;
}
