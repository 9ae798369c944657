import type { ReportDoc } from "../src/types.js";

export function reportDoc(overrides: {
  total?: number;
  daily?: number[];
  start?: string;
  flows?: { region: string; net: number }[];
  seed?: number;
} = {}): ReportDoc {
  const daily = overrides.daily ?? [0, 2.5, 1];
  const flows = overrides.flows ?? [
    { region: "east", net: -2 },
    { region: "west", net: 5 },
  ];
  return {
    schema_version: 1,
    run: {
      seed: overrides.seed ?? 7,
      case: { label: "IV", right_tail_prob: 0.75 },
      strategy: "per-scenario",
      instance: {
        horizon: { start_date: overrides.start ?? "2020-03-23", num_periods: daily.length },
      },
      probabilities: [0.5, 0.5],
      scenario_outcomes: [
        { omega: 0, status: "Optimal", objective: 3 },
        { omega: 1, status: "Optimal", objective: 1 },
      ],
    },
    shortage: {
      total: overrides.total ?? daily.reduce((a, b) => a + b, 0),
      worst_day: { value: Math.max(...daily), period: 2, date: "2020-03-24" },
      worst_day_state: { value: 1.5, period: 2, date: "2020-03-24", region: "west" },
      daily_expected: daily,
      per_scenario_objective: [3, 1],
    },
    flows: flows.map((f) => ({
      region: f.region,
      total_inflow: Math.max(f.net, 0) + 1,
      total_outflow: Math.max(-f.net, 0) + 1,
      net_flow: f.net,
    })),
  };
}
