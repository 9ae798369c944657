/**
 * Side-by-side comparison of two finished runs.  All values are read
 * straight from the report documents; nothing is recomputed client-side
 * beyond subtraction for the deltas.
 */

import type { ReportDoc } from "./types.js";

export interface MetricDelta {
  name: string;
  a: number;
  b: number;
  delta: number;           // b - a
}

export interface NetFlowDiffRow {
  region: string;
  a: number;
  b: number;
  delta: number;
}

export interface Comparison {
  metrics: MetricDelta[];
  curveA: number[];
  curveB: number[];
  netFlowDiff: NetFlowDiffRow[];
}

export class HorizonMismatchError extends Error {
  constructor(lenA: number, lenB: number) {
    super(`runs cover different horizons (${lenA} vs ${lenB} days); not comparable`);
  }
}

export function compareRuns(a: ReportDoc, b: ReportDoc): Comparison {
  const curveA = a.shortage.daily_expected;
  const curveB = b.shortage.daily_expected;
  if (curveA.length !== curveB.length ||
      a.run.instance.horizon.start_date !== b.run.instance.horizon.start_date) {
    throw new HorizonMismatchError(curveA.length, curveB.length);
  }

  const metrics: MetricDelta[] = [
    { name: "Total", a: a.shortage.total, b: b.shortage.total,
      delta: b.shortage.total - a.shortage.total },
    { name: "Worst day", a: a.shortage.worst_day.value, b: b.shortage.worst_day.value,
      delta: b.shortage.worst_day.value - a.shortage.worst_day.value },
    { name: "Worst day-state", a: a.shortage.worst_day_state.value,
      b: b.shortage.worst_day_state.value,
      delta: b.shortage.worst_day_state.value - a.shortage.worst_day_state.value },
  ];

  const regions = new Map<string, NetFlowDiffRow>();
  for (const row of a.flows) {
    regions.set(row.region, { region: row.region, a: row.net_flow, b: 0, delta: -row.net_flow });
  }
  for (const row of b.flows) {
    const existing = regions.get(row.region);
    if (existing) {
      existing.b = row.net_flow;
      existing.delta = row.net_flow - existing.a;
    } else {
      regions.set(row.region, { region: row.region, a: 0, b: row.net_flow, delta: row.net_flow });
    }
  }

  return {
    metrics,
    curveA: [...curveA],
    curveB: [...curveB],
    netFlowDiff: [...regions.values()],
  };
}
