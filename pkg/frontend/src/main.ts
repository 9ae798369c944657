/**
 * DOM wiring for the what-if tool: a config form on the left, the run
 * list with progress in the middle, report and comparison panels on the
 * right.  All logic lives in the sibling modules; this file only moves
 * values between them and the page.
 */

import { ApiError, PlannerClient } from "./api.js";
import { netFlowBars, renderBarChart, renderLineChart, shortageSeries } from "./charts.js";
import { compareRuns, HorizonMismatchError } from "./compare.js";
import { formatDelta, formatTotal } from "./format.js";
import { WhatIfSession } from "./session.js";
import type { ReportDoc, RunConfigPayload } from "./types.js";
import { validateConfig } from "./validation.js";

const client = new PlannerClient(
  (window as unknown as { VENTALLOC_API?: string }).VENTALLOC_API ?? "http://127.0.0.1:8787",
);
const session = new WhatIfSession();

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

function num(id: string): number | undefined {
  const raw = el<HTMLInputElement>(id).value.trim();
  return raw === "" ? undefined : Number(raw);
}

function readConfig(): RunConfigPayload {
  const overrides: Record<string, number | number[]> = {};
  for (const key of ["gamma", "tau", "rho", "central_initial"]) {
    const value = num(`field-${key}`);
    if (value !== undefined) overrides[key] = value;
  }
  const production = el<HTMLInputElement>("field-production").value.trim();
  if (production) {
    overrides.production = production.split(",").map((q) => Number(q.trim()));
  }

  const caseLabel = el<HTMLSelectElement>("field-case").value;
  const caseValue: RunConfigPayload["case"] = caseLabel === "custom"
    ? {
        right_tail_prob: num("field-right-tail-prob") ?? 0.5,
        right_tail_weight: num("field-right-weight") ?? 1,
        left_tail_weight: num("field-left-weight") ?? 1,
        partitions: num("field-partitions") ?? 50,
        label: "custom",
      }
    : caseLabel;

  return {
    instance_path: el<HTMLInputElement>("field-instance").value.trim(),
    forecast_path: el<HTMLInputElement>("field-forecast").value.trim() || null,
    case: caseValue,
    scenario_count: num("field-count") ?? 24,
    seed: num("field-seed") ?? 0,
    strategy: el<HTMLSelectElement>("field-strategy").value as RunConfigPayload["strategy"],
    overrides: Object.keys(overrides).length ? overrides : undefined,
  };
}

function showErrors(errors: { field: string; message: string }[]): void {
  for (const node of document.querySelectorAll(".field-error")) node.textContent = "";
  const unslotted: string[] = [];
  for (const err of errors) {
    const slot = document.getElementById(`error-${err.field}`);
    if (slot) {
      slot.textContent = err.message;
    } else {
      unslotted.push(`${err.field}: ${err.message}`);
    }
  }
  el("form-error").textContent = unslotted.join("; ");
}

function renderRunList(): void {
  const list = el("runs");
  list.innerHTML = "";
  for (const run of session.list()) {
    const item = document.createElement("li");
    const pct = run.total ? Math.round((100 * run.solved) / run.total) : 0;
    item.innerHTML =
      `<strong>${run.label}</strong> <code>${run.jobId}</code> ${run.state}` +
      (run.state === "Running" ? ` <progress max="100" value="${pct}"></progress>` : "") +
      (run.error ? ` <span class="error">${run.error}</span>` : "") +
      (run.report ? ` <button data-view="${run.jobId}">view</button>` : "");
    list.appendChild(item);
  }
  for (const node of list.querySelectorAll("button[data-view]")) {
    node.addEventListener("click", () => {
      const jobId = (node as HTMLButtonElement).dataset.view!;
      renderReport(session.get(jobId).report!, session.get(jobId).label);
    });
  }
  const options = session.completedRuns()
    .map((r) => `<option value="${r.jobId}">${r.label}</option>`).join("");
  el<HTMLSelectElement>("compare-a").innerHTML = options;
  el<HTMLSelectElement>("compare-b").innerHTML = options;
}

function renderReport(report: ReportDoc, label: string): void {
  el("report-title").textContent = `${label} (case ${report.run.case.label}, seed ${report.run.seed})`;
  el("report-total").textContent = formatTotal(report.shortage.total);
  el("report-worst-day").textContent =
    `${formatTotal(report.shortage.worst_day.value)} on ${report.shortage.worst_day.date}`;
  el("report-worst-day-state").textContent =
    `${formatTotal(report.shortage.worst_day_state.value)} on ` +
    `${report.shortage.worst_day_state.date} in ${report.shortage.worst_day_state.region}`;
  el("chart-shortage").innerHTML = renderLineChart([shortageSeries(report, label)]);
  el("chart-flows").innerHTML = renderBarChart(netFlowBars(report));
}

function renderComparison(aId: string, bId: string): void {
  const runA = session.get(aId);
  const runB = session.get(bId);
  try {
    const cmp = compareRuns(runA.report!, runB.report!);
    el("compare-error").textContent = "";
    el("compare-metrics").innerHTML = cmp.metrics.map((m) =>
      `<tr><td>${m.name}</td><td>${formatTotal(m.a)}</td>` +
      `<td>${formatTotal(m.b)}</td><td>${formatDelta(m.delta)}</td></tr>`).join("");
    el("compare-flows").innerHTML = cmp.netFlowDiff.map((row) =>
      `<tr><td>${row.region}</td><td>${formatTotal(row.a)}</td>` +
      `<td>${formatTotal(row.b)}</td><td>${formatDelta(row.delta)}</td></tr>`).join("");
    el("chart-compare").innerHTML = renderLineChart([
      shortageSeries(runA.report!, runA.label),
      shortageSeries(runB.report!, runB.label),
    ]);
  } catch (err) {
    if (err instanceof HorizonMismatchError) {
      el("compare-error").textContent = err.message;
    } else {
      throw err;
    }
  }
}

async function submit(): Promise<void> {
  const config = readConfig();
  const errors = validateConfig(config);
  showErrors(errors);
  if (errors.length) return;

  const banner = el("connection-banner");
  try {
    const jobId = await client.submitJob(config);
    banner.hidden = true;
    const label = `run ${session.list().length + 1} ` +
      `(case ${config.case}, γ=${config.overrides?.gamma ?? "inst"}, ` +
      `τ=${config.overrides?.tau ?? "inst"})`;
    session.addRun(label, jobId, config);
    renderRunList();
    await client.pollUntilDone(jobId, {
      onProgress: (record) => {
        session.updateProgress(jobId, record.state, record.progress.solved,
                               record.progress.total, record.error ?? undefined);
        renderRunList();
      },
    });
    session.attachReport(jobId, await client.jobReport(jobId));
    renderRunList();
    renderReport(session.get(jobId).report!, session.get(jobId).label);
  } catch (err) {
    if (err instanceof ApiError && err.retryable) {
      banner.hidden = false;   // server offline: show the retry banner
    } else {
      el("form-error").textContent = String(err instanceof Error ? err.message : err);
    }
    renderRunList();
  }
}

async function init(): Promise<void> {
  try {
    const presets = await client.casePresets();
    el<HTMLSelectElement>("field-case").innerHTML = presets.map((preset) =>
      `<option value="${preset.label}">Case ${preset.label} ` +
      `(right tail p=${preset.right_tail_prob})</option>`).join("")
      + `<option value="custom">Custom case…</option>`;
    el("connection-banner").hidden = true;
  } catch {
    el("connection-banner").hidden = false;
  }
  el<HTMLSelectElement>("field-case").addEventListener("change", () => {
    el("custom-case").hidden = el<HTMLSelectElement>("field-case").value !== "custom";
  });
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  el<HTMLButtonElement>("retry").addEventListener("click", () => void init());
  el<HTMLButtonElement>("compare-go").addEventListener("click", () => {
    const a = el<HTMLSelectElement>("compare-a").value;
    const b = el<HTMLSelectElement>("compare-b").value;
    if (a && b) {
      session.setComparePair(a, b);
      renderComparison(a, b);
    }
  });
}

void init();
