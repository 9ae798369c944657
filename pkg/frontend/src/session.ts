/**
 * What-if session store: every submitted run keeps the exact config it
 * was solved with, and a report never mutates once fetched (both are
 * deep-frozen on entry).
 */

import type { JobState, ReportDoc, RunConfigPayload } from "./types.js";

export interface RunEntry {
  readonly label: string;
  readonly jobId: string;
  readonly config: RunConfigPayload;
  state: JobState;
  solved: number;
  total: number;
  error?: string;
  report?: ReportDoc;
}

function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object") {
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
    Object.freeze(value);
  }
  return value;
}

export class WhatIfSession {
  private runs: RunEntry[] = [];
  comparePair: [string, string] | null = null;

  addRun(label: string, jobId: string, config: RunConfigPayload): RunEntry {
    if (this.runs.some((r) => r.jobId === jobId)) {
      throw new Error(`job ${jobId} already tracked`);
    }
    const entry: RunEntry = {
      label,
      jobId,
      config: deepFreeze(structuredClone(config)),
      state: "Queued",
      solved: 0,
      total: 0,
    };
    this.runs.push(entry);
    return entry;
  }

  get(jobId: string): RunEntry {
    const entry = this.runs.find((r) => r.jobId === jobId);
    if (!entry) throw new Error(`unknown job ${jobId}`);
    return entry;
  }

  list(): readonly RunEntry[] {
    return this.runs;
  }

  updateProgress(jobId: string, state: JobState, solved: number, total: number,
                 error?: string): void {
    const entry = this.get(jobId);
    entry.state = state;
    entry.solved = Math.max(entry.solved, solved);
    entry.total = Math.max(entry.total, total);
    if (error) entry.error = error;
  }

  attachReport(jobId: string, report: ReportDoc): void {
    const entry = this.get(jobId);
    if (entry.report) throw new Error(`report for ${jobId} already attached`);
    entry.report = deepFreeze(structuredClone(report));
    entry.state = "Done";
  }

  completedRuns(): readonly RunEntry[] {
    return this.runs.filter((r) => r.report !== undefined);
  }

  setComparePair(a: string, b: string): void {
    if (!this.get(a).report || !this.get(b).report) {
      throw new Error("both runs must be Done before comparing");
    }
    this.comparePair = [a, b];
  }
}
