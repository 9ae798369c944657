/** Thin client for the planner service; polling, no push. */

import type { CasePreset, JobRecord, ReportDoc, RunConfigPayload } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number | null = null,
              readonly retryable: boolean = false) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class PlannerClient {
  constructor(readonly baseUrl: string, private readonly fetchImpl: FetchLike =
    (url, init) => fetch(url, init)) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(`server unreachable: ${String(err)}`, null, true);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(detail, response.status, response.status >= 500);
    }
    return (await response.json()) as T;
  }

  async submitJob(config: RunConfigPayload): Promise<string> {
    const doc = await this.request<{ job_id: string }>("/jobs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    return doc.job_id;
  }

  jobStatus(jobId: string): Promise<JobRecord> {
    return this.request<JobRecord>(`/jobs/${jobId}`);
  }

  jobReport(jobId: string): Promise<ReportDoc> {
    return this.request<ReportDoc>(`/jobs/${jobId}/report`);
  }

  async casePresets(): Promise<CasePreset[]> {
    const doc = await this.request<{ cases: CasePreset[] }>("/meta/cases");
    return doc.cases;
  }

  /**
   * Poll until the job reaches a terminal state.  Resolves with the final
   * record; rejects with ApiError when the job failed server-side.
   */
  async pollUntilDone(
    jobId: string,
    opts: { intervalMs?: number; timeoutMs?: number;
            onProgress?: (record: JobRecord) => void } = {},
  ): Promise<JobRecord> {
    const interval = opts.intervalMs ?? 500;
    const deadline = Date.now() + (opts.timeoutMs ?? 10 * 60 * 1000);
    for (;;) {
      const record = await this.jobStatus(jobId);
      opts.onProgress?.(record);
      if (record.state === "Done") return record;
      if (record.state === "Failed") {
        throw new ApiError(record.error ?? "job failed", null, false);
      }
      if (Date.now() > deadline) {
        throw new ApiError(`job ${jobId} still ${record.state} at timeout`, null, true);
      }
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }
}
