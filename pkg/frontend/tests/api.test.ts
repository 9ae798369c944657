import { describe, expect, it } from "vitest";

import { ApiError, PlannerClient } from "../src/api.js";
import type { FetchLike } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function scriptedFetch(script: ((url: string) => Response | Error)[]): FetchLike {
  let call = 0;
  return async (url) => {
    const step = script[Math.min(call, script.length - 1)]!;
    call += 1;
    const result = step(url);
    if (result instanceof Error) throw result;
    return result;
  };
}

const config = {
  instance_path: "instance.json",
  forecast_path: "forecast.csv",
  case: "I",
  scenario_count: 2,
  seed: 0,
};

describe("PlannerClient", () => {
  it("submits and returns the job id", async () => {
    const client = new PlannerClient("http://x", scriptedFetch([
      () => jsonResponse({ schema_version: 1, job_id: "job-000001" }),
    ]));
    expect(await client.submitJob(config)).toBe("job-000001");
  });

  it("surfaces server-side validation detail", async () => {
    const client = new PlannerClient("http://x", scriptedFetch([
      () => jsonResponse({ detail: "gamma out of [0, 1]" }, 400),
    ]));
    await expect(client.submitJob(config)).rejects.toThrow("gamma out of [0, 1]");
  });

  it("marks connection failures retryable", async () => {
    const client = new PlannerClient("http://x", scriptedFetch([
      () => new TypeError("fetch failed"),
    ]));
    const err = await client.submitJob(config).catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).retryable).toBe(true);
  });

  it("polls through Queued and Running to Done", async () => {
    const record = (state: string, solved: number) => ({
      schema_version: 1, job_id: "j", state, progress: { solved, total: 2 },
    });
    const client = new PlannerClient("http://x", scriptedFetch([
      () => jsonResponse(record("Queued", 0)),
      () => jsonResponse(record("Running", 1)),
      () => jsonResponse(record("Done", 2)),
    ]));
    const seen: string[] = [];
    const final = await client.pollUntilDone("j", {
      intervalMs: 1,
      onProgress: (r) => seen.push(r.state),
    });
    expect(final.state).toBe("Done");
    expect(seen).toEqual(["Queued", "Running", "Done"]);
  });

  it("rejects when the job fails server-side", async () => {
    const client = new PlannerClient("http://x", scriptedFetch([
      () => jsonResponse({
        schema_version: 1, job_id: "j", state: "Failed",
        progress: { solved: 0, total: 0 }, error: "[scenario] missing file",
      }),
    ]));
    await expect(client.pollUntilDone("j", { intervalMs: 1 }))
      .rejects.toThrow("[scenario] missing file");
  });
});
