import { describe, expect, it } from "vitest";

import { WhatIfSession } from "../src/session.js";
import type { RunConfigPayload } from "../src/types.js";
import { reportDoc } from "./fixtures.js";

const config: RunConfigPayload = {
  instance_path: "instance.json",
  forecast_path: "forecast.csv",
  case: "I",
  scenario_count: 2,
  seed: 0,
  overrides: { gamma: 0.5 },
};

describe("WhatIfSession", () => {
  it("keeps the exact config snapshot, frozen against later edits", () => {
    const session = new WhatIfSession();
    const mutable = structuredClone(config);
    const entry = session.addRun("a", "job-1", mutable);
    mutable.overrides!.gamma = 0.9;            // caller mutates its copy
    expect(entry.config.overrides!.gamma).toBe(0.5);
    expect(() => {
      (entry.config as RunConfigPayload).seed = 99;
    }).toThrow();
  });

  it("reports never mutate after fetch", () => {
    const session = new WhatIfSession();
    session.addRun("a", "job-1", config);
    session.attachReport("job-1", reportDoc({ total: 4 }));
    const report = session.get("job-1").report!;
    expect(() => {
      (report.shortage as { total: number }).total = 0;
    }).toThrow();
    expect(() => session.attachReport("job-1", reportDoc())).toThrow(/already attached/);
  });

  it("progress is monotone and state transitions tracked", () => {
    const session = new WhatIfSession();
    session.addRun("a", "job-1", config);
    session.updateProgress("job-1", "Running", 1, 2);
    session.updateProgress("job-1", "Running", 0, 2);   // stale poll arrives late
    expect(session.get("job-1").solved).toBe(1);
  });

  it("comparing requires both runs done", () => {
    const session = new WhatIfSession();
    session.addRun("a", "job-1", config);
    session.addRun("b", "job-2", config);
    session.attachReport("job-1", reportDoc());
    expect(() => session.setComparePair("job-1", "job-2")).toThrow(/Done/);
    session.attachReport("job-2", reportDoc());
    session.setComparePair("job-1", "job-2");
    expect(session.comparePair).toEqual(["job-1", "job-2"]);
  });

  it("tracks concurrent runs independently", () => {
    const session = new WhatIfSession();
    session.addRun("a", "job-1", config);
    session.addRun("b", "job-2", { ...config, seed: 1 });
    session.updateProgress("job-2", "Running", 2, 2);
    expect(session.get("job-1").solved).toBe(0);
    expect(session.list()).toHaveLength(2);
    expect(() => session.addRun("dup", "job-1", config)).toThrow(/already tracked/);
  });
});
