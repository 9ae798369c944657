import { describe, expect, it } from "vitest";

import { netFlowBars, renderBarChart, renderLineChart, shortageSeries } from "../src/charts.js";
import { reportDoc } from "./fixtures.js";

describe("chart series builders", () => {
  it("series length equals the horizon length", () => {
    const report = reportDoc({ daily: [1, 2, 3] });
    const series = shortageSeries(report, "run");
    expect(series.points).toHaveLength(3);
    expect(series.dates).toEqual(["2020-03-23", "2020-03-24", "2020-03-25"]);
  });

  it("rejects a curve that does not match the horizon", () => {
    const report = reportDoc({ daily: [1, 2, 3] });
    report.run.instance.horizon.num_periods = 5;
    expect(() => shortageSeries(report, "run")).toThrow(/5 days/);
  });

  it("net flow bars come straight from the flow table", () => {
    const bars = netFlowBars(reportDoc({ flows: [{ region: "east", net: -2 }] }));
    expect(bars).toEqual([{ label: "east", value: -2 }]);
  });
});

describe("svg renderers", () => {
  it("one polyline per series", () => {
    const a = shortageSeries(reportDoc({ daily: [0, 1, 2] }), "a");
    const b = shortageSeries(reportDoc({ daily: [2, 1, 0] }), "b");
    const svg = renderLineChart([a, b]);
    expect(svg.match(/<polyline/g)).toHaveLength(2);
    expect(svg).toContain("<svg");
  });

  it("negative bars drawn on the left of the axis", () => {
    const svg = renderBarChart([
      { label: "east", value: -2 },
      { label: "west", value: 2 },
    ]);
    expect(svg.match(/<rect/g)).toHaveLength(2);
    expect(svg).toContain("east");
    expect(svg).toContain("west");
  });
});
