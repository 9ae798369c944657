/**
 * Chart series builders and a dependency-free SVG renderer.  Series are
 * taken verbatim from report documents; builders only attach dates.
 */

import type { ReportDoc } from "./types.js";

export interface Series {
  label: string;
  points: number[];       // one per horizon day
  dates: string[];        // ISO, same length
}

export interface Bar {
  label: string;
  value: number;
}

export function horizonDates(report: ReportDoc): string[] {
  const start = new Date(`${report.run.instance.horizon.start_date}T00:00:00Z`);
  const out: string[] = [];
  for (let k = 0; k < report.run.instance.horizon.num_periods; k += 1) {
    const day = new Date(start.getTime() + k * 86400_000);
    out.push(day.toISOString().slice(0, 10));
  }
  return out;
}

export function shortageSeries(report: ReportDoc, label: string): Series {
  const dates = horizonDates(report);
  const points = report.shortage.daily_expected;
  if (points.length !== dates.length) {
    throw new Error(`curve has ${points.length} points for ${dates.length} days`);
  }
  return { label, points: [...points], dates };
}

export function netFlowBars(report: ReportDoc): Bar[] {
  return report.flows.map((row) => ({ label: row.region, value: row.net_flow }));
}

const W = 640;
const H = 240;
const PAD = 36;

function scale(values: number[]): (v: number) => number {
  const lo = Math.min(0, ...values);
  const hi = Math.max(1e-9, ...values);
  return (v) => H - PAD - ((v - lo) / (hi - lo)) * (H - 2 * PAD);
}

/** Overlaid line chart; one polyline per series. */
export function renderLineChart(series: Series[]): string {
  const all = series.flatMap((s) => s.points);
  const y = scale(all);
  const n = Math.max(...series.map((s) => s.points.length), 2);
  const x = (i: number) => PAD + (i / (n - 1)) * (W - 2 * PAD);
  const colors = ["#2563eb", "#dc2626", "#059669", "#d97706"];
  const lines = series.map((s, idx) => {
    const pts = s.points.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).join(" ");
    const color = colors[idx % colors.length];
    return `<polyline fill="none" stroke="${color}" stroke-width="2" points="${pts}">` +
      `<title>${s.label}</title></polyline>`;
  });
  const axis = `<line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" stroke="#888"/>`;
  return `<svg viewBox="0 0 ${W} ${H}" xmlns="http://www.w3.org/2000/svg">${axis}${lines.join("")}</svg>`;
}

/** Horizontal bar chart for per-region net flows (negative bars allowed). */
export function renderBarChart(bars: Bar[]): string {
  const height = Math.max(bars.length * 22 + 2 * PAD, 80);
  const magnitudes = bars.map((b) => Math.abs(b.value));
  const maxMag = Math.max(1e-9, ...magnitudes);
  const mid = W / 2;
  const rects = bars.map((b, i) => {
    const w = (Math.abs(b.value) / maxMag) * (W / 2 - PAD);
    const xPos = b.value >= 0 ? mid : mid - w;
    const yPos = PAD + i * 22;
    const color = b.value >= 0 ? "#059669" : "#dc2626";
    return `<rect x="${xPos.toFixed(1)}" y="${yPos}" width="${w.toFixed(1)}" height="16" fill="${color}">` +
      `<title>${b.label}: ${b.value}</title></rect>` +
      `<text x="4" y="${yPos + 12}" font-size="11">${b.label}</text>`;
  });
  const axis = `<line x1="${mid}" y1="${PAD - 8}" x2="${mid}" y2="${height - PAD + 8}" stroke="#888"/>`;
  return `<svg viewBox="0 0 ${W} ${height}" xmlns="http://www.w3.org/2000/svg">${axis}${rects.join("")}</svg>`;
}
