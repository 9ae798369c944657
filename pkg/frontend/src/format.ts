/**
 * Number formatting used everywhere a report value is shown.  The rendered
 * Total is formatTotal(report.shortage.total) and nothing else, so what the
 * user sees is always a pure formatting of the report field.
 */

export function formatTotal(value: number): string {
  return value.toFixed(2);
}

export function formatDelta(value: number): string {
  const sign = value > 0 ? "+" : "";
  return `${sign}${value.toFixed(2)}`;
}
