/**
 * Client-side validation mirroring the engine's instance invariants, so
 * obviously bad configs never leave the browser.  The server remains the
 * authority; these checks only echo its rules field by field.
 */

import type { RunConfigPayload } from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

function rate(errors: FieldError[], field: string, value: number | undefined, max: number | null) {
  if (value === undefined) return;
  if (!Number.isFinite(value)) {
    errors.push({ field, message: "must be a number" });
    return;
  }
  if (value < 0 || (max !== null && value > max)) {
    const bound = max === null ? ">= 0" : `within [0, ${max}]`;
    errors.push({ field, message: `must be ${bound}` });
  }
}

export function validateConfig(config: RunConfigPayload): FieldError[] {
  const errors: FieldError[] = [];
  if (!config.instance_path) {
    errors.push({ field: "instance_path", message: "required" });
  }
  if (!config.forecast_path && !config.scenarios_path) {
    errors.push({ field: "forecast_path", message: "a forecast or a saved scenario set is required" });
  }
  if (!Number.isInteger(config.scenario_count) || config.scenario_count < 1) {
    errors.push({ field: "scenario_count", message: "must be a positive integer" });
  }
  if (!Number.isInteger(config.seed)) {
    errors.push({ field: "seed", message: "must be an integer" });
  }
  if (config.strategy && config.strategy !== "per-scenario" && config.strategy !== "monolithic") {
    errors.push({ field: "strategy", message: "must be per-scenario or monolithic" });
  }

  if (typeof config.case !== "string") {
    const c = config.case;
    if (!(c.right_tail_prob >= 0 && c.right_tail_prob <= 1)) {
      errors.push({ field: "right_tail_prob", message: "must be within [0, 1]" });
    }
    if (!(c.right_tail_weight > 0) || !(c.left_tail_weight > 0)) {
      errors.push({ field: "tail_weights", message: "weights must be positive" });
    }
    if (c.partitions !== undefined && (!Number.isInteger(c.partitions) || c.partitions < 1)) {
      errors.push({ field: "partitions", message: "must be a positive integer" });
    }
  }

  const o = config.overrides ?? {};
  rate(errors, "gamma", o.gamma, 1);
  rate(errors, "tau", o.tau, 1);
  rate(errors, "rho", o.rho, null);
  if (o.central_initial !== undefined &&
      (!Number.isInteger(o.central_initial) || o.central_initial < 0)) {
    errors.push({ field: "central_initial", message: "must be a nonnegative integer" });
  }
  if (o.production !== undefined &&
      o.production.some((q) => !Number.isInteger(q) || q < 0)) {
    errors.push({ field: "production", message: "entries must be nonnegative integers" });
  }

  const limits = config.limits ?? {};
  if (limits.time_limit !== undefined && !(limits.time_limit > 0)) {
    errors.push({ field: "time_limit", message: "must be positive" });
  }
  return errors;
}
