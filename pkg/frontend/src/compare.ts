/** Side-by-side deltas between two attempts, so prompt edits show their effect. */

import type { AttemptEntry } from "./history.js";

export interface AttemptDeltas {
  /** b minus a; null when either side is unvoiced. */
  f0: number | null;
  rate: number;
  rms: number;
}

export function computeDeltas(a: AttemptEntry, b: AttemptEntry): AttemptDeltas {
  const f0 =
    a.measurement.f0_mean === null || b.measurement.f0_mean === null
      ? null
      : b.measurement.f0_mean - a.measurement.f0_mean;
  return {
    f0,
    rate: b.measurement.rate - a.measurement.rate,
    rms: b.measurement.rms - a.measurement.rms,
  };
}

/** Signed, unit-carrying label, e.g. "+12.3 Hz" or "-0.40 ph/s". */
export function formatDelta(value: number | null, unit: string, digits = 2): string {
  if (value === null) return "n/a";
  const sign = value >= 0 ? "+" : "";
  return `${sign}${value.toFixed(digits)} ${unit}`;
}
