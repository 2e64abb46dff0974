/** Pure geometry/scale helpers shared by the renderers. */

import { FeedbackView, VariableRange } from "./types.js";

export interface Interval {
  lo: number;
  hi: number;
}

/** The feedback sampling box on one axis: center +/- 2*sigma clipped to the
 * range, where sigma is a fraction of the axis length. Unclipped it spans
 * 4 * sigma_fraction of the axis (40% at the default 10%). */
export function feedbackInterval(
  range: VariableRange,
  center: number,
  sigmaFraction: number,
): Interval {
  const sigma = sigmaFraction * (range.high - range.low);
  return {
    lo: Math.max(range.low, center - 2 * sigma),
    hi: Math.min(range.high, center + 2 * sigma),
  };
}

export function feedbackBox(
  ivs: VariableRange[],
  feedback: FeedbackView,
): Interval[] {
  return ivs.map((r, i) =>
    feedbackInterval(r, feedback.coords[i], feedback.sigma_fraction),
  );
}

/** Linear map from [lo, hi] to pixel coordinates. */
export function scale(lo: number, hi: number, px0: number, px1: number) {
  const span = hi - lo || 1;
  return (v: number) => px0 + ((v - lo) / span) * (px1 - px0);
}

export function extent(values: number[]): Interval {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return { lo: 0, hi: 1 };
  if (lo === hi) return { lo: lo - 1, hi: hi + 1 };
  return { lo, hi };
}

/** Blue-white-red diverging color for a value inside [lo, hi]. */
export function divergingColor(v: number, lo: number, hi: number): string {
  const t = Math.max(0, Math.min(1, (v - lo) / (hi - lo || 1)));
  const mix = (a: number, b: number, u: number) => Math.round(a + (b - a) * u);
  let r: number, g: number, b: number;
  if (t < 0.5) {
    const u = t / 0.5;
    [r, g, b] = [mix(33, 247, u), mix(102, 247, u), mix(172, 247, u)];
  } else {
    const u = (t - 0.5) / 0.5;
    [r, g, b] = [mix(247, 178, u), mix(247, 24, u), mix(247, 43, u)];
  }
  return `rgb(${r},${g},${b})`;
}

export const PROVENANCE_COLORS: Record<string, string> = {
  initial: "#1f6fd6",
  drawn: "#1da153",
  feedback: "#d62828",
};

/** Validate the result-entry text; returns the number or null when the
 * field should show inline validation instead of submitting. */
export function parseResultInput(text: string): number | null {
  const trimmed = text.trim();
  if (trimmed === "") return null;
  const v = Number(trimmed);
  return Number.isFinite(v) ? v : null;
}
