import { describe, expect, it } from "vitest";

import {
  divergingColor,
  extent,
  feedbackBox,
  feedbackInterval,
  parseResultInput,
  scale,
} from "../src/geometry.js";

describe("feedbackInterval", () => {
  const range = { name: "x", low: 0, high: 1 };

  it("spans 40% of the axis at the default sigma fraction", () => {
    const band = feedbackInterval(range, 0.5, 0.1);
    expect(band.hi - band.lo).toBeCloseTo(0.4, 12);
    expect(band.lo).toBeCloseTo(0.3, 12);
    expect(band.hi).toBeCloseTo(0.7, 12);
  });

  it("clips at the domain boundary", () => {
    const band = feedbackInterval(range, 0.05, 0.1);
    expect(band.lo).toBe(0);
    expect(band.hi).toBeCloseTo(0.25, 12);
  });

  it("scales with the axis length", () => {
    const wide = { name: "y", low: -3, high: 3 };
    const band = feedbackInterval(wide, 0, 0.1);
    expect(band.hi - band.lo).toBeCloseTo(2.4, 12); // 40% of 6
  });
});

describe("feedbackBox", () => {
  it("builds one interval per axis", () => {
    const ivs = [
      { name: "x", low: -3, high: 3 },
      { name: "y", low: -3, high: 3 },
    ];
    const box = feedbackBox(ivs, {
      coords: [0, 2.9],
      triggering_ape: 20,
      sigma_fraction: 0.1,
    });
    expect(box).toHaveLength(2);
    expect(box[0].hi - box[0].lo).toBeCloseTo(2.4, 12);
    expect(box[1].hi).toBe(3); // clipped
    expect(box[1].lo).toBeCloseTo(1.7, 12);
  });
});

describe("scale and extent", () => {
  it("maps endpoints to pixels", () => {
    const s = scale(0, 10, 40, 600);
    expect(s(0)).toBe(40);
    expect(s(10)).toBe(600);
    expect(s(5)).toBe(320);
  });

  it("extent widens degenerate data", () => {
    expect(extent([2, 2, 2])).toEqual({ lo: 1, hi: 3 });
    expect(extent([])).toEqual({ lo: 0, hi: 1 });
  });
});

describe("divergingColor", () => {
  it("returns css colors across the range", () => {
    expect(divergingColor(0, 0, 1)).toMatch(/^rgb\(/);
    expect(divergingColor(0, 0, 1)).not.toBe(divergingColor(1, 0, 1));
  });
});

describe("parseResultInput", () => {
  it("accepts plain and scientific notation", () => {
    expect(parseResultInput("0.25")).toBe(0.25);
    expect(parseResultInput(" 1e-3 ")).toBe(0.001);
    expect(parseResultInput("-4")).toBe(-4);
  });

  it("rejects junk without throwing", () => {
    expect(parseResultInput("")).toBeNull();
    expect(parseResultInput("abc")).toBeNull();
    expect(parseResultInput("1.2.3")).toBeNull();
    expect(parseResultInput("NaN")).toBeNull();
    expect(parseResultInput("Infinity")).toBeNull();
  });
});
