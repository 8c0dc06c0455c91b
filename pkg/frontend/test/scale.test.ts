import { describe, expect, it } from "vitest";
import { linearScale, niceStep, ticks } from "../src/scale.js";

describe("linearScale", () => {
  it("maps domain endpoints to range endpoints", () => {
    const s = linearScale([0, 1], [100, 500]);
    expect(s(0)).toBe(100);
    expect(s(1)).toBe(500);
    expect(s(0.5)).toBe(300);
  });

  it("supports inverted ranges for screen-y axes", () => {
    const s = linearScale([0, 1], [442, 36]);
    expect(s(0)).toBe(442);
    expect(s(1)).toBe(36);
    expect(s(0.25)).toBeCloseTo(442 - 0.25 * (442 - 36), 10);
  });

  it("collapses a degenerate domain to the range midpoint", () => {
    const s = linearScale([2, 2], [0, 10]);
    expect(s(2)).toBe(5);
  });
});

describe("ticks", () => {
  it("covers the unit interval in tenths-of-two steps", () => {
    expect(ticks(0, 1)).toEqual([0, 0.2, 0.4, 0.6, 0.8, 1]);
  });

  it("produces float-noise-free labels", () => {
    for (const t of ticks(0, 0.5)) {
      expect(String(t).length).toBeLessThanOrEqual(4);
    }
  });

  it("handles wide integer domains", () => {
    const ts = ticks(2, 50);
    expect(ts[0]).toBeGreaterThanOrEqual(2);
    expect(ts[ts.length - 1]).toBeLessThanOrEqual(50);
    expect(ts.length).toBeGreaterThanOrEqual(4);
  });

  it("degenerates to a single tick", () => {
    expect(ticks(3, 3)).toEqual([3]);
  });
});

describe("niceStep", () => {
  it("picks 1-2-2.5-5 multiples", () => {
    expect(niceStep(1, 6)).toBeCloseTo(0.2, 12);
    expect(niceStep(10, 6)).toBeCloseTo(2, 12);
    expect(niceStep(412, 6)).toBeCloseTo(100, 12);
  });
});
