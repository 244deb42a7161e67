import { describe, expect, it } from "vitest";

import { normalizeRatings, percentPreview, serviceJson } from "../src/normalize.js";
import parity from "./fixtures/normalization_parity.json";

interface ParityCase {
  source: string;
  ratings: Record<string, number>;
  ack_text: string;
  ack: { source: string; allocations: Record<string, number> };
}

const cases = (parity as { cases: ParityCase[] }).cases;

describe("normalization parity against the live service", () => {
  it("ships 100 captured slider vectors", () => {
    expect(cases.length).toBe(100);
  });

  it("matches the service's normalized weights to 1e-9 on every vector", () => {
    for (const c of cases) {
      const ours = normalizeRatings(c.ratings);
      const theirs = c.ack.allocations;
      expect(Object.keys(ours).sort()).toEqual(Object.keys(theirs).sort());
      for (const [target, weight] of Object.entries(ours)) {
        expect(Math.abs(weight - theirs[target])).toBeLessThanOrEqual(1e-9);
      }
    }
  });

  it("actually matches bit for bit, not just to tolerance", () => {
    for (const c of cases) {
      const ours = normalizeRatings(c.ratings);
      for (const [target, weight] of Object.entries(ours)) {
        expect(weight).toBe(c.ack.allocations[target]);
      }
    }
  });

  it("reproduces the service's exact response bytes for each ack", () => {
    for (const c of cases) {
      const payload = { source: c.source, allocations: normalizeRatings(c.ratings) };
      expect(serviceJson(payload)).toBe(c.ack_text);
    }
  });
});

describe("normalizeRatings", () => {
  it("drops zero ratings and scales the rest", () => {
    expect(normalizeRatings({ a: 3, b: 2, c: 0 })).toEqual({ a: 0.6, b: 0.4 });
  });

  it("is idempotent on already-normalized weights", () => {
    const once = normalizeRatings({ a: 3, b: 2 });
    expect(normalizeRatings(once)).toEqual(once);
  });

  it("rejects all-zero and negative vectors", () => {
    expect(() => normalizeRatings({ a: 0 })).toThrow();
    expect(() => normalizeRatings({ a: -1, b: 2 })).toThrow();
  });

  it("sums to 1 whenever any rating is positive", () => {
    let state = 123456789;
    const rand = () => {
      // small deterministic LCG; plenty for layout fuzzing
      state = (1103515245 * state + 12345) % 2147483648;
      return state / 2147483648;
    };
    for (let trial = 0; trial < 200; trial++) {
      const ratings: Record<string, number> = {};
      const n = 1 + Math.floor(rand() * 8);
      for (let i = 0; i < n; i++) ratings[`t${i}`] = Math.floor(rand() * 101);
      ratings.t0 = Math.max(1, ratings.t0);
      const total = Object.values(normalizeRatings(ratings)).reduce((a, b) => a + b, 0);
      expect(Math.abs(total - 1)).toBeLessThanOrEqual(1e-12);
    }
  });
});

describe("percentPreview", () => {
  it("shows the 60/40 split for sliders at 3 and 2", () => {
    expect(percentPreview({ seoul: 3, hanoi: 2 })).toEqual({ seoul: 60, hanoi: 40 });
  });
});

describe("serviceJson float formatting", () => {
  it("writes whole floats with a trailing .0 like the service", () => {
    expect(serviceJson({ x: 1.0 })).toBe('{"x":1.0}');
  });

  it("keeps plain decimals as the shortest round trip", () => {
    expect(serviceJson({ x: 0.6 })).toBe('{"x":0.6}');
    expect(serviceJson({ x: 1 / 3 })).toBe('{"x":0.3333333333333333}');
  });

  it("uses two-digit exponents below 1e-4", () => {
    expect(serviceJson({ x: 0.000098 })).toBe('{"x":9.8e-05}');
  });

  it("preserves key order", () => {
    expect(serviceJson({ b: 1.5, a: 2.5 })).toBe('{"b":1.5,"a":2.5}');
  });
});
