import { describe, expect, it } from "vitest";

import { toyEmbedder } from "../src/toyvec.js";

// Reference vectors generated by the engine's implementation of the same
// scheme; both sides must produce bit-equal float64 output.
const GOLDEN: Array<[string, number, number, number[]]> = [
  ["ice", 4, 42, [
    -0.5774193052071801, 0.24473305976038023,
    0.7449734885628793, 0.22739212117580732,
  ]],
  ["waa", 6, 11, [
    0.32120524686618596, -0.6766478743825729, 0.6154302228315015,
    -0.07697858700946966, 0.20545707223303275, 0.10991893793247173,
  ]],
  ["kick", 3, 0, [
    -0.7943947698122789, -0.6033476641624775, -0.07006101515521213,
  ]],
];

describe("toyEmbedder", () => {
  it("is deterministic", () => {
    expect(toyEmbedder("ice", 8, 42)).toEqual(toyEmbedder("ice", 8, 42));
  });

  it("is unit norm", () => {
    for (const dim of [1, 3, 8, 33]) {
      const v = toyEmbedder("ice", dim, 42);
      const norm = Math.sqrt(v.reduce((a, x) => a + x * x, 0));
      expect(norm).toBeCloseTo(1.0, 9);
    }
  });

  it("differs across seeds and tokens", () => {
    expect(toyEmbedder("ice", 8, 42)).not.toEqual(toyEmbedder("ice", 8, 43));
    expect(toyEmbedder("ice", 8, 42)).not.toEqual(toyEmbedder("icy", 8, 42));
  });

  it("matches the engine's vectors exactly", () => {
    for (const [token, dim, seed, want] of GOLDEN) {
      const got = Array.from(toyEmbedder(token, dim, seed));
      expect(got).toEqual(want);
    }
  });

  it("rejects bad dimensions", () => {
    expect(() => toyEmbedder("ice", 0, 1)).toThrow();
  });
});
