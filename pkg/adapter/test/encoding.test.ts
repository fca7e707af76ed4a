import { describe, expect, it } from "vitest";

import { canonicalJson, formatNumber, hashBytes, hashMillionths } from "../src/encoding.js";

describe("canonical numbers", () => {
  it("emits integers bare", () => {
    expect(formatNumber(600)).toBe("600");
    expect(formatNumber(-3)).toBe("-3");
  });

  it("formats floats to six trimmed decimals", () => {
    expect(formatNumber(0.1)).toBe("0.1");
    expect(formatNumber(0.912346)).toBe("0.912346");
    expect(formatNumber(0.25)).toBe("0.25");
  });

  it("survives millionths round-trips", () => {
    for (let m = 0; m < 1_000_000; m += 7919) {
      const s = formatNumber(m / 1_000_000);
      expect(Number(s)).toBeCloseTo(m / 1_000_000, 9);
    }
  });
});

describe("canonical json", () => {
  it("sorts keys and strips whitespace", () => {
    expect(canonicalJson({ b: 1, a: 2 })).toBe('{"a":2,"b":1}');
  });

  it("handles the full response envelope shape", () => {
    const doc = {
      request_id: "r-1",
      status: "OK",
      outputs: { scores: { safety: 0.95, visual_quality: 1 } },
      gpu_seconds: 4,
      model_id: "mock-judge-v1",
    };
    expect(canonicalJson(doc)).toBe(
      '{"gpu_seconds":4,"model_id":"mock-judge-v1","outputs":{"scores":{"safety":0.95,' +
        '"visual_quality":1}},"request_id":"r-1","status":"OK"}',
    );
  });

  it("escapes non-ascii like the wire format requires", () => {
    expect(canonicalJson("café")).toBe('"caf\\u00e9"');
  });
});

describe("hash-derived randomness", () => {
  it("is deterministic and in range", () => {
    const a = hashMillionths("d", "x", "1");
    expect(a).toBe(hashMillionths("d", "x", "1"));
    expect(a).toBeGreaterThanOrEqual(0);
    expect(a).toBeLessThan(1_000_000);
  });

  it("separates parts so concatenations cannot collide", () => {
    expect(hashBytes("d", "ab", "c").equals(hashBytes("d", "a", "bc"))).toBe(false);
  });
});
