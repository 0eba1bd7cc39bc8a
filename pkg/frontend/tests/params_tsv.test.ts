import { describe, expect, it } from "vitest";

import { PARAM_SPECS, stagedOverrides } from "../src/params.js";
import { contourToTsv } from "../src/tsv.js";

describe("parameter staging", () => {
  it("only reports keys that differ from the current config", () => {
    const current = { "twm.p": 0.5, "tracking.smoothness_weight": 0.4, tracking_mode: "single" };
    const edits = new Map<string, number | string | boolean>([
      ["twm.p", 0.5], // unchanged
      ["tracking.smoothness_weight", 0.8],
      ["tracking_mode", "dual"],
    ]);
    expect(stagedOverrides(current, edits)).toEqual({
      "tracking.smoothness_weight": 0.8,
      tracking_mode: "dual",
    });
  });

  it("exposes the primary tuning knobs with their config keys", () => {
    const keys = PARAM_SPECS.map((s) => s.key);
    for (const expected of [
      "tracking.smoothness_weight",
      "sinusoidality_threshold",
      "twm.p",
      "twm.q",
      "twm.r",
      "twm.rho",
      "twm.f0_min",
      "twm.f0_max",
      "tracking_mode",
      "voicing.bias",
    ]) {
      expect(keys).toContain(expected);
    }
  });
});

describe("contour TSV download", () => {
  it("formats time and f0 with unvoiced zeros", () => {
    const text = contourToTsv({ time: [0, 0.01], f0: [440, 0], salience: [0, 0] });
    expect(text).toBe("0.000000\t440.0000\n0.010000\t0.0000\n");
  });

  it("empty contour gives empty text", () => {
    expect(contourToTsv({ time: [], f0: [], salience: [] })).toBe("");
  });
});
