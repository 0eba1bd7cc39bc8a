// The tuning panel: each row is one service config key. Edits are staged
// locally and only sent when the user hits re-analyze.

export interface ParamSpec {
  key: string; // flat service config key
  label: string;
  min?: number;
  max?: number;
  step?: number;
  kind: "number" | "choice" | "boolean";
  choices?: string[];
}

export const PARAM_SPECS: ParamSpec[] = [
  { key: "tracking.smoothness_weight", label: "smoothness weight (lambda)", kind: "number", min: 0, max: 5, step: 0.05 },
  { key: "sinusoidality_threshold", label: "sinusoidality threshold", kind: "number", min: 0, max: 1, step: 0.01 },
  { key: "twm.p", label: "TWM p (frequency weighting)", kind: "number", min: 0, max: 2, step: 0.05 },
  { key: "twm.q", label: "TWM q (mismatch coupling)", kind: "number", min: 0, max: 4, step: 0.05 },
  { key: "twm.r", label: "TWM r (amplitude reward)", kind: "number", min: 0, max: 2, step: 0.05 },
  { key: "twm.rho", label: "TWM rho (two-way mix)", kind: "number", min: 0, max: 2, step: 0.01 },
  { key: "twm.f0_min", label: "F0 min (Hz)", kind: "number", min: 40, max: 2000, step: 1 },
  { key: "twm.f0_max", label: "F0 max (Hz)", kind: "number", min: 40, max: 4000, step: 1 },
  { key: "tracking_mode", label: "tracking mode", kind: "choice", choices: ["single", "dual"] },
  { key: "voicing.enabled", label: "voicing gate", kind: "boolean" },
  { key: "voicing.bias", label: "voicing bias", kind: "number", min: -20, max: 20, step: 0.5 },
];

export type ConfigValue = number | string | boolean;

/** Staged edits that differ from the session's current config. */
export function stagedOverrides(
  current: Record<string, ConfigValue>,
  edits: Map<string, ConfigValue>,
): Record<string, ConfigValue> {
  const out: Record<string, ConfigValue> = {};
  for (const [key, value] of edits) {
    if (current[key] !== value) out[key] = value;
  }
  return out;
}
