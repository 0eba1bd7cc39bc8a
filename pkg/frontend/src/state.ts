// Session view-model: a tiny state machine that also enforces the
// one-in-flight-analysis rule the UI promises the service.

import type { AnalysisPayload, Region, SessionInfo } from "./api.js";

export type Phase = "empty" | "uploading" | "ready" | "analyzing" | "error";

export interface UiState {
  phase: Phase;
  session: SessionInfo | null;
  analysis: AnalysisPayload | null;
  selectedRegion: Region | null;
  errorMessage: string | null;
}

export const initialState: UiState = {
  phase: "empty",
  session: null,
  analysis: null,
  selectedRegion: null,
  errorMessage: null,
};

export type Action =
  | { type: "upload-start" }
  | { type: "upload-done"; session: SessionInfo }
  | { type: "analyze-start" }
  | { type: "analyze-done"; payload: AnalysisPayload }
  | { type: "select-region"; region: Region | null }
  | { type: "fail"; message: string }
  | { type: "dismiss-error" };

export function canAnalyze(state: UiState): boolean {
  return state.phase === "ready";
}

export function reduce(state: UiState, action: Action): UiState {
  switch (action.type) {
    case "upload-start":
      return { ...initialState, phase: "uploading" };
    case "upload-done":
      return {
        phase: "ready",
        session: action.session,
        analysis: action.session,
        selectedRegion: null,
        errorMessage: null,
      };
    case "analyze-start":
      if (!canAnalyze(state)) return state; // one in-flight request at most
      return { ...state, phase: "analyzing", errorMessage: null };
    case "analyze-done":
      return { ...state, phase: "ready", analysis: action.payload };
    case "select-region":
      return { ...state, selectedRegion: action.region };
    case "fail":
      return {
        ...state,
        phase: state.session ? "ready" : "error",
        errorMessage: action.message,
      };
    case "dismiss-error":
      return { ...state, errorMessage: null };
  }
}
