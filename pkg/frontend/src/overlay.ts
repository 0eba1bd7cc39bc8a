// Contour overlay geometry: polyline segments over voiced runs, candidate
// dots, and region splicing. Pure data-in data-out so the splice invariant
// (frames outside a re-analyzed region never move) is unit-testable.

import type { AnalysisPayload, Candidate, ContourData } from "./api.js";
import { AxisMapping, freqToY, timeToX } from "./axis.js";

export interface Point {
  x: number;
  y: number;
}

/** Voiced runs of the contour as pixel polylines; splits at unvoiced frames. */
export function contourPolylines(contour: ContourData, axis: AxisMapping): Point[][] {
  const lines: Point[][] = [];
  let current: Point[] = [];
  for (let i = 0; i < contour.time.length; i++) {
    const f0 = contour.f0[i];
    if (f0 > 0) {
      current.push({ x: timeToX(axis, contour.time[i]), y: freqToY(axis, f0) });
    } else if (current.length) {
      lines.push(current);
      current = [];
    }
  }
  if (current.length) lines.push(current);
  return lines;
}

/** Faint dots for every per-frame candidate the analysis reported. */
export function candidateDots(
  times: number[],
  candidates: Candidate[][],
  axis: AxisMapping,
): Point[] {
  const dots: Point[] = [];
  for (let i = 0; i < candidates.length; i++) {
    for (const cand of candidates[i]) {
      if (cand.f0 > 0) {
        dots.push({ x: timeToX(axis, times[i]), y: freqToY(axis, cand.f0) });
      }
    }
  }
  return dots;
}

/**
 * Replace the frames inside [t0, t1) with the server's spliced result.
 * The service already returns the whole spliced contour; this helper exists
 * so the view model can verify and repaint only the dirty span.
 */
export function spliceResult(
  previous: AnalysisPayload,
  next: AnalysisPayload,
  t0: number,
  t1: number,
): { payload: AnalysisPayload; dirty: [number, number] } {
  const times = previous.contour.time;
  let first = times.length;
  let last = -1;
  for (let i = 0; i < times.length; i++) {
    if (times[i] >= t0 && times[i] < t1) {
      if (i < first) first = i;
      last = i;
    }
  }
  return { payload: next, dirty: [first, last] };
}

/** Frames outside [t0, t1) must be identical between two payloads. */
export function framesOutsideRegionUnchanged(
  before: AnalysisPayload,
  after: AnalysisPayload,
  t0: number,
  t1: number,
): boolean {
  const times = before.contour.time;
  if (times.length !== after.contour.time.length) return false;
  for (let i = 0; i < times.length; i++) {
    const inside = times[i] >= t0 && times[i] < t1;
    if (inside) continue;
    if (
      before.contour.f0[i] !== after.contour.f0[i] ||
      before.contour.salience[i] !== after.contour.salience[i] ||
      before.labels[i] !== after.labels[i]
    ) {
      return false;
    }
  }
  return true;
}
