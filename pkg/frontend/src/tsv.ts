// Contour download in the interchange format: time<TAB>f0, 0.0000 unvoiced.

import type { ContourData } from "./api.js";

export function contourToTsv(contour: ContourData): string {
  const lines: string[] = [];
  for (let i = 0; i < contour.time.length; i++) {
    lines.push(`${contour.time[i].toFixed(6)}\t${contour.f0[i].toFixed(4)}`);
  }
  return lines.length ? lines.join("\n") + "\n" : "";
}
