// Pixel <-> (time, frequency) mapping for the spectrogram canvas, driven
// entirely by the axis headers the service attaches to each image. Keeping
// this in one place is what makes the 1-pixel overlay registration testable.

export interface AxisMapping {
  timeStart: number; // seconds at the left edge (center of first pixel column)
  secondsPerPixel: number;
  freqMinHz: number; // bottom row center
  freqMaxHz: number; // top row center
  width: number; // pixels
  height: number; // pixels
}

export function timeToX(axis: AxisMapping, t: number): number {
  return (t - axis.timeStart) / axis.secondsPerPixel;
}

export function xToTime(axis: AxisMapping, x: number): number {
  return axis.timeStart + x * axis.secondsPerPixel;
}

// rows are log-spaced: row 0 (top) = fmax, row height-1 (bottom) = fmin
export function freqToY(axis: AxisMapping, f: number): number {
  const logSpan = Math.log(axis.freqMaxHz / axis.freqMinHz);
  const frac = Math.log(f / axis.freqMinHz) / logSpan;
  return (axis.height - 1) * (1 - frac);
}

export function yToFreq(axis: AxisMapping, y: number): number {
  const logSpan = Math.log(axis.freqMaxHz / axis.freqMinHz);
  const frac = 1 - y / (axis.height - 1);
  return axis.freqMinHz * Math.exp(frac * logSpan);
}
