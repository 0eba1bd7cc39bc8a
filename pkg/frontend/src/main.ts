// Interactive tuner: upload a WAV, see the contour over the spectrogram,
// stage parameter edits, re-analyze (optionally a drag-selected region),
// and A/B audition the original against the synthesized contour.
//
// All numbers on screen come from service responses; this file only draws.

import { ApiClient, ServiceError, type AnalysisPayload } from "./api.js";
import { AxisMapping, timeToX, xToTime } from "./axis.js";
import { candidateDots, contourPolylines, framesOutsideRegionUnchanged } from "./overlay.js";
import { PARAM_SPECS, stagedOverrides, type ConfigValue } from "./params.js";
import { initialState, reduce, type UiState } from "./state.js";
import { contourToTsv } from "./tsv.js";

const api = new ApiClient("");

let state: UiState = initialState;
const edits = new Map<string, ConfigValue>();
let axis: AxisMapping | null = null;
let spectrogramBitmap: ImageBitmap | null = null;
let dragStartX: number | null = null;
let audio: HTMLAudioElement | null = null;
let playheadTimer = 0;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function dispatch(action: Parameters<typeof reduce>[1]): void {
  state = reduce(state, action);
  render();
}

async function uploadFile(file: File): Promise<void> {
  dispatch({ type: "upload-start" });
  try {
    const session = await api.createSession(await file.arrayBuffer());
    dispatch({ type: "upload-done", session });
    edits.clear();
    await refreshSpectrogram();
    buildParamPanel();
    render();
  } catch (err) {
    dispatch({ type: "fail", message: describe(err) });
  }
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) return `service: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

async function refreshSpectrogram(): Promise<void> {
  if (!state.session) return;
  const image = await api.spectrogram(state.session.session_id);
  spectrogramBitmap = await createImageBitmap(image.blob);
  axis = {
    timeStart: image.timeStart,
    secondsPerPixel: image.secondsPerPixel,
    freqMinHz: image.freqMinHz,
    freqMaxHz: image.freqMaxHz,
    width: spectrogramBitmap.width,
    height: spectrogramBitmap.height,
  };
}

async function runAnalysis(regionOnly: boolean): Promise<void> {
  if (!state.session || !state.analysis) return;
  const overrides = stagedOverrides(state.analysis.config, edits);
  const region = regionOnly && state.selectedRegion ? state.selectedRegion : undefined;
  const before = state.analysis;
  dispatch({ type: "analyze-start" });
  try {
    const payload = await api.analyze(state.session.session_id, overrides, region);
    if (region && !framesOutsideRegionUnchanged(before, payload, region.t0, region.t1)) {
      console.warn("service changed frames outside the selected region");
    }
    dispatch({ type: "analyze-done", payload });
  } catch (err) {
    dispatch({ type: "fail", message: describe(err) });
    highlightOffendingParam(describe(err));
  }
}

function highlightOffendingParam(message: string): void {
  for (const spec of PARAM_SPECS) {
    const row = document.querySelector(`[data-key="${spec.key}"]`);
    row?.classList.toggle("bad", message.includes(spec.key));
  }
}

function buildParamPanel(): void {
  const panel = $("params");
  panel.innerHTML = "";
  const config = state.analysis?.config ?? {};
  for (const spec of PARAM_SPECS) {
    const row = document.createElement("label");
    row.className = "param-row";
    row.dataset.key = spec.key;
    const name = document.createElement("span");
    name.textContent = spec.label;
    name.title = spec.key;
    const keyHint = document.createElement("code");
    keyHint.textContent = spec.key;
    let input: HTMLInputElement | HTMLSelectElement;
    const current = edits.get(spec.key) ?? config[spec.key];
    if (spec.kind === "choice") {
      input = document.createElement("select");
      for (const choice of spec.choices ?? []) {
        const opt = document.createElement("option");
        opt.value = choice;
        opt.textContent = choice;
        input.appendChild(opt);
      }
      input.value = String(current);
      input.addEventListener("change", () => edits.set(spec.key, input.value));
    } else if (spec.kind === "boolean") {
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = Boolean(current);
      box.addEventListener("change", () => edits.set(spec.key, box.checked));
      input = box;
    } else {
      const num = document.createElement("input");
      num.type = "number";
      if (spec.min !== undefined) num.min = String(spec.min);
      if (spec.max !== undefined) num.max = String(spec.max);
      if (spec.step !== undefined) num.step = String(spec.step);
      num.value = String(current);
      num.addEventListener("change", () => edits.set(spec.key, Number(num.value)));
      input = num;
    }
    row.append(name, input, keyHint);
    panel.appendChild(row);
  }
}

function drawOverlay(): void {
  const canvas = $<HTMLCanvasElement>("view");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!spectrogramBitmap || !axis || !state.analysis) return;
  canvas.width = axis.width;
  canvas.height = axis.height;
  ctx.drawImage(spectrogramBitmap, 0, 0);

  const analysis: AnalysisPayload = state.analysis;
  if ($<HTMLInputElement>("show-candidates").checked) {
    ctx.fillStyle = "rgba(120, 180, 255, 0.35)";
    for (const dot of candidateDots(analysis.contour.time, analysis.candidates, axis)) {
      ctx.fillRect(dot.x - 0.5, dot.y - 0.5, 1.5, 1.5);
    }
  }
  ctx.strokeStyle = "#ff4f81";
  ctx.lineWidth = 1.5;
  for (const line of contourPolylines(analysis.contour, axis)) {
    ctx.beginPath();
    ctx.moveTo(line[0].x, line[0].y);
    for (const p of line.slice(1)) ctx.lineTo(p.x, p.y);
    ctx.stroke();
  }
  if (state.selectedRegion) {
    const x0 = timeToX(axis, state.selectedRegion.t0);
    const x1 = timeToX(axis, state.selectedRegion.t1);
    ctx.fillStyle = "rgba(255, 255, 120, 0.18)";
    ctx.fillRect(x0, 0, x1 - x0, canvas.height);
  }
  if (audio && !audio.paused) {
    const x = timeToX(axis, audio.currentTime);
    ctx.strokeStyle = "#7dff9b";
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, canvas.height);
    ctx.stroke();
  }
}

function render(): void {
  $("status").textContent =
    state.errorMessage ??
    { empty: "drop a WAV file to begin", uploading: "uploading + analyzing...",
      ready: "ready", analyzing: "analyzing...", error: "error" }[state.phase];
  const busy = state.phase === "analyzing" || state.phase === "uploading";
  $<HTMLButtonElement>("reanalyze").disabled = busy || !state.session;
  $<HTMLButtonElement>("reanalyze-region").disabled =
    busy || !state.session || !state.selectedRegion;
  $<HTMLButtonElement>("play-original").disabled = !state.session;
  $<HTMLButtonElement>("play-synth").disabled = !state.session;
  $<HTMLButtonElement>("download").disabled = !state.analysis;
  drawOverlay();
}

function startPlayback(which: "original" | "synth"): void {
  if (!state.session) return;
  stopPlayback();
  const mode = $<HTMLSelectElement>("synth-mode").value as "sine" | "harmonic";
  audio = new Audio(api.audioUrl(state.session.session_id, which, mode));
  void audio.play();
  playheadTimer = window.setInterval(drawOverlay, 40);
  audio.addEventListener("ended", stopPlayback);
}

function stopPlayback(): void {
  if (audio) {
    audio.pause();
    audio = null;
  }
  if (playheadTimer) {
    window.clearInterval(playheadTimer);
    playheadTimer = 0;
  }
  drawOverlay();
}

function downloadContour(): void {
  if (!state.analysis) return;
  const blob = new Blob([contourToTsv(state.analysis.contour)], { type: "text/tab-separated-values" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "contour.tsv";
  link.click();
  URL.revokeObjectURL(link.href);
}

function wireEvents(): void {
  const drop = $("dropzone");
  drop.addEventListener("dragover", (ev) => {
    ev.preventDefault();
    drop.classList.add("hover");
  });
  drop.addEventListener("dragleave", () => drop.classList.remove("hover"));
  drop.addEventListener("drop", (ev) => {
    ev.preventDefault();
    drop.classList.remove("hover");
    const file = ev.dataTransfer?.files?.[0];
    if (file) void uploadFile(file);
  });
  $<HTMLInputElement>("file-input").addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) void uploadFile(file);
  });

  const canvas = $<HTMLCanvasElement>("view");
  canvas.addEventListener("mousedown", (ev) => {
    dragStartX = ev.offsetX;
  });
  canvas.addEventListener("mouseup", (ev) => {
    if (dragStartX === null || !axis) return;
    const a = Math.min(dragStartX, ev.offsetX);
    const b = Math.max(dragStartX, ev.offsetX);
    dragStartX = null;
    if (b - a < 3) {
      dispatch({ type: "select-region", region: null });
      return;
    }
    dispatch({
      type: "select-region",
      region: { t0: xToTime(axis, a), t1: xToTime(axis, b) },
    });
  });

  $("reanalyze").addEventListener("click", () => void runAnalysis(false));
  $("reanalyze-region").addEventListener("click", () => void runAnalysis(true));
  $("play-original").addEventListener("click", () => startPlayback("original"));
  $("play-synth").addEventListener("click", () => startPlayback("synth"));
  $("stop").addEventListener("click", stopPlayback);
  $("download").addEventListener("click", downloadContour);
  $<HTMLInputElement>("show-candidates").addEventListener("change", drawOverlay);
}

wireEvents();
render();
