// End-to-end workflow against a live analysis service: upload, overlay
// geometry, parameter change, region re-analysis with the outside-frames
// invariant, and synthesized playback bytes. Spawns the real server.
import { spawn, type ChildProcess } from "node:child_process";
import { existsSync } from "node:fs";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, type SessionInfo } from "../src/api.js";
import type { AxisMapping } from "../src/axis.js";
import { contourPolylines, framesOutsideRegionUnchanged } from "../src/overlay.js";
import { stagedOverrides } from "../src/params.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const DIST = join(__dirname, "..", "dist");

let server: ChildProcess | null = null;
const client = new ApiClient(BASE);

function makeWav(durationS = 1.0, sampleRate = 22050): ArrayBuffer {
  // vibrato tone with three partials, enough for a confident contour
  const n = Math.round(durationS * sampleRate);
  const pcm = new Int16Array(n);
  let phase = 0;
  for (let i = 0; i < n; i++) {
    const t = i / sampleRate;
    const f = 220 * Math.pow(2, (40 / 1200) * Math.sin(2 * Math.PI * 5 * t));
    phase += (2 * Math.PI * f) / sampleRate;
    const sample =
      0.5 * Math.sin(phase) + 0.25 * Math.sin(2 * phase) + 0.17 * Math.sin(3 * phase);
    pcm[i] = Math.max(-32768, Math.min(32767, Math.round(sample * 20000)));
  }
  const bytes = new ArrayBuffer(44 + pcm.byteLength);
  const view = new DataView(bytes);
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  ascii(0, "RIFF");
  view.setUint32(4, 36 + pcm.byteLength, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true);
  view.setUint16(22, 1, true);
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  ascii(36, "data");
  view.setUint32(40, pcm.byteLength, true);
  new Uint8Array(bytes, 44).set(new Uint8Array(pcm.buffer));
  return bytes;
}

async function waitForServer(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("analysis service did not come up");
}

beforeAll(async () => {
  const args = ["-m", "melobench.cli", "serve", "--port", String(PORT)];
  if (existsSync(join(DIST, "index.html"))) {
    args.push("--ui-dir", DIST);
  }
  server = spawn("python3", args, { stdio: "ignore" });
  await waitForServer();
}, 40000);

afterAll(() => {
  server?.kill();
});

describe("live service round trip", () => {
  let session: SessionInfo;

  it("uploads a WAV and receives a contour", async () => {
    session = await client.createSession(makeWav());
    expect(session.n_frames).toBeGreaterThan(50);
    expect(session.contour.f0.length).toBe(session.n_frames);
    const voiced = session.contour.f0.filter((f) => f > 0);
    expect(voiced.length / session.n_frames).toBeGreaterThan(0.9);
    // the tone is around 220 Hz; the service must have found it
    const median = voiced.sort((a, b) => a - b)[Math.floor(voiced.length / 2)];
    expect(median).toBeGreaterThan(200);
    expect(median).toBeLessThan(240);
  }, 30000);

  it("renders the overlay from live spectrogram geometry", async () => {
    const image = await client.spectrogram(session.session_id);
    expect(image.blob.size).toBeGreaterThan(100);
    const axis: AxisMapping = {
      timeStart: image.timeStart,
      secondsPerPixel: image.secondsPerPixel,
      freqMinHz: image.freqMinHz,
      freqMaxHz: image.freqMaxHz,
      width: session.n_frames,
      height: 512,
    };
    const lines = contourPolylines(session.contour, axis);
    expect(lines.length).toBeGreaterThan(0);
    const points = lines.flat();
    // 1 px per frame: every voiced frame lands inside the image width
    for (const p of points) {
      expect(p.x).toBeGreaterThanOrEqual(-1);
      expect(p.x).toBeLessThanOrEqual(session.n_frames + 1);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(512);
    }
  }, 30000);

  it("applies a staged parameter change on re-analysis", async () => {
    const overrides = stagedOverrides(
      session.config,
      new Map([["tracking.smoothness_weight", 0.8]]),
    );
    expect(overrides).toEqual({ "tracking.smoothness_weight": 0.8 });
    const result = await client.analyze(session.session_id, overrides);
    expect(result.config["tracking.smoothness_weight"]).toBe(0.8);
    expect(result.contour.f0.length).toBe(session.n_frames);
  }, 30000);

  it("region re-analysis leaves outside frames bit-identical", async () => {
    const before = await client.analyze(session.session_id, {});
    const after = await client.analyze(
      session.session_id,
      { "tracking.smoothness_weight": 0.1 },
      { t0: 0.3, t1: 0.6 },
    );
    expect(framesOutsideRegionUnchanged(before, after, 0.3, 0.6)).toBe(true);
  }, 30000);

  it("rejects an unknown config key with the valid-key list", async () => {
    await expect(client.analyze(session.session_id, { "twm.zeta": 1 })).rejects.toThrowError(
      /twm\.p/,
    );
  }, 30000);

  it("plays back synthesized audio for the current contour", async () => {
    const blob = await client.fetchAudio(session.session_id, "synth", "harmonic");
    const head = new Uint8Array(await blob.slice(0, 12).arrayBuffer());
    expect(String.fromCharCode(...head.slice(0, 4))).toBe("RIFF");
    expect(String.fromCharCode(...head.slice(8, 12))).toBe("WAVE");
    expect(blob.size).toBeGreaterThan(10000);
    const original = await client.fetchAudio(session.session_id, "original");
    expect(original.size).toBeGreaterThan(10000);
  }, 30000);

  it("serves the built UI at the root when available", async () => {
    const resp = await fetch(`${BASE}/`);
    expect(resp.status).toBe(200);
    const text = await resp.text();
    if (existsSync(join(DIST, "index.html"))) {
      expect(text).toContain("melobench tuner");
      const js = await fetch(`${BASE}/js/main.js`);
      expect(js.status).toBe(200);
    } else {
      expect(text).toContain("melobench");
    }
  }, 30000);
});
