import { describe, expect, it, vi } from "vitest";

import { ApiClient, ServiceError } from "../src/api.js";

function jsonResponse(status: number, body: unknown, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", ...headers },
  });
}

describe("ApiClient", () => {
  it("posts WAV bytes to create a session", async () => {
    const fetchMock = vi.fn(async (url: string, init?: RequestInit) => {
      expect(url).toBe("/api/sessions");
      expect(init?.method).toBe("POST");
      return jsonResponse(201, { session_id: "abc", n_frames: 3 });
    });
    const client = new ApiClient("", fetchMock);
    const info = await client.createSession(new ArrayBuffer(16));
    expect(info.session_id).toBe("abc");
    expect(fetchMock).toHaveBeenCalledTimes(1);
  });

  it("sends overrides and region in the analyze body", async () => {
    const fetchMock = vi.fn(async (url: string, init?: RequestInit) => {
      expect(url).toBe("/api/sessions/s1/analyze");
      const body = JSON.parse(String(init?.body));
      expect(body.overrides).toEqual({ "twm.p": 0.4 });
      expect(body.region).toEqual({ t0: 0.5, t1: 1.0 });
      return jsonResponse(200, { session_id: "s1" });
    });
    const client = new ApiClient("", fetchMock);
    await client.analyze("s1", { "twm.p": 0.4 }, { t0: 0.5, t1: 1.0 });
  });

  it("omits region when not selected", async () => {
    const fetchMock = vi.fn(async (_url: string, init?: RequestInit) => {
      const body = JSON.parse(String(init?.body));
      expect(body).not.toHaveProperty("region");
      return jsonResponse(200, {});
    });
    await new ApiClient("", fetchMock).analyze("s1", {});
  });

  it("surfaces service detail messages verbatim", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(422, { detail: "unknown config key 'twm.zeta'" }),
    );
    const client = new ApiClient("", fetchMock);
    await expect(client.analyze("s1", { "twm.zeta": 1 })).rejects.toThrowError(
      /unknown config key 'twm.zeta'/,
    );
    await expect(client.analyze("s1", {})).rejects.toBeInstanceOf(ServiceError);
  });

  it("parses spectrogram axis headers", async () => {
    const fetchMock = vi.fn(async (url: string) => {
      expect(url).toBe("/api/sessions/s1/spectrogram?fmin=60&t1=2.5");
      return new Response(new Blob([new Uint8Array([137, 80])]), {
        status: 200,
        headers: {
          "X-Axis-Time-Start": "0.0",
          "X-Axis-Seconds-Per-Pixel": "0.01",
          "X-Axis-Freq-Min-Hz": "60.0",
          "X-Axis-Freq-Max-Hz": "5000.0",
          "X-Axis-Freq-Scale": "log",
        },
      });
    });
    const image = await new ApiClient("", fetchMock).spectrogram("s1", { fmin: 60, t1: 2.5 });
    expect(image.secondsPerPixel).toBe(0.01);
    expect(image.freqMaxHz).toBe(5000);
    expect(image.freqScale).toBe("log");
  });

  it("builds audio URLs for the transport bar", () => {
    const client = new ApiClient("http://host:1");
    expect(client.audioUrl("s9", "synth", "harmonic")).toBe(
      "http://host:1/api/sessions/s9/audio?which=synth&mode=harmonic",
    );
  });
});
