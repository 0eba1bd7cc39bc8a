// Typed client for the analysis service. Every number the UI displays comes
// out of these responses; the client itself never computes pitch.

export interface ContourData {
  time: number[];
  f0: number[]; // 0 = unvoiced
  salience: number[];
}

export interface Candidate {
  f0: number;
  twm_error: number;
  salience: number;
}

export interface AnalysisPayload {
  session_id: string;
  contour: ContourData;
  labels: boolean[];
  candidates: Candidate[][];
  config: Record<string, number | string | boolean>;
}

export interface SessionInfo extends AnalysisPayload {
  duration_s: number;
  sample_rate: number;
  n_frames: number;
  default_config: Record<string, number | string | boolean>;
}

export interface Region {
  t0: number;
  t1: number;
}

export interface SpectrogramImage {
  blob: Blob;
  timeStart: number;
  secondsPerPixel: number;
  freqMinHz: number;
  freqMaxHz: number;
  freqScale: string;
}

export class ServiceError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function failFrom(resp: Response): Promise<never> {
  let detail = `${resp.status} ${resp.statusText}`;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ServiceError(resp.status, detail);
}

export class ApiClient {
  private readonly base: string;
  private readonly doFetch: FetchLike;

  constructor(base = "", fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.doFetch = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  async createSession(wav: ArrayBuffer | Blob): Promise<SessionInfo> {
    const resp = await this.doFetch(`${this.base}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "audio/wav" },
      body: wav,
    });
    if (resp.status !== 201) return failFrom(resp);
    return (await resp.json()) as SessionInfo;
  }

  async analyze(
    sessionId: string,
    overrides: Record<string, number | string | boolean> = {},
    region?: Region,
  ): Promise<AnalysisPayload> {
    const resp = await this.doFetch(`${this.base}/api/sessions/${sessionId}/analyze`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(region ? { overrides, region } : { overrides }),
    });
    if (!resp.ok) return failFrom(resp);
    return (await resp.json()) as AnalysisPayload;
  }

  async spectrogram(
    sessionId: string,
    opts: { fmin?: number; fmax?: number; t0?: number; t1?: number } = {},
  ): Promise<SpectrogramImage> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(opts)) {
      if (value !== undefined) query.set(key, String(value));
    }
    const suffix = query.size ? `?${query.toString()}` : "";
    const resp = await this.doFetch(
      `${this.base}/api/sessions/${sessionId}/spectrogram${suffix}`,
    );
    if (!resp.ok) return failFrom(resp);
    return {
      blob: await resp.blob(),
      timeStart: Number(resp.headers.get("X-Axis-Time-Start")),
      secondsPerPixel: Number(resp.headers.get("X-Axis-Seconds-Per-Pixel")),
      freqMinHz: Number(resp.headers.get("X-Axis-Freq-Min-Hz")),
      freqMaxHz: Number(resp.headers.get("X-Axis-Freq-Max-Hz")),
      freqScale: resp.headers.get("X-Axis-Freq-Scale") ?? "log",
    };
  }

  audioUrl(sessionId: string, which: "original" | "synth", mode: "sine" | "harmonic" = "sine"): string {
    return `${this.base}/api/sessions/${sessionId}/audio?which=${which}&mode=${mode}`;
  }

  async fetchAudio(
    sessionId: string,
    which: "original" | "synth",
    mode: "sine" | "harmonic" = "sine",
  ): Promise<Blob> {
    const resp = await this.doFetch(this.audioUrl(sessionId, which, mode));
    if (!resp.ok) return failFrom(resp);
    return resp.blob();
  }
}
