"""Local HTTP service for the interactive tuning UI.

Sessions hold an uploaded clip, its current configuration, and the latest
analysis.  Re-analysis accepts flat config-key overrides and an optional time
region; region results are spliced into the stored contour so frames outside
the region never change.
"""
from __future__ import annotations

import io
import math
import secrets
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel

from .audio_io import AudioClip, AudioError, apply_window, decode_wav, frame_signal
from .config import AnalysisConfig, InvalidConfigKeyError, apply_overrides, config_to_flat_dict
from .pipeline import AnalysisResult, analyze, analyze_region
from .spectral import compute_spectrum
from .synth import encode_wav, synthesize_contour
from .tracking import PitchContour

SPECTROGRAM_HEIGHT = 512
SPECTROGRAM_DB_RANGE = 100.0

# config keys that change the frame grid and are therefore rejected for
# region-scoped re-analysis (results could not be spliced frame-for-frame)
_GRID_KEYS = {"window_seconds", "hop_seconds"}


@dataclass
class Session:
    id: str
    clip: AudioClip
    config: AnalysisConfig
    result: AnalysisResult
    created: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class Region(BaseModel):
    t0: float
    t1: float


class AnalyzeRequest(BaseModel):
    overrides: dict = {}
    region: Region | None = None


def _candidate_payload(result: AnalysisResult) -> list:
    if result.diagnostics is None:
        return []
    return [
        [{"f0": c.f0, "twm_error": c.twm_error, "salience": c.salience} for c in frame]
        for frame in result.diagnostics.candidates
    ]


def _result_payload(session: Session) -> dict:
    contour = session.result.contour
    return {
        "session_id": session.id,
        "contour": {
            "time": contour.times.tolist(),
            "f0": contour.f0.tolist(),
            "salience": contour.salience.tolist(),
        },
        "labels": [bool(v) for v in session.result.labels],
        "candidates": _candidate_payload(session.result),
        "config": _jsonable_config(session.config),
    }


def _jsonable_config(config: AnalysisConfig) -> dict:
    return {
        k: (bool(v) if isinstance(v, (bool, np.bool_)) else v)
        for k, v in config_to_flat_dict(config).items()
    }


def _splice(session: Session, region_result: AnalysisResult, first: int, count: int) -> None:
    old = session.result
    f0 = old.contour.f0.copy()
    sal = old.contour.salience.copy()
    labels = old.labels.copy()
    f0[first : first + count] = region_result.contour.f0[:count]
    sal[first : first + count] = region_result.contour.salience[:count]
    labels[first : first + count] = region_result.labels[:count]
    diagnostics = old.diagnostics
    if diagnostics is not None and region_result.diagnostics is not None:
        diagnostics.candidates[first : first + count] = region_result.diagnostics.candidates[:count]
        if diagnostics.features is not None and region_result.diagnostics.features is not None:
            diagnostics.features[first : first + count] = region_result.diagnostics.features[:count]
        diagnostics.peak_counts[first : first + count] = region_result.diagnostics.peak_counts[:count]
    session.result = AnalysisResult(
        contour=PitchContour(old.contour.times, f0, sal),
        labels=labels,
        diagnostics=diagnostics,
    )


def create_app(
    max_upload_mb: int = 50, session_cap: int = 16, ui_dir: str | None = None
) -> FastAPI:
    app = FastAPI(title="melobench service")
    sessions: OrderedDict[str, Session] = OrderedDict()
    store_lock = threading.Lock()
    max_bytes = max_upload_mb * 1024 * 1024

    def _get_session(session_id: str) -> Session:
        with store_lock:
            session = sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            sessions.move_to_end(session_id)
            return session

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        if len(body) > max_bytes:
            raise HTTPException(status_code=413, detail=f"upload exceeds {max_upload_mb} MB")
        try:
            clip = decode_wav(body)
        except AudioError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        config = AnalysisConfig()
        result = await run_in_threadpool(analyze, clip, config)
        session = Session(
            id=secrets.token_hex(8),
            clip=clip,
            config=config,
            result=result,
            created=time.time(),
        )
        with store_lock:
            while len(sessions) >= session_cap:
                sessions.popitem(last=False)
            sessions[session.id] = session
        return {
            "session_id": session.id,
            "duration_s": clip.duration,
            "sample_rate": clip.sample_rate,
            "n_frames": len(result.contour),
            "default_config": _jsonable_config(config),
            **_result_payload(session),
        }

    @app.post("/api/sessions/{session_id}/analyze")
    async def reanalyze(session_id: str, req: AnalyzeRequest):
        session = _get_session(session_id)

        def run() -> dict:
            with session.lock:
                try:
                    config = apply_overrides(session.config, req.overrides)
                except InvalidConfigKeyError as exc:
                    raise HTTPException(status_code=422, detail=str(exc)) from exc
                except ValueError as exc:
                    raise HTTPException(status_code=422, detail=str(exc)) from exc

                if req.region is None:
                    session.result = analyze(session.clip, config)
                    session.config = config
                    return _result_payload(session)

                if any(k in _GRID_KEYS for k in req.overrides):
                    raise HTTPException(
                        status_code=422,
                        detail="window_seconds/hop_seconds cannot change during a region re-analysis",
                    )
                t0, t1 = req.region.t0, req.region.t1
                if not (0.0 <= t0 < t1 <= session.clip.duration + 1e-9):
                    raise HTTPException(
                        status_code=422, detail=f"invalid region [{t0}, {t1}]"
                    )
                times = session.result.contour.times
                inside = np.nonzero((times >= t0 - 1e-9) & (times < t1 - 1e-9))[0]
                if len(inside) == 0:
                    raise HTTPException(status_code=422, detail="region covers no frames")
                first, count = int(inside[0]), len(inside)
                region_result = analyze_region(session.clip, config, first, count)
                _splice(session, region_result, first, count)
                session.config = config
                return _result_payload(session)

        return await run_in_threadpool(run)

    @app.get("/api/sessions/{session_id}/spectrogram")
    async def spectrogram(
        session_id: str,
        fmin: float = 55.0,
        fmax: float = 5000.0,
        t0: float = 0.0,
        t1: float | None = None,
    ):
        session = _get_session(session_id)
        if t1 is None:
            t1 = session.clip.duration
        nyquist = session.clip.sample_rate / 2.0
        if not (0.0 < fmin < fmax <= nyquist):
            raise HTTPException(status_code=422, detail=f"invalid band [{fmin}, {fmax}]")
        if not (0.0 <= t0 < t1 <= session.clip.duration + 1e-9):
            raise HTTPException(status_code=422, detail=f"invalid range [{t0}, {t1}]")

        def render() -> Response:
            config = session.config
            frames = frame_signal(session.clip, config.window_seconds, config.hop_seconds)
            frames = [f for f in frames if t0 - 1e-9 <= f.start_time < t1 - 1e-9]
            if not frames:
                raise HTTPException(status_code=422, detail="range covers no frames")
            columns = []
            for frame in frames:
                spectrum = compute_spectrum(
                    apply_window(frame, config.window_kind),
                    session.clip.sample_rate,
                    config.zero_pad_factor,
                )
                mags = spectrum.magnitudes
                rows = np.geomspace(fmin, fmax, SPECTROGRAM_HEIGHT)
                bins = np.clip(np.round(rows / spectrum.bin_hz).astype(int), 0, len(mags) - 1)
                columns.append(mags[bins])
            image = np.stack(columns, axis=1)[::-1, :]  # low freq at the bottom
            db = 20.0 * np.log10(image + 1e-30)
            top = db.max()
            if not math.isfinite(top) or top < -200.0:
                top = 0.0
            level = np.clip((db - (top - SPECTROGRAM_DB_RANGE)) / SPECTROGRAM_DB_RANGE, 0.0, 1.0)
            from PIL import Image

            png = io.BytesIO()
            Image.fromarray((level * 255.0).astype(np.uint8), mode="L").save(png, format="PNG")
            headers = {
                "X-Axis-Time-Start": repr(frames[0].start_time),
                "X-Axis-Seconds-Per-Pixel": repr(session.config.hop_seconds),
                "X-Axis-Freq-Min-Hz": repr(fmin),
                "X-Axis-Freq-Max-Hz": repr(fmax),
                "X-Axis-Freq-Scale": "log",
            }
            return Response(content=png.getvalue(), media_type="image/png", headers=headers)

        return await run_in_threadpool(render)

    @app.get("/api/sessions/{session_id}/audio")
    async def audio(session_id: str, which: str = "original", mode: str = "sine"):
        session = _get_session(session_id)
        if which not in ("original", "synth"):
            raise HTTPException(status_code=422, detail=f"unknown audio source {which!r}")
        if mode not in ("sine", "harmonic"):
            raise HTTPException(status_code=422, detail=f"unknown synthesis mode {mode!r}")

        def render() -> Response:
            if which == "original":
                wav = encode_wav(session.clip)
            else:
                clip = synthesize_contour(
                    session.result.contour, session.clip.sample_rate, mode=mode
                )
                wav = encode_wav(clip)
            return Response(content=wav, media_type="audio/wav")

        return await run_in_threadpool(render)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/")
        async def index():
            return Response(
                content="<html><body><h1>melobench service</h1>"
                "<p>No UI build found; the JSON API is under /api/.</p></body></html>",
                media_type="text/html",
            )

    return app
