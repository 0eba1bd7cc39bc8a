"""End-to-end analysis: frames -> sinusoids -> F0 candidates -> contour ->
voicing labels, with per-frame diagnostics for the interactive UI."""
from __future__ import annotations

import importlib.resources
import json
from dataclasses import dataclass

import numpy as np

from . import voicing as voicing_mod
from .audio_io import AudioClip, apply_window, frame_signal
from .config import AnalysisConfig
from .spectral import FramePeaks, compute_spectrum, detect_sinusoids
from .tracking import (
    LatticeFrame,
    PitchContour,
    select_voice_contour,
    track_dual,
    track_single,
)
from .twm import F0Candidate, multi_f0
from .voicing import GmmModel, classify_frames, contour_features, parse_svd_model


class PipelineError(RuntimeError):
    """Failure inside one pipeline stage, with stage attribution."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


@dataclass
class Diagnostics:
    candidates: list[list[F0Candidate]]
    features: np.ndarray | None
    peak_counts: np.ndarray
    alternate_contour: PitchContour | None = None


@dataclass
class AnalysisResult:
    contour: PitchContour
    labels: np.ndarray
    diagnostics: Diagnostics | None


def load_default_svd_model() -> tuple[GmmModel, GmmModel, list[str]]:
    doc = json.loads(
        importlib.resources.files("melobench").joinpath("data/default_svd_model.json").read_text()
    )
    return parse_svd_model(doc)


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(name, str(exc)) from exc
            return False

    return _Ctx()


def extract_frame_peaks(clip: AudioClip, config: AnalysisConfig) -> list[FramePeaks]:
    """Stages one and two: windowed spectra and sinusoid lists per frame."""
    with _stage("framing"):
        frames = frame_signal(clip, config.window_seconds, config.hop_seconds)
    peaks = []
    with _stage("spectral"):
        for frame in frames:
            spectrum = compute_spectrum(
                apply_window(frame, config.window_kind),
                clip.sample_rate,
                config.zero_pad_factor,
            )
            peaks.append(
                detect_sinusoids(
                    spectrum,
                    window_kind=config.window_kind,
                    sinusoidality_threshold=config.sinusoidality_threshold,
                    noise_floor_db=config.noise_floor_db,
                    max_freq_hz=config.max_peak_freq_hz,
                )
            )
    return peaks


def analyze_frames(
    peaks_per_frame: list[FramePeaks],
    config: AnalysisConfig,
    lean: bool = False,
) -> AnalysisResult:
    """Candidate extraction, tracking, and voicing over precomputed peaks."""
    config.validate()
    with _stage("multi_f0"):
        candidates = [multi_f0(p, config.twm, config.top_candidates) for p in peaks_per_frame]
        lattice = [
            LatticeFrame.from_candidates(p.start_time, c)
            for p, c in zip(peaks_per_frame, candidates)
        ]

    alternate = None
    with _stage("tracking"):
        if config.tracking_mode == "single":
            contour = track_single(lattice, config.tracking)
        else:
            low, high = track_dual(lattice, config.tracking)
            feats = []
            for c in (low, high):
                f = contour_features(
                    peaks_per_frame, c, config.voicing.band_hz,
                    config.voicing.instability_half_window,
                )
                voiced = c.voiced
                feats.append(
                    (float(f[voiced, 0].mean()), float(f[voiced, 1].mean()))
                    if voiced.any()
                    else (0.0, 0.0)
                )
            contour = select_voice_contour(low, high, feats[0], feats[1])
            alternate = high if contour is low else low

    features = None
    if config.voicing.enabled or not lean:
        with _stage("voicing"):
            features = contour_features(
                peaks_per_frame,
                contour,
                config.voicing.band_hz,
                config.voicing.instability_half_window,
            )

    if config.voicing.enabled:
        with _stage("voicing"):
            if config.voicing.model_path:
                vocal, nonvocal, _ = voicing_mod.load_svd_model(config.voicing.model_path)
            else:
                vocal, nonvocal, _ = load_default_svd_model()
            labels = classify_frames(
                features, vocal, nonvocal, config.voicing.smooth_frames, config.voicing.bias
            )
            if len(labels):
                masked_f0 = np.where(labels, contour.f0, 0.0)
                masked_sal = np.where(labels, contour.salience, 0.0)
                contour = PitchContour(contour.times, masked_f0, masked_sal)
    else:
        labels = contour.voiced.copy()

    diagnostics = None
    if not lean:
        diagnostics = Diagnostics(
            candidates=candidates,
            features=features,
            peak_counts=np.array([len(p) for p in peaks_per_frame]),
            alternate_contour=alternate,
        )
    return AnalysisResult(contour=contour, labels=labels, diagnostics=diagnostics)


def analyze(clip: AudioClip, config: AnalysisConfig, lean: bool = False) -> AnalysisResult:
    """Run the full pipeline over one clip."""
    config.validate()
    peaks = extract_frame_peaks(clip, config)
    return analyze_frames(peaks, config, lean=lean)


def analyze_region(
    clip: AudioClip,
    config: AnalysisConfig,
    first_frame: int,
    n_frames: int,
    lean: bool = False,
) -> AnalysisResult:
    """Re-analyze a span of frames using the exact same frame positions the
    full-clip analysis would use, so results can be spliced in place."""
    config.validate()
    hop = int(round(config.hop_seconds * clip.sample_rate))
    width = int(round(config.window_seconds * clip.sample_rate))
    start_sample = first_frame * hop
    stop_sample = min((first_frame + n_frames - 1) * hop + width, len(clip.samples))
    sub = AudioClip(clip.samples[start_sample:stop_sample], clip.sample_rate)
    peaks = extract_frame_peaks(sub, config)[:n_frames]
    shifted = [
        FramePeaks(
            frame_index=p.frame_index + first_frame,
            start_time=(p.frame_index + first_frame) * config.hop_seconds,
            frequencies=p.frequencies,
            amplitudes=p.amplitudes,
            sinusoidality=p.sinusoidality,
        )
        for p in peaks
    ]
    return analyze_frames(shifted, config, lean=lean)
