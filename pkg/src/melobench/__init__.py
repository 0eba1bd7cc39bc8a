"""Melody extraction workbench: sinusoid extraction, two-way-mismatch F0
salience, dynamic-programming contour tracking, singing-voice detection,
contour resynthesis, and an interactive tuning service."""

from .audio_io import AudioClip, Frame, apply_window, frame_signal, load_wav
from .config import AnalysisConfig, apply_overrides, parse_config, render_config
from .metrics import MelodyMetrics, evaluate, read_contour, write_contour
from .pipeline import AnalysisResult, analyze
from .spectral import FramePeaks, SpectralPeak, Spectrum, compute_spectrum, detect_sinusoids
from .synth import synthesize_contour, write_wav
from .tracking import (
    PitchContour,
    TrackingParams,
    select_voice_contour,
    smoothness_cost,
    track_dual,
    track_single,
)
from .twm import F0Candidate, TwmParams, generate_trial_grid, multi_f0, twm_error
from .voicing import (
    GmmModel,
    classify_frames,
    harmonic_energy,
    pitch_instability,
    train_gmm,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AnalysisResult",
    "AudioClip",
    "F0Candidate",
    "Frame",
    "FramePeaks",
    "GmmModel",
    "MelodyMetrics",
    "PitchContour",
    "SpectralPeak",
    "Spectrum",
    "TrackingParams",
    "TwmParams",
    "analyze",
    "apply_overrides",
    "apply_window",
    "classify_frames",
    "compute_spectrum",
    "detect_sinusoids",
    "evaluate",
    "frame_signal",
    "generate_trial_grid",
    "harmonic_energy",
    "load_wav",
    "multi_f0",
    "parse_config",
    "pitch_instability",
    "read_contour",
    "render_config",
    "select_voice_contour",
    "smoothness_cost",
    "synthesize_contour",
    "track_dual",
    "track_single",
    "train_gmm",
    "twm_error",
    "write_contour",
    "write_wav",
]
