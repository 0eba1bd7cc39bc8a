"""Deterministic synthetic test signals.

Everything the test-bench needs that a real corpus would normally provide:
harmonic tones, vibrato "voices", sparse drones, noise, equal-RMS mixtures,
and a labeled corpus generator for training the voice detector at desk scale.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import AudioClip
from .spectral import FramePeaks
from .synth import write_wav


def harmonic_amplitudes(n_partials: int, profile: str = "1/n") -> np.ndarray:
    if profile == "1/n":
        return 1.0 / np.arange(1, n_partials + 1)
    if profile == "equal":
        return np.ones(n_partials)
    raise ValueError(f"unknown amplitude profile {profile!r}")


def harmonic_frame_peaks(
    f0: float,
    n_partials: int,
    amplitudes: np.ndarray | None = None,
    start_time: float = 0.0,
) -> FramePeaks:
    """Ideal noiseless peak list for a harmonic series (no audio involved)."""
    if amplitudes is None:
        amplitudes = harmonic_amplitudes(n_partials)
    freqs = f0 * np.arange(1, n_partials + 1)
    return FramePeaks(
        frame_index=0,
        start_time=start_time,
        frequencies=freqs.astype(float),
        amplitudes=np.asarray(amplitudes, dtype=float),
        sinusoidality=np.ones(n_partials),
    )


def merge_frame_peaks(a: FramePeaks, b: FramePeaks) -> FramePeaks:
    """Union of two peak lists, sorted by frequency."""
    freqs = np.concatenate([a.frequencies, b.frequencies])
    amps = np.concatenate([a.amplitudes, b.amplitudes])
    sin = np.concatenate([a.sinusoidality, b.sinusoidality])
    order = np.argsort(freqs, kind="stable")
    return FramePeaks(a.frame_index, a.start_time, freqs[order], amps[order], sin[order])


def render_harmonic(
    f_inst: np.ndarray,
    sample_rate: int,
    n_partials: int,
    amplitudes: np.ndarray | None = None,
    peak: float = 0.5,
) -> np.ndarray:
    """Phase-coherent harmonic stack following an instantaneous F0 track.

    Partials above Nyquist are muted per sample.  `peak` scales the result so
    the worst-case sample magnitude equals it.
    """
    if amplitudes is None:
        amplitudes = harmonic_amplitudes(n_partials)
    phase = 2.0 * np.pi * np.cumsum(f_inst) / sample_rate
    nyquist = sample_rate / 2.0
    out = np.zeros(len(f_inst))
    for k in range(1, n_partials + 1):
        audible = k * f_inst < nyquist
        out += amplitudes[k - 1] * audible * np.sin(k * phase)
    return out * (peak / np.sum(np.abs(amplitudes)))


def vibrato_track(
    f0: float,
    depth_cents: float,
    rate_hz: float,
    duration: float,
    sample_rate: int,
    phase: float = 0.0,
) -> np.ndarray:
    """Instantaneous F0 of a sinusoidally modulated tone, per sample."""
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    return f0 * 2.0 ** (depth_cents / 1200.0 * np.sin(2.0 * np.pi * rate_hz * t + phase))


def steady_track(f0: float, duration: float, sample_rate: int) -> np.ndarray:
    return np.full(int(round(duration * sample_rate)), float(f0))


def mix_equal_rms(primary: np.ndarray, secondary: np.ndarray) -> np.ndarray:
    """primary + secondary rescaled to the primary's RMS, then normalized to
    peak 0.9 so the mix never clips."""
    n = min(len(primary), len(secondary))
    a, b = primary[:n], secondary[:n]
    rms_a = np.sqrt(np.mean(a**2))
    rms_b = np.sqrt(np.mean(b**2))
    if rms_b > 0 and rms_a > 0:
        b = b * (rms_a / rms_b)
    mix = a + b
    top = np.abs(mix).max()
    if top > 0.9:
        mix = mix * (0.9 / top)
    return mix


@dataclass(frozen=True)
class CorpusSegment:
    name: str
    clip: AudioClip
    vocal: bool


def make_svd_corpus(
    seed: int,
    n_per_class: int = 8,
    duration: float = 1.5,
    sample_rate: int = 22050,
) -> list[CorpusSegment]:
    """Labeled segments for training/testing the singing-voice detector.

    `vocal` segments are vibrato harmonic tones over an equal-level drone;
    non-vocal segments rotate through steady tone + drone, drone alone, and
    noise, so the energy feature alone cannot separate the classes.
    """
    rng = np.random.default_rng(seed)
    segments: list[CorpusSegment] = []
    for i in range(n_per_class):
        voice_f0 = rng.uniform(170.0, 380.0)
        depth = rng.uniform(30.0, 80.0)
        rate = rng.uniform(4.5, 6.5)
        partials = int(rng.integers(8, 12))
        drone_f0 = rng.uniform(80.0, 160.0)
        voice = render_harmonic(
            vibrato_track(voice_f0, depth, rate, duration, sample_rate, rng.uniform(0, 2 * np.pi)),
            sample_rate,
            partials,
        )
        drone = render_harmonic(
            steady_track(drone_f0, duration, sample_rate), sample_rate, 3,
            amplitudes=harmonic_amplitudes(3, "equal"),
        )
        segments.append(
            CorpusSegment(
                name=f"vocal_{i:02d}",
                clip=AudioClip(mix_equal_rms(voice, drone), sample_rate),
                vocal=True,
            )
        )
    for i in range(n_per_class):
        kind = i % 3
        drone_f0 = rng.uniform(80.0, 160.0)
        drone = render_harmonic(
            steady_track(drone_f0, duration, sample_rate), sample_rate, 3,
            amplitudes=harmonic_amplitudes(3, "equal"),
        )
        if kind == 0:
            tone_f0 = rng.uniform(170.0, 380.0)
            tone = render_harmonic(
                steady_track(tone_f0, duration, sample_rate),
                sample_rate,
                int(rng.integers(4, 7)),
            )
            samples = mix_equal_rms(tone, drone)
        elif kind == 1:
            noise = rng.normal(0.0, 0.05, len(drone))
            samples = np.clip(drone + noise, -1, 1)
        else:
            samples = rng.normal(0.0, 0.15, int(round(duration * sample_rate)))
            samples = np.clip(samples, -1, 1)
        segments.append(
            CorpusSegment(
                name=f"nonvocal_{i:02d}",
                clip=AudioClip(samples, sample_rate),
                vocal=False,
            )
        )
    return segments


def write_corpus(directory, segments: list[CorpusSegment]) -> None:
    """Write segment WAVs plus a labels.tsv manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for seg in segments:
        filename = f"{seg.name}.wav"
        write_wav(seg.clip, directory / filename)
        lines.append(f"{filename}\t{'vocal' if seg.vocal else 'nonvocal'}")
    (directory / "labels.tsv").write_text("\n".join(lines) + "\n")


def read_corpus(directory) -> list[CorpusSegment]:
    """Load a corpus written by write_corpus (or hand-assembled to match)."""
    from .audio_io import load_wav

    directory = Path(directory)
    manifest = directory / "labels.tsv"
    if not manifest.exists():
        raise FileNotFoundError(f"no labels.tsv in {directory}")
    segments = []
    for line in manifest.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        filename, label = line.split("\t")
        if label not in ("vocal", "nonvocal"):
            raise ValueError(f"unknown label {label!r} in {manifest}")
        segments.append(
            CorpusSegment(
                name=Path(filename).stem,
                clip=load_wav(directory / filename),
                vocal=label == "vocal",
            )
        )
    return segments
