"""Audition synthesis: render a pitch contour back into audio.

A phase-continuous oscillator follows the contour with linear frequency
interpolation between voiced frames; unvoiced spans are silent, with short
raised-cosine fades at the boundaries so auditioning has no clicks.
"""
from __future__ import annotations

import io
import wave

import numpy as np

from .audio_io import AudioClip
from .tracking import PitchContour

FADE_SECONDS = 0.005

_HARMONIC_PARTIALS = 5
_HARMONIC_NORM = sum(1.0 / n for n in range(1, _HARMONIC_PARTIALS + 1))


def _voiced_runs(voiced: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [start, stop) index ranges of consecutive voiced frames."""
    runs = []
    start = None
    for i, v in enumerate(voiced):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(voiced)))
    return runs


def synthesize_contour(
    contour: PitchContour,
    sample_rate: int,
    mode: str = "sine",
    amplitude: float = 0.8,
) -> AudioClip:
    """Render the contour as audio covering its full time span.

    mode "sine" emits a pure tone; "harmonic" stacks partials 1..5 at
    amplitudes 1/n (band-limited below Nyquist), normalized so the output
    peak stays within `amplitude`.
    """
    if sample_rate < 8000:
        raise ValueError("sample_rate must be >= 8000")
    if mode not in ("sine", "harmonic"):
        raise ValueError(f"unknown synthesis mode {mode!r}")
    if not 0.0 <= amplitude <= 1.0:
        raise ValueError("amplitude must be in [0, 1]")

    n_frames = len(contour)
    if n_frames == 0:
        return AudioClip(samples=np.zeros(0), sample_rate=sample_rate)
    if n_frames > 1:
        hop = float(np.median(np.diff(contour.times)))
    else:
        hop = 0.01
    duration = float(contour.times[-1]) + hop
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate

    freq = np.zeros(n)
    env = np.zeros(n)
    fade_len = int(round(FADE_SECONDS * sample_rate))
    for start, stop in _voiced_runs(contour.voiced):
        s0 = int(round(contour.times[start] * sample_rate))
        s1 = min(int(round((contour.times[stop - 1] + hop) * sample_rate)), n)
        if s1 <= s0:
            continue
        span_t = t[s0:s1]
        freq[s0:s1] = np.interp(
            span_t, contour.times[start:stop], contour.f0[start:stop]
        )
        span_env = np.ones(s1 - s0)
        fl = min(fade_len, (s1 - s0) // 2)
        if fl > 0:
            ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(fl) / fl))
            span_env[:fl] = ramp
            span_env[-fl:] = ramp[::-1]
        env[s0:s1] = span_env

    phase = 2.0 * np.pi * np.cumsum(freq) / sample_rate
    if mode == "sine":
        tone = np.sin(phase)
    else:
        tone = np.zeros(n)
        nyquist = sample_rate / 2.0
        for k in range(1, _HARMONIC_PARTIALS + 1):
            audible = k * freq < nyquist
            tone += (audible / k) * np.sin(k * phase)
        tone /= _HARMONIC_NORM
    samples = np.clip(amplitude * env * tone, -1.0, 1.0)
    return AudioClip(samples=samples, sample_rate=sample_rate)


def encode_wav(clip: AudioClip) -> bytes:
    """Encode a clip as 16-bit PCM little-endian RIFF bytes."""
    ints = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(clip.sample_rate)
        w.writeframes(ints.tobytes())
    return buf.getvalue()


def write_wav(clip: AudioClip, path) -> None:
    """Write the clip to disk as 16-bit PCM WAV."""
    with open(path, "wb") as fh:
        fh.write(encode_wav(clip))
