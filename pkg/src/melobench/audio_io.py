"""WAV ingestion, mono mixdown, and analysis-frame segmentation."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class AudioError(Exception):
    """Base class for audio ingestion problems."""


class UnreadableFileError(AudioError):
    """File is missing, truncated, or not a RIFF/WAVE container."""


class UnsupportedEncodingError(AudioError):
    """WAV encoding other than PCM 16/24-bit or IEEE float 32-bit."""


class EmptyAudioError(AudioError):
    """The file decodes to zero samples."""


@dataclass(frozen=True)
class AudioClip:
    """Mono audio: float samples in [-1, 1] plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(
            self, "samples", np.asarray(self.samples, dtype=np.float64).reshape(-1)
        )
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class Frame:
    """One analysis frame: a fixed-length slice starting at index * hop."""

    index: int
    start_time: float
    samples: np.ndarray


def load_wav(path) -> AudioClip:
    """Read a RIFF/WAVE file into a mono AudioClip.

    Supports PCM 16-bit, PCM 24-bit and IEEE float 32-bit encodings.
    Multi-channel audio is mixed down by the per-sample arithmetic mean;
    integer samples are scaled by 1 / 2**(bits - 1) and the result is
    clamped to [-1, 1].
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UnreadableFileError(f"cannot read {path}: {exc}") from exc
    return decode_wav(data)


def decode_wav(data: bytes) -> AudioClip:
    """Decode in-memory WAV bytes; see load_wav for the supported encodings."""
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnreadableFileError("not a RIFF/WAVE file")

    fmt = None
    raw = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise UnreadableFileError("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < size:
                raise UnreadableFileError("truncated data chunk")
            raw = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or raw is None:
        raise UnreadableFileError("missing fmt or data chunk")

    tag, channels, rate, _byte_rate, _block_align, bits = fmt
    if tag == WAVE_FORMAT_EXTENSIBLE:
        # the real format tag is the first two bytes of the SubFormat GUID
        try:
            (tag,) = struct.unpack_from("<H", data, data.index(b"fmt ") + 8 + 24)
        except (struct.error, ValueError) as exc:
            raise UnreadableFileError("malformed extensible fmt chunk") from exc
    if channels < 1 or rate <= 0:
        raise UnreadableFileError("malformed fmt chunk")

    if tag == WAVE_FORMAT_PCM and bits == 16:
        samples = np.frombuffer(raw[: len(raw) - len(raw) % 2], dtype="<i2")
        samples = samples.astype(np.float64) / 2.0**15
    elif tag == WAVE_FORMAT_PCM and bits == 24:
        usable = len(raw) - len(raw) % 3
        b = np.frombuffer(raw[:usable], dtype=np.uint8).reshape(-1, 3)
        vals = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        vals = (vals << 8) >> 8  # sign-extend from 24 to 32 bits
        samples = vals.astype(np.float64) / 2.0**23
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(raw[: len(raw) - len(raw) % 4], dtype="<f4")
        samples = samples.astype(np.float64)
    else:
        raise UnsupportedEncodingError(
            f"unsupported WAV encoding (format tag {tag}, {bits}-bit); "
            "expected PCM 16/24-bit or IEEE float 32-bit"
        )

    if channels > 1:
        usable = len(samples) - len(samples) % channels
        samples = samples[:usable].reshape(-1, channels).mean(axis=1)
    if len(samples) == 0:
        raise EmptyAudioError("WAV file contains no samples")
    samples = np.clip(samples, -1.0, 1.0)
    return AudioClip(samples=samples, sample_rate=rate)


def frame_signal(
    clip: AudioClip, window_seconds: float, hop_seconds: float
) -> list[Frame]:
    """Cut the clip into overlapping frames of round(window_seconds * rate)
    samples every round(hop_seconds * rate) samples.

    Yields floor((N - W) / H) + 1 frames for N >= W, none otherwise; frames
    never read past the end of the clip.  Frame k starts at k * hop_seconds.
    """
    if window_seconds <= 0 or hop_seconds <= 0:
        raise ValueError("window_seconds and hop_seconds must be positive")
    width = int(round(window_seconds * clip.sample_rate))
    hop = int(round(hop_seconds * clip.sample_rate))
    if width < 2:
        raise ValueError("window shorter than 2 samples")
    if hop < 1:
        raise ValueError("hop shorter than 1 sample")
    n = len(clip.samples)
    if n < width:
        return []
    count = (n - width) // hop + 1
    return [
        Frame(index=k, start_time=k * hop_seconds, samples=clip.samples[k * hop : k * hop + width])
        for k in range(count)
    ]


def window_array(kind: str, length: int) -> np.ndarray:
    """Return the window samples for `kind` ("hann" or "rectangular")."""
    if length < 2:
        raise ValueError("window length must be >= 2")
    if kind == "hann":
        # symmetric Hann: w[n] = 0.5 * (1 - cos(2 pi n / (W - 1)))
        return np.hanning(length)
    if kind in ("rectangular", "rect"):
        return np.ones(length)
    raise ValueError(f"unknown window kind {kind!r}")


def apply_window(frame: Frame, kind: str = "hann") -> Frame:
    """Multiply the frame by the named analysis window."""
    w = window_array(kind, len(frame.samples))
    return Frame(index=frame.index, start_time=frame.start_time, samples=frame.samples * w)
