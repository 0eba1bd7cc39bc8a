import numpy as np
import pytest

from melobench.audio_io import AudioClip


@pytest.fixture
def sine_clip():
    def make(freq=440.0, duration=1.0, sample_rate=44100, amplitude=0.8):
        t = np.arange(int(round(duration * sample_rate))) / sample_rate
        return AudioClip(amplitude * np.sin(2 * np.pi * freq * t), sample_rate)

    return make


def wav_pcm16_bytes(samples, sample_rate=44100, channels=1):
    """Hand-assembled PCM16 WAV bytes for ingestion tests."""
    import struct

    data = np.asarray(samples)
    if data.ndim == 1 and channels > 1:
        data = np.tile(data[:, None], (1, channels))
    ints = np.clip(np.round(data * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    fmt = struct.pack(
        "<4sIHHIIHH", b"fmt ", 16, 1, channels, sample_rate,
        sample_rate * channels * 2, channels * 2, 16,
    )
    return header + fmt + b"data" + struct.pack("<I", len(payload)) + payload
