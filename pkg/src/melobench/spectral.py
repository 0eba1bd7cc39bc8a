"""Short-time magnitude spectra and sparse sinusoid extraction.

A frame's spectrum is scanned for local maxima whose local shape matches the
analysis window's main lobe; matches become SpectralPeak entries with a
sinusoidality score in [0, 1] and a parabolically refined frequency and
amplitude.  Noise-like maxima (percussion, sidelobes) score low and are
rejected without any amplitude thresholding, so weak partials survive next
to strong interfering ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio_io import Frame, window_array

# half main-lobe width in unpadded DFT bins, per window kind
_HALF_LOBE_BINS = {"hann": 2, "rectangular": 1, "rect": 1}

# sub-bin template shifts searched during the fit, in padded bins
_TEMPLATE_SHIFTS = np.round(np.arange(-0.5, 0.51, 0.1), 10)

_TABLE_OVERSAMPLE = 32


@dataclass(frozen=True)
class Spectrum:
    """Magnitude spectrum (DC..Nyquist) of one zero-padded, windowed frame."""

    magnitudes: np.ndarray
    bin_hz: float
    frame_index: int
    start_time: float
    zero_pad_factor: int


@dataclass(frozen=True)
class SpectralPeak:
    frequency: float
    amplitude: float
    sinusoidality: float


@dataclass(frozen=True)
class FramePeaks:
    """Sinusoids detected in one frame, sorted by increasing frequency."""

    frame_index: int
    start_time: float
    frequencies: np.ndarray
    amplitudes: np.ndarray
    sinusoidality: np.ndarray

    def __len__(self) -> int:
        return len(self.frequencies)

    @property
    def peaks(self) -> list[SpectralPeak]:
        return [
            SpectralPeak(float(f), float(a), float(s))
            for f, a, s in zip(self.frequencies, self.amplitudes, self.sinusoidality)
        ]

    @staticmethod
    def empty(frame_index: int = 0, start_time: float = 0.0) -> "FramePeaks":
        z = np.zeros(0)
        return FramePeaks(frame_index, start_time, z, z, z)


def compute_spectrum(
    frame: Frame, sample_rate: int, zero_pad_factor: int = 4
) -> Spectrum:
    """Magnitude of the DFT of the zero-padded frame, DC through Nyquist."""
    if zero_pad_factor < 1:
        raise ValueError("zero_pad_factor must be >= 1")
    width = len(frame.samples)
    if width < 2:
        raise ValueError("frame too short")
    padded = width * zero_pad_factor
    mags = np.abs(np.fft.rfft(frame.samples, padded))
    return Spectrum(
        magnitudes=mags,
        bin_hz=sample_rate / padded,
        frame_index=frame.index,
        start_time=frame.start_time,
        zero_pad_factor=zero_pad_factor,
    )


@lru_cache(maxsize=8)
def _lobe_templates(kind: str, width: int, pad: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Main-lobe templates of the window transform.

    Returns (templates, template_norms_sq, half_lobe) where templates has one
    row per sub-bin shift, each row sampling |W(f)| at the 2L+1 padded bins
    around a peak displaced by that shift.
    """
    half_lobe = _HALF_LOBE_BINS[kind] * pad
    w = window_array(kind, width)
    table = np.abs(np.fft.rfft(w, width * pad * _TABLE_OVERSAMPLE))
    offsets = np.arange(-half_lobe, half_lobe + 1)
    rows = []
    for shift in _TEMPLATE_SHIFTS:
        idx = np.round(np.abs(offsets - shift) * _TABLE_OVERSAMPLE).astype(int)
        rows.append(table[idx])
    templates = np.asarray(rows)
    return templates, (templates * templates).sum(axis=1), half_lobe


def detect_sinusoids(
    spectrum: Spectrum,
    window_kind: str = "hann",
    sinusoidality_threshold: float = 0.8,
    noise_floor_db: float = -100.0,
    max_freq_hz: float = 5000.0,
) -> FramePeaks:
    """Extract sinusoids from a spectrum by main-lobe shape matching.

    Every local magnitude maximum above the absolute noise floor is compared
    against a scaled, sub-bin-shifted copy of the window's ideal main lobe;
    sinusoidality is 1 - residual energy / segment energy for the best fit.
    Peaks scoring at least `sinusoidality_threshold` are kept, with frequency
    and amplitude refined by parabolic interpolation of log magnitude.
    """
    if not 0.0 <= sinusoidality_threshold <= 1.0:
        raise ValueError("sinusoidality_threshold must be in [0, 1]")
    mags = spectrum.magnitudes
    n_bins = len(mags)
    width = (n_bins - 1) * 2 // spectrum.zero_pad_factor
    templates, template_norms, half_lobe = _lobe_templates(
        window_kind, width, spectrum.zero_pad_factor
    )
    full_scale = window_array(window_kind, width).sum() / 2.0
    floor = 10.0 ** (noise_floor_db / 20.0) * full_scale
    nyquist = spectrum.bin_hz * (n_bins - 1)

    empty = FramePeaks.empty(spectrum.frame_index, spectrum.start_time)
    if n_bins < 2 * half_lobe + 3:
        return empty

    interior = mags[1:-1]
    is_max = (interior > mags[:-2]) & (interior >= mags[2:]) & (interior >= floor)
    idx = np.nonzero(is_max)[0] + 1
    hi_bin = min(int(max_freq_hz / spectrum.bin_hz) + 1, n_bins - 2 - half_lobe)
    idx = idx[(idx >= half_lobe) & (idx <= hi_bin)]
    if len(idx) == 0:
        return empty

    # best least-squares fit of a scaled template == max normalized correlation
    offsets = np.arange(-half_lobe, half_lobe + 1)
    segments = mags[idx[:, None] + offsets[None, :]]
    seg_norms = (segments * segments).sum(axis=1)
    corr = segments @ templates.T
    scores = (corr * corr) / (seg_norms[:, None] * template_norms[None, :])
    sinusoidality = np.clip(scores.max(axis=1), 0.0, 1.0)

    keep = sinusoidality >= sinusoidality_threshold
    idx, sinusoidality = idx[keep], sinusoidality[keep]
    if len(idx) == 0:
        return empty

    # parabolic interpolation on log magnitude around each peak bin
    tiny = np.finfo(float).tiny
    lm = np.log(mags[idx - 1] + tiny)
    l0 = np.log(mags[idx] + tiny)
    lp = np.log(mags[idx + 1] + tiny)
    denom = lm - 2.0 * l0 + lp
    shift = np.where(np.abs(denom) > 1e-30, 0.5 * (lm - lp) / np.where(denom == 0, 1, denom), 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    freqs = (idx + shift) * spectrum.bin_hz
    amps = np.exp(l0 - 0.25 * (lm - lp) * shift) / full_scale

    ok = (freqs > 0.0) & (freqs < nyquist) & (freqs <= max_freq_hz)
    freqs, amps, sinusoidality = freqs[ok], amps[ok], sinusoidality[ok]
    if len(freqs) == 0:
        return empty

    # enforce the minimum peak separation of half a main lobe, keeping the
    # stronger of any colliding pair
    sep_hz = half_lobe * spectrum.bin_hz
    order = np.argsort(-amps, kind="stable")
    kept: list[int] = []
    for i in order:
        if all(abs(freqs[i] - freqs[j]) >= sep_hz for j in kept):
            kept.append(i)
    kept_arr = np.sort(np.asarray(kept))
    freqs, amps, sinusoidality = freqs[kept_arr], amps[kept_arr], sinusoidality[kept_arr]
    order = np.argsort(freqs, kind="stable")
    return FramePeaks(
        frame_index=spectrum.frame_index,
        start_time=spectrum.start_time,
        frequencies=freqs[order],
        amplitudes=amps[order],
        sinusoidality=sinusoidality[order],
    )
