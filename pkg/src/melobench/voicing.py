"""Frame-level singing-voice detection.

Two features drive the decision: the fraction of sinusoidal energy at
harmonics of the tracked pitch, and the local instability of the pitch
trajectory in cents.  The second one is what keeps loud stable-pitch
instruments from passing as voice.  Each class (vocal / non-vocal) gets a
diagonal-covariance Gaussian mixture; frames are labeled by likelihood
comparison and median-smoothed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import median_filter
from scipy.special import logsumexp

from .spectral import FramePeaks
from .tracking import PitchContour

VARIANCE_FLOOR = 1e-6

FEATURE_NAMES = ("harmonic_energy", "pitch_instability")

MODEL_VERSION = 1


class TrainingError(ValueError):
    """Base class for GMM training failures."""


class TooFewSamplesError(TrainingError):
    pass


class DegenerateDataError(TrainingError):
    """All training samples are identical."""


class UnsupportedModelVersionError(ValueError):
    pass


def harmonic_energy(peaks: FramePeaks, f0: float, band_hz: float = 5000.0) -> float:
    """Fraction of squared peak amplitude lying at harmonics of f0.

    A peak counts as harmonic when it is within 3% of an integer multiple of
    f0, multiples capped at band_hz; only peaks below band_hz enter either
    sum.  Returns 0.0 for a frame without peaks.
    """
    if f0 <= 0:
        raise ValueError("f0 must be positive")
    if band_hz <= f0:
        raise ValueError("band_hz must exceed f0")
    in_band = peaks.frequencies <= band_hz
    freqs = peaks.frequencies[in_band]
    if len(freqs) == 0:
        return 0.0
    energy = peaks.amplitudes[in_band] ** 2
    total = energy.sum()
    if total <= 0:
        return 0.0
    m = np.clip(np.round(freqs / f0), 1, max(int(band_hz / f0), 1))
    harmonic = np.abs(freqs - m * f0) <= 0.03 * m * f0
    return float(energy[harmonic].sum() / total)


def pitch_instability(contour: PitchContour, frame_index: int, half_window: int = 10) -> float:
    """Local standard deviation of the pitch trajectory in cents.

    Deviations are measured from the geometric mean of the voiced F0s inside
    the +-half_window frame neighborhood; fewer than 3 voiced frames give 0.
    """
    if half_window < 1:
        raise ValueError("half_window must be >= 1")
    lo = max(frame_index - half_window, 0)
    hi = min(frame_index + half_window + 1, len(contour))
    f = contour.f0[lo:hi]
    f = f[f > 0]
    if len(f) < 3:
        return 0.0
    if f.min() == f.max():
        return 0.0
    log_f = np.log2(f)
    cents = 1200.0 * (log_f - log_f.mean())
    return float(np.sqrt(np.mean(cents**2)))


def contour_features(
    peaks_per_frame: list[FramePeaks],
    contour: PitchContour,
    band_hz: float = 5000.0,
    half_window: int = 10,
) -> np.ndarray:
    """(n_frames, 2) array of (harmonic_energy, pitch_instability); unvoiced
    frames carry (0, 0)."""
    n = len(contour)
    out = np.zeros((n, 2))
    for t in range(n):
        f0 = contour.f0[t]
        if f0 <= 0:
            continue
        out[t, 0] = harmonic_energy(peaks_per_frame[t], f0, band_hz)
        out[t, 1] = pitch_instability(contour, t, half_window)
    return out


@dataclass
class GmmModel:
    """Diagonal-covariance Gaussian mixture."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        self.variances = np.atleast_2d(np.asarray(self.variances, dtype=np.float64))
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        if np.any(self.variances < VARIANCE_FLOOR * (1 - 1e-12)):
            raise ValueError("variances below the floor")

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def _component_log_pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        diff = x[:, None, :] - self.means[None, :, :]
        return -0.5 * (
            np.log(2.0 * np.pi * self.variances)[None, :, :] + diff**2 / self.variances[None, :, :]
        ).sum(axis=2)

    def log_pdf(self, x) -> np.ndarray:
        """Per-sample mixture log density."""
        with np.errstate(divide="ignore"):
            log_w = np.log(self.weights)
        return logsumexp(self._component_log_pdf(np.asarray(x, float)) + log_w[None, :], axis=1)

    def log_likelihood(self, x) -> float:
        return float(self.log_pdf(x).sum())


def _kmeans(x: np.ndarray, k: int, rng: np.random.Generator, iters: int = 50) -> np.ndarray:
    """Seeded k-means++ initialization plus Lloyd iterations; returns labels."""
    n = len(x)
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    for j in range(1, k):
        d2 = np.min(((x[:, None, :] - centers[None, :j, :]) ** 2).sum(axis=2), axis=1)
        total = d2.sum()
        if total <= 0:
            centers[j] = x[rng.integers(n)]
            continue
        centers[j] = x[rng.choice(n, p=d2 / total)]
    labels = np.zeros(n, dtype=int)
    for _ in range(iters):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            mask = labels == j
            if mask.any():
                centers[j] = x[mask].mean(axis=0)
            else:
                centers[j] = x[np.argmax(d2.min(axis=1))]
    return labels


def train_gmm(
    samples,
    k: int,
    max_iters: int = 200,
    seed: int = 0,
    tol_per_sample: float = 1e-6,
) -> GmmModel:
    """Fit a diagonal-covariance GMM by EM, initialized with seeded k-means.

    Stops after max_iters or once the total log-likelihood improves by less
    than tol_per_sample per sample.  Variances are floored each M-step.  The
    fitted model carries its per-iteration log-likelihoods in
    `log_likelihood_history`.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n, d = x.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 10 * k:
        raise TooFewSamplesError(f"need at least {10 * k} samples for k={k}, got {n}")
    if np.all(x == x[0]):
        raise DegenerateDataError("all training samples are identical")

    rng = np.random.default_rng(seed)
    labels = _kmeans(x, k, rng)
    weights = np.empty(k)
    means = np.empty((k, d))
    variances = np.empty((k, d))
    for j in range(k):
        mask = labels == j
        if not mask.any():
            mask = np.ones(n, dtype=bool)
        weights[j] = mask.sum() / n
        means[j] = x[mask].mean(axis=0)
        variances[j] = np.maximum(x[mask].var(axis=0), VARIANCE_FLOOR)
    weights = weights / weights.sum()

    history: list[float] = []
    for _ in range(max_iters):
        model = GmmModel(weights, means, variances)
        comp = model._component_log_pdf(x)
        with np.errstate(divide="ignore"):
            joint = comp + np.log(weights)[None, :]
        norm = logsumexp(joint, axis=1)
        history.append(float(norm.sum()))
        if len(history) > 1 and history[-1] - history[-2] < tol_per_sample * n:
            break
        resp = np.exp(joint - norm[:, None])
        nk = resp.sum(axis=0)
        nk_safe = np.maximum(nk, 1e-300)
        weights = nk / n
        means = (resp.T @ x) / nk_safe[:, None]
        sq = (resp.T @ (x**2)) / nk_safe[:, None]
        variances = np.maximum(sq - means**2, VARIANCE_FLOOR)

    model = GmmModel(weights, means, variances)
    model.log_likelihood_history = history  # type: ignore[attr-defined]
    return model


def classify_frames(
    features,
    vocal: GmmModel,
    nonvocal: GmmModel,
    smooth_frames: int = 11,
    bias: float = 0.0,
) -> np.ndarray:
    """Boolean vocal/non-vocal labels, median-smoothed with edge replication.

    A frame is vocal when its vocal-model log likelihood plus bias exceeds
    the non-vocal one, so positive bias trades false alarms for recall.
    """
    if smooth_frames < 1 or smooth_frames % 2 == 0:
        raise ValueError("smooth_frames must be a positive odd integer")
    if vocal.n_features != nonvocal.n_features:
        raise ValueError("models disagree on feature dimension")
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if x.size == 0:
        return np.zeros(0, dtype=bool)
    raw = (vocal.log_pdf(x) + bias) > nonvocal.log_pdf(x)
    if smooth_frames == 1 or len(raw) == 1:
        return raw
    smoothed = median_filter(raw.astype(np.int8), size=smooth_frames, mode="nearest")
    return smoothed.astype(bool)


def _model_to_dict(model: GmmModel) -> dict:
    return {
        "weights": model.weights.tolist(),
        "means": model.means.tolist(),
        "variances": model.variances.tolist(),
    }


def save_svd_model(path, vocal: GmmModel, nonvocal: GmmModel, feature_names=FEATURE_NAMES) -> None:
    """Persist the classifier pair as a versioned JSON document."""
    doc = {
        "version": MODEL_VERSION,
        "feature_names": list(feature_names),
        "classes": {"vocal": _model_to_dict(vocal), "nonvocal": _model_to_dict(nonvocal)},
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_svd_model(path) -> tuple[GmmModel, GmmModel, list[str]]:
    """Load a (vocal, nonvocal, feature_names) triple; rejects unknown versions."""
    doc = json.loads(Path(path).read_text())
    return parse_svd_model(doc)


def parse_svd_model(doc: dict) -> tuple[GmmModel, GmmModel, list[str]]:
    if doc.get("version") != MODEL_VERSION:
        raise UnsupportedModelVersionError(
            f"unsupported model version {doc.get('version')!r}, expected {MODEL_VERSION}"
        )
    models = []
    for name in ("vocal", "nonvocal"):
        block = doc["classes"][name]
        models.append(GmmModel(block["weights"], block["means"], block["variances"]))
    return models[0], models[1], list(doc["feature_names"])
