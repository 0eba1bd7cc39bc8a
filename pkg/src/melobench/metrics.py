"""Contour scoring with the standard melody-evaluation measures.

An estimated contour is compared against a reference on the reference frame
grid: voicing recall and false-alarm rates, raw pitch accuracy within a cent
tolerance, raw chroma accuracy (octave-folded), and overall accuracy.  The
interchange format is one `time<TAB>f0` line per frame with f0 = 0.00 on
unvoiced frames.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .tracking import PitchContour


@dataclass(frozen=True)
class MelodyMetrics:
    voicing_recall: float
    voicing_false_alarm: float
    raw_pitch_accuracy: float
    raw_chroma_accuracy: float
    overall_accuracy: float

    def as_dict(self) -> dict:
        return asdict(self)


def _fold_to_chroma(cents: np.ndarray) -> np.ndarray:
    """Fold cent differences into (-600, 600] modulo one octave."""
    return cents - 1200.0 * np.ceil(cents / 1200.0 - 0.5)


def _align_to_reference(estimate: PitchContour, reference: PitchContour) -> np.ndarray:
    """Estimate f0 resampled onto the reference grid by nearest-frame lookup.

    Estimate frames beyond the reference span simply never get matched; an
    empty estimate reads as fully unvoiced.
    """
    if len(estimate) == 0:
        return np.zeros(len(reference))
    pos = np.searchsorted(estimate.times, reference.times)
    lo = np.clip(pos - 1, 0, len(estimate) - 1)
    hi = np.clip(pos, 0, len(estimate) - 1)
    use_hi = np.abs(estimate.times[hi] - reference.times) < np.abs(
        estimate.times[lo] - reference.times
    )
    nearest = np.where(use_hi, hi, lo)
    offsets = np.abs(estimate.times[nearest] - reference.times)
    if len(reference) > 1:
        half_hop = float(np.median(np.diff(reference.times))) / 2.0
        if offsets.max() > half_hop + 1e-9:
            warnings.warn(
                "estimate and reference frame grids differ; using nearest-frame alignment",
                stacklevel=3,
            )
    return estimate.f0[nearest]


def evaluate(
    estimate: PitchContour, reference: PitchContour, tolerance_cents: float = 50.0
) -> MelodyMetrics:
    """Score an estimated contour against a reference.

    raw_pitch_accuracy counts reference-voiced frames where the estimate is
    voiced and within tolerance_cents; raw_chroma_accuracy folds the cent
    difference into one octave first.  overall_accuracy counts frames whose
    voicing label matches, requiring the pitch to be within tolerance on
    voiced frames.
    """
    if len(reference) == 0:
        raise ValueError("reference contour is empty; nothing to score")
    est_f0 = _align_to_reference(estimate, reference)
    ref_v = reference.f0 > 0
    est_v = est_f0 > 0
    n_ref_voiced = int(ref_v.sum())
    n_ref_unvoiced = int((~ref_v).sum())

    recall = float((est_v & ref_v).sum() / n_ref_voiced) if n_ref_voiced else 0.0
    false_alarm = float((est_v & ~ref_v).sum() / n_ref_unvoiced) if n_ref_unvoiced else 0.0

    both = ref_v & est_v
    cents = np.zeros(len(reference))
    cents[both] = 1200.0 * np.log2(est_f0[both] / reference.f0[both])
    pitch_hit = both & (np.abs(cents) <= tolerance_cents)
    chroma_hit = both & (np.abs(_fold_to_chroma(cents)) <= tolerance_cents)

    rpa = float(pitch_hit.sum() / n_ref_voiced) if n_ref_voiced else 0.0
    rca = float(chroma_hit.sum() / n_ref_voiced) if n_ref_voiced else 0.0
    correct = pitch_hit | (~ref_v & ~est_v)
    overall = float(correct.sum() / len(reference))
    return MelodyMetrics(
        voicing_recall=recall,
        voicing_false_alarm=false_alarm,
        raw_pitch_accuracy=rpa,
        raw_chroma_accuracy=rca,
        overall_accuracy=overall,
    )


def write_contour(contour: PitchContour, path) -> None:
    """Write `time<TAB>f0` lines; 0.0000 marks unvoiced frames."""
    lines = [
        f"{t:.6f}\t{f:.4f}" for t, f in zip(contour.times, contour.f0)
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_contour(path) -> PitchContour:
    """Parse an interchange file; negative f0 values are rejected."""
    times = []
    f0s = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"{path}:{lineno}: expected 'time<TAB>f0'")
        t, f = float(parts[0]), float(parts[1])
        if f < 0:
            raise ValueError(f"{path}:{lineno}: negative f0 {f}")
        times.append(t)
        f0s.append(f)
    n = len(times)
    return PitchContour(times=np.asarray(times), f0=np.asarray(f0s), salience=np.zeros(n))
