"""Two-Way Mismatch F0 candidate scoring.

For each trial F0 the error combines two directed mismatches between the
predicted harmonic series and the measured sinusoids: predicted-to-measured
(penalizes missing harmonics) and measured-to-predicted (penalizes unexplained
peaks).  Both weight frequency deviation by f**(-p), couple it to relative
peak amplitude through q, and reward strong matched peaks through r.  Trial
F0s whose predicted series spans many measured partials score low even when
a spectrally sparse interference is louder, which is what makes this error
usable as a per-frame salience for voice pitch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import FramePeaks

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class TwmParams:
    p: float = 0.5
    q: float = 1.4
    r: float = 0.5
    rho: float = 0.33
    max_harmonic_freq: float = 5000.0
    f0_min: float = 70.0
    f0_max: float = 1120.0
    grid_resolution_cents: float = 10.0
    no_evidence_error: float = 100.0

    def validate(self) -> None:
        if min(self.p, self.q, self.r, self.rho) < 0:
            raise ValueError("p, q, r, rho must be nonnegative")
        if not 0 < self.f0_min <= self.f0_max:
            raise ValueError("need 0 < f0_min <= f0_max")
        if self.grid_resolution_cents <= 0:
            raise ValueError("grid_resolution_cents must be positive")
        if self.max_harmonic_freq < self.f0_max:
            raise ValueError("max_harmonic_freq must cover the F0 range")
        if self.no_evidence_error <= 0:
            raise ValueError("no_evidence_error must be positive")


@dataclass(frozen=True)
class F0Candidate:
    """Trial F0 with its mismatch error and salience = -(normalized error)."""

    f0: float
    twm_error: float
    salience: float


def generate_trial_grid(params: TwmParams) -> np.ndarray:
    """Log-spaced trial F0s from f0_min to f0_max inclusive."""
    params.validate()
    span_cents = 1200.0 * math.log2(params.f0_max / params.f0_min)
    steps = int(math.floor(span_cents / params.grid_resolution_cents + 1e-9))
    grid = params.f0_min * 2.0 ** (
        np.arange(steps + 1) * params.grid_resolution_cents / 1200.0
    )
    if grid[-1] < params.f0_max * (1.0 - 1e-12):
        grid = np.append(grid, params.f0_max)
    return grid


def _error_array(
    freqs: np.ndarray, amps: np.ndarray, trials: np.ndarray, params: TwmParams
) -> np.ndarray:
    """Vectorized TWM error for an array of trial F0s against one peak set."""
    trials = np.asarray(trials, dtype=np.float64)
    in_band = freqs <= params.max_harmonic_freq
    freqs, amps = freqs[in_band], amps[in_band]
    k = len(freqs)
    if k == 0 or amps.max() <= 0.0:
        return np.full(trials.shape, params.no_evidence_error)
    rel = amps / amps.max()
    p, q, r = params.p, params.q, params.r

    # the predicted series only extends as far as there is measured evidence,
    # otherwise trials below the true F0 are judged mostly on empty spectrum
    top = min(params.max_harmonic_freq, float(freqs[-1]) * 1.01)
    n_harm = np.floor(top / trials).astype(int)
    n_harm = np.maximum(n_harm, 1)
    n_max = int(n_harm.max())
    n = np.arange(1, n_max + 1)
    predicted = trials[:, None] * n[None, :]
    valid = n[None, :] <= n_harm[:, None]

    # predicted -> measured: distance and amplitude of nearest measured peak
    pos = np.searchsorted(freqs, predicted)
    lo = np.clip(pos - 1, 0, k - 1)
    hi = np.clip(pos, 0, k - 1)
    d_lo = np.abs(predicted - freqs[lo])
    d_hi = np.abs(freqs[hi] - predicted)
    take_hi = d_hi < d_lo
    delta = np.where(take_hi, d_hi, d_lo)
    rel_near = np.where(take_hi, rel[hi], rel[lo])
    base = delta * predicted ** (-p)
    err_ptm = base + rel_near * (q * base - r)
    e_ptm = np.where(valid, err_ptm, 0.0).sum(axis=1) / n_harm

    # measured -> predicted: distance from each peak to its nearest harmonic
    m = np.clip(np.round(freqs[None, :] / trials[:, None]), 1, n_harm[:, None])
    delta_m = np.abs(freqs[None, :] - m * trials[:, None])
    base_m = delta_m * freqs[None, :] ** (-p)
    err_mtp = base_m + rel[None, :] * (q * base_m - r)
    e_mtp = err_mtp.sum(axis=1) / k

    return np.maximum(e_ptm + params.rho * e_mtp, 0.0)


def twm_error(peaks: FramePeaks, trial_f0: float, params: TwmParams) -> float:
    """TWM error of a single trial F0; the no-evidence sentinel when the
    frame has no peaks."""
    if trial_f0 <= 0:
        raise ValueError("trial_f0 must be positive")
    return float(
        _error_array(peaks.frequencies, peaks.amplitudes, np.array([trial_f0]), params)[0]
    )


def _local_minima_runs(errors: np.ndarray) -> list[int]:
    """Indices of local minima, plateau-aware.

    A run of equal values flanked by strictly larger values (or a grid edge)
    counts once, represented by its center index.
    """
    n = len(errors)
    reps: list[int] = []
    start = 0
    while start < n:
        end = start
        while end + 1 < n and errors[end + 1] == errors[start]:
            end += 1
        left = errors[start - 1] if start > 0 else np.inf
        right = errors[end + 1] if end + 1 < n else np.inf
        if errors[start] < left and errors[start] < right:
            reps.append((start + end) // 2)
        start = end + 1
    return reps


def _refine_minima(
    freqs: np.ndarray,
    amps: np.ndarray,
    grid: np.ndarray,
    errors: np.ndarray,
    minima: list[int],
    params: TwmParams,
) -> list[tuple[float, float]]:
    """Golden-section refinement of each grid minimum, run in lockstep so
    every iteration costs one vectorized error evaluation."""
    lo = np.array([np.log2(grid[max(i - 1, 0)]) for i in minima])
    hi = np.array([np.log2(grid[min(i + 1, len(grid) - 1)]) for i in minima])
    best_x = np.array([np.log2(grid[i]) for i in minima])
    best_f = np.array([errors[i] for i in minima])

    span_cents = float((hi - lo).max()) * 1200.0
    if span_cents <= 0.25:
        return [(2.0 ** x, f) for x, f in zip(best_x, best_f)]
    iters = int(math.ceil(math.log(span_cents / 0.25) / math.log(1.0 / _INV_PHI))) + 1

    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = _error_array(freqs, amps, 2.0 ** x1, params)
    f2 = _error_array(freqs, amps, 2.0 ** x2, params)
    for pts, vals in ((x1, f1), (x2, f2)):
        better = vals < best_f
        best_x = np.where(better, pts, best_x)
        best_f = np.where(better, vals, best_f)
    for _ in range(iters):
        shrink_hi = f1 < f2  # keep [lo, x2], else keep [x1, hi]
        lo_n = np.where(shrink_hi, lo, x1)
        hi_n = np.where(shrink_hi, x2, hi)
        probe = np.where(
            shrink_hi,
            hi_n - _INV_PHI * (hi_n - lo_n),
            lo_n + _INV_PHI * (hi_n - lo_n),
        )
        f_probe = _error_array(freqs, amps, 2.0 ** probe, params)
        x1, x2, f1, f2 = (
            np.where(shrink_hi, probe, x2),
            np.where(shrink_hi, x1, probe),
            np.where(shrink_hi, f_probe, f2),
            np.where(shrink_hi, f1, f_probe),
        )
        lo, hi = lo_n, hi_n
        better = f_probe < best_f
        best_x = np.where(better, probe, best_x)
        best_f = np.where(better, f_probe, best_f)
    return [(2.0 ** x, float(f)) for x, f in zip(best_x, best_f)]


def multi_f0(peaks: FramePeaks, params: TwmParams, top_m: int = 5) -> list[F0Candidate]:
    """Ranked F0 candidates for one frame.

    Scans the trial grid, finds local minima of the error curve, refines the
    strongest ones by golden-section search, and returns the top_m
    lowest-error candidates.  Salience is the error negated after dividing by
    the worst error among the returned candidates, so per-frame measurement
    costs land in [0, 1].
    """
    if top_m < 1:
        raise ValueError("top_m must be >= 1")
    if len(peaks) == 0:
        return []
    params.validate()
    freqs = np.asarray(peaks.frequencies, dtype=np.float64)
    amps = np.asarray(peaks.amplitudes, dtype=np.float64)

    grid = generate_trial_grid(params)
    errors = _error_array(freqs, amps, grid, params)
    minima = _local_minima_runs(errors)
    if not minima:
        minima = [int(np.argmin(errors))]
    # refining every minimum is wasteful; only the best few can reach top_m
    minima.sort(key=lambda i: (errors[i], i))
    minima = minima[: top_m + 3]

    refined = _refine_minima(freqs, amps, grid, errors, minima, params)

    # drop refinements that collapsed onto the same F0
    refined.sort(key=lambda c: (c[1], c[0]))
    chosen: list[tuple[float, float]] = []
    min_sep = params.grid_resolution_cents / 2.0
    for f0, err in refined:
        if all(abs(1200.0 * math.log2(f0 / c[0])) >= min_sep for c in chosen):
            chosen.append((f0, err))
        if len(chosen) == top_m:
            break

    worst = max(err for _, err in chosen)
    denom = worst if worst > 1e-12 else 1.0
    return [F0Candidate(f0=f0, twm_error=err, salience=-err / denom) for f0, err in chosen]
