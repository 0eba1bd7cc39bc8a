"""Dynamic-programming pitch contour tracking over per-frame F0 candidates.

track_single finds the one path through the candidate lattice minimizing
measurement cost plus weighted transition cost; track_dual tracks two
harmonically unrelated contours at once so a stable-pitch accompaniment
cannot steal the melody line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .twm import F0Candidate

UNVOICED = 0.0

# ratio templates a second contour may not share with the first, as cents
_FORBIDDEN_RATIOS_CENTS = sorted(
    {
        round(1200.0 * math.log2(m / n), 6)
        for m in range(1, 5)
        for n in range(1, 5)
        if m >= n
    }
)


@dataclass
class TrackingParams:
    smoothness_weight: float = 0.4
    max_jump_cents: float = 400.0
    harmonic_tolerance_cents: float = 30.0
    # dual mode: allow a contour to go unaccompanied for a frame when every
    # candidate pair is harmonically related, at this measurement cost
    allow_unpaired: bool = True
    unpaired_cost: float = 0.5

    def validate(self) -> None:
        if self.smoothness_weight < 0:
            raise ValueError("smoothness_weight must be nonnegative")
        if self.max_jump_cents <= 0:
            raise ValueError("max_jump_cents must be positive")
        if self.harmonic_tolerance_cents < 0:
            raise ValueError("harmonic_tolerance_cents must be nonnegative")
        if self.unpaired_cost < 0:
            raise ValueError("unpaired_cost must be nonnegative")


@dataclass(frozen=True)
class LatticeFrame:
    """Candidates of one frame; costs are normalized TWM errors in [0, 1]."""

    start_time: float
    f0s: np.ndarray
    costs: np.ndarray

    @staticmethod
    def from_candidates(start_time: float, candidates: list[F0Candidate]) -> "LatticeFrame":
        return LatticeFrame(
            start_time=start_time,
            f0s=np.array([c.f0 for c in candidates]),
            costs=np.array([-c.salience for c in candidates]),
        )

    def __len__(self) -> int:
        return len(self.f0s)


@dataclass
class PitchContour:
    """Per-frame voice pitch: f0 in Hz, 0.0 where unvoiced."""

    times: np.ndarray
    f0: np.ndarray
    salience: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.f0 = np.asarray(self.f0, dtype=np.float64)
        self.salience = np.asarray(self.salience, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def voiced(self) -> np.ndarray:
        return self.f0 > 0.0

    @staticmethod
    def empty() -> "PitchContour":
        z = np.zeros(0)
        return PitchContour(z.copy(), z.copy(), z.copy())


def smoothness_cost(f_prev: float, f_cur: float, params: TrackingParams) -> float:
    """Capped, normalized log-frequency transition cost in [0, 1]."""
    if f_prev <= 0 or f_cur <= 0:
        raise ValueError("frequencies must be positive")
    cents = abs(1200.0 * math.log2(f_cur / f_prev))
    return min(cents, params.max_jump_cents) / params.max_jump_cents


def _smooth_matrix(f_prev: np.ndarray, f_cur: np.ndarray, params: TrackingParams) -> np.ndarray:
    cents = np.abs(1200.0 * np.log2(f_cur[None, :] / f_prev[:, None]))
    return np.minimum(cents, params.max_jump_cents) / params.max_jump_cents


def track_single(lattice: list[LatticeFrame], params: TrackingParams) -> PitchContour:
    """Minimum-cost path through the lattice.

    Total cost is sum of measurement costs plus smoothness_weight times the
    sum of transition costs.  Frames without candidates become placeholders
    with zero transition cost on both sides and are emitted UNVOICED.  Ties
    break toward the lower-index (higher-salience) predecessor.
    """
    params.validate()
    n = len(lattice)
    if n == 0:
        return PitchContour.empty()

    costs: list[np.ndarray] = []
    backs: list[np.ndarray] = []
    for t, frame in enumerate(lattice):
        meas = frame.costs if len(frame) else np.zeros(1)
        if t == 0:
            costs.append(meas.astype(np.float64).copy())
            backs.append(np.zeros(len(meas), dtype=int))
            continue
        prev_frame = lattice[t - 1]
        if len(frame) == 0 or len(prev_frame) == 0:
            trans = np.zeros((len(costs[-1]), len(meas)))
        else:
            trans = params.smoothness_weight * _smooth_matrix(prev_frame.f0s, frame.f0s, params)
        reach = costs[-1][:, None] + trans
        backs.append(np.argmin(reach, axis=0))
        costs.append(reach[backs[-1], np.arange(len(meas))] + meas)

    times = np.array([f.start_time for f in lattice])
    f0 = np.zeros(n)
    salience = np.zeros(n)
    j = int(np.argmin(costs[-1]))
    for t in range(n - 1, -1, -1):
        frame = lattice[t]
        if len(frame):
            f0[t] = frame.f0s[j]
            salience[t] = -frame.costs[j]
        j = int(backs[t][j])
    return PitchContour(times=times, f0=f0, salience=salience)


def harmonically_related(f_lo: float, f_hi: float, tolerance_cents: float) -> bool:
    """True when f_hi / f_lo is within tolerance of a small integer ratio."""
    if f_lo > f_hi:
        f_lo, f_hi = f_hi, f_lo
    cents = 1200.0 * math.log2(f_hi / f_lo)
    return any(abs(cents - rc) <= tolerance_cents for rc in _FORBIDDEN_RATIOS_CENTS)


@dataclass(frozen=True)
class _DualState:
    """One DP state: a candidate pair, a lone candidate, or a placeholder.

    f_lo <= f_hi always; lone candidates store their value in f_lo.  States on
    deficient frames (fewer than two candidates, or no admissible pair in
    strict mode) carry zero transition cost on both sides.
    """

    f_lo: float
    f_hi: float  # nan for lone / placeholder states
    meas: float
    sal_lo: float
    sal_hi: float
    free_transition: bool

    @property
    def lone(self) -> bool:
        return math.isnan(self.f_hi)

    @property
    def placeholder(self) -> bool:
        return math.isnan(self.f_lo)


def _dual_states(frame: LatticeFrame, params: TrackingParams) -> list[_DualState]:
    nan = float("nan")
    n = len(frame)
    if n == 0:
        return [_DualState(nan, nan, 0.0, 0.0, 0.0, True)]
    if n == 1:
        return [
            _DualState(float(frame.f0s[0]), nan, float(frame.costs[0]), -float(frame.costs[0]), 0.0, True)
        ]
    states: list[_DualState] = []
    for i in range(n):
        for j in range(i + 1, n):
            fi, fj = float(frame.f0s[i]), float(frame.f0s[j])
            if harmonically_related(fi, fj, params.harmonic_tolerance_cents):
                continue
            lo, hi = (i, j) if fi <= fj else (j, i)
            states.append(
                _DualState(
                    float(frame.f0s[lo]),
                    float(frame.f0s[hi]),
                    float(frame.costs[i] + frame.costs[j]),
                    -float(frame.costs[lo]),
                    -float(frame.costs[hi]),
                    False,
                )
            )
    if params.allow_unpaired:
        for i in range(n):
            states.append(
                _DualState(
                    float(frame.f0s[i]),
                    nan,
                    float(frame.costs[i]) + params.unpaired_cost,
                    -float(frame.costs[i]),
                    0.0,
                    False,
                )
            )
    if not states:
        # strict mode with every pair harmonically related: fall back to the
        # best lone candidate, treated like a deficient frame
        i = int(np.argmin(frame.costs))
        states = [
            _DualState(float(frame.f0s[i]), nan, float(frame.costs[i]), -float(frame.costs[i]), 0.0, True)
        ]
    return states


def _dual_transition(a: _DualState, b: _DualState, params: TrackingParams) -> float:
    if a.free_transition or b.free_transition or a.placeholder or b.placeholder:
        return 0.0
    if not a.lone and not b.lone:
        return smoothness_cost(a.f_lo, b.f_lo, params) + smoothness_cost(a.f_hi, b.f_hi, params)
    if a.lone and b.lone:
        return smoothness_cost(a.f_lo, b.f_lo, params)
    if a.lone:
        return min(smoothness_cost(a.f_lo, b.f_lo, params), smoothness_cost(a.f_lo, b.f_hi, params))
    return min(smoothness_cost(a.f_lo, b.f_lo, params), smoothness_cost(a.f_hi, b.f_lo, params))


def track_dual(
    lattice: list[LatticeFrame], params: TrackingParams
) -> tuple[PitchContour, PitchContour]:
    """Jointly track two harmonically unrelated contours.

    States are unordered candidate pairs (plus lone-candidate states when
    allow_unpaired is set); transition cost matches lower frequency to lower
    frequency.  Returns (lower, upper) contours; a lone candidate is emitted
    on the contour whose last voiced value is nearest in cents.
    """
    params.validate()
    n = len(lattice)
    if n == 0:
        return PitchContour.empty(), PitchContour.empty()

    frame_states = [_dual_states(f, params) for f in lattice]
    costs: list[np.ndarray] = []
    backs: list[np.ndarray] = []
    for t, states in enumerate(frame_states):
        meas = np.array([s.meas for s in states])
        if t == 0:
            costs.append(meas.copy())
            backs.append(np.zeros(len(states), dtype=int))
            continue
        prev = frame_states[t - 1]
        trans = np.array(
            [[_dual_transition(a, b, params) for b in states] for a in prev]
        )
        reach = costs[-1][:, None] + params.smoothness_weight * trans
        backs.append(np.argmin(reach, axis=0))
        costs.append(reach[backs[-1], np.arange(len(states))] + meas)

    path: list[_DualState] = [None] * n  # type: ignore[list-item]
    j = int(np.argmin(costs[-1]))
    for t in range(n - 1, -1, -1):
        path[t] = frame_states[t][j]
        j = int(backs[t][j])

    times = np.array([f.start_time for f in lattice])
    f_a = np.zeros(n)
    f_b = np.zeros(n)
    s_a = np.zeros(n)
    s_b = np.zeros(n)
    last_a = last_b = None
    for t, st in enumerate(path):
        if st.placeholder:
            continue
        if not st.lone:
            f_a[t], s_a[t] = st.f_lo, st.sal_lo
            f_b[t], s_b[t] = st.f_hi, st.sal_hi
            last_a, last_b = st.f_lo, st.f_hi
            continue
        # lone candidate: emit on the nearer chain, tie toward the lower one
        dist_a = abs(math.log(st.f_lo / last_a)) if last_a else math.inf
        dist_b = abs(math.log(st.f_lo / last_b)) if last_b else math.inf
        if dist_b < dist_a:
            f_b[t], s_b[t] = st.f_lo, st.sal_lo
            last_b = st.f_lo
        else:
            f_a[t], s_a[t] = st.f_lo, st.sal_lo
            last_a = st.f_lo
    return (
        PitchContour(times=times.copy(), f0=f_a, salience=s_a),
        PitchContour(times=times.copy(), f0=f_b, salience=s_b),
    )


def select_voice_contour(
    contour_a: PitchContour,
    contour_b: PitchContour,
    features_a: tuple[float, float],
    features_b: tuple[float, float],
) -> PitchContour:
    """Pick the contour that behaves like a voice.

    Each features tuple is (mean harmonic energy, mean pitch instability).
    Both feature axes are z-normalized across the pair and summed; the higher
    combined score wins, tie toward contour_a.  An entirely unvoiced contour
    always loses to a voiced one.
    """
    a_voiced = bool(np.any(contour_a.voiced))
    b_voiced = bool(np.any(contour_b.voiced))
    if not b_voiced:
        return contour_a
    if not a_voiced:
        return contour_b

    score_a = score_b = 0.0
    for xa, xb in zip(features_a, features_b):
        mu = (xa + xb) / 2.0
        sd = abs(xa - xb) / 2.0
        if sd > 0:
            score_a += (xa - mu) / sd
            score_b += (xb - mu) / sd
    return contour_b if score_b > score_a else contour_a
