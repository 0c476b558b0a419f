"""
Cascade Motif Toolkit - Phase Detector
Locates the steep-growth and inhibition phases of a cascade from a
self-exciting (exponential-kernel Hawkes) reshare intensity.
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from cascade_model import Cascade, Window

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 512
DEFAULT_SMOOTH_WIDTH = 5
DEFAULT_QUIESCENCE = 0.05
LOG_FLOOR = 1e-12
MIN_RESOLUTION = 16


@dataclass(frozen=True)
class KernelParams:
    bandwidth: float
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"Kernel bandwidth must be positive, got {self.bandwidth}")
        if self.resolution < MIN_RESOLUTION:
            raise ValueError(f"Grid resolution must be at least {MIN_RESOLUTION}, got {self.resolution}")


@dataclass(frozen=True)
class IntensitySeries:
    times: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Extrema:
    """Inclusive index runs of the smoothed series"""
    maxima: List[Tuple[int, int]]
    minima: List[Tuple[int, int]]
    smoothed: np.ndarray = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class PhaseDetection:
    cascade_id: str
    t_steep: float
    t_inhib: float
    steep_window: int
    inhib_window: int
    fallback: bool = False
    bandwidth: Optional[float] = None
    overridden: bool = False
    maxima: Tuple[Tuple[float, float], ...] = ()
    minima: Tuple[Tuple[float, float], ...] = ()

    def to_dict(self) -> Dict:
        return {
            "cascade_id": self.cascade_id,
            "t_steep": self.t_steep,
            "t_inhib": self.t_inhib,
            "steep_window": self.steep_window,
            "inhib_window": self.inhib_window,
            "fallback": self.fallback,
            "bandwidth": self.bandwidth,
            "overridden": self.overridden
        }


def intensity_at(event_times: Sequence[float], eval_times: Sequence[float], bandwidth: float) -> np.ndarray:
    """
    lambda(t) = sum over t_i < t of exp(-(t - t_i) / theta) / theta

    One forward pass over the merged, sorted event and evaluation times.
    """
    if not bandwidth > 0:
        raise ValueError(f"Kernel bandwidth must be positive, got {bandwidth}")

    events = np.sort(np.asarray(event_times, dtype=float))
    evals = np.asarray(eval_times, dtype=float)
    order = np.argsort(evals, kind="stable")
    out = np.zeros(len(evals))

    decayed = 0.0  # sum of exp(-(last - t_i)/theta) over absorbed events
    last = None
    j = 0
    for idx in order:
        t = evals[idx]
        while j < len(events) and events[j] < t:
            if last is not None:
                decayed *= math.exp(-(events[j] - last) / bandwidth)
            decayed += 1.0
            last = events[j]
            j += 1
        if last is not None:
            out[idx] = decayed * math.exp(-(t - last) / bandwidth) / bandwidth
    return out


def direct_intensity(event_times: Sequence[float], eval_times: Sequence[float], bandwidth: float) -> np.ndarray:
    """The same intensity summed term by term"""
    events = np.asarray(event_times, dtype=float)[None, :]
    evals = np.asarray(eval_times, dtype=float)[:, None]
    lag = evals - events
    terms = np.where(lag > 0, np.exp(-np.clip(lag, 0, None) / bandwidth), 0.0)
    return terms.sum(axis=1) / bandwidth


def compensator(event_times: Sequence[float], horizon: float, bandwidth: float) -> float:
    """Integral of the intensity over [0, horizon], closed form"""
    events = np.asarray(event_times, dtype=float)
    events = events[events <= horizon]
    return float(np.sum(1.0 - np.exp(-(horizon - events) / bandwidth)))


def intensity(cascade: Cascade, params: KernelParams) -> IntensitySeries:
    """Intensity of the cascade's reshare times on an even grid over [0, T_C]"""
    span = cascade.duration if cascade.duration > 0 else params.bandwidth
    times = np.linspace(0.0, span, params.resolution)
    values = intensity_at(cascade.event_times, times, params.bandwidth)
    return IntensitySeries(times=times, values=values)


def smooth(values: Sequence[float], width: int) -> np.ndarray:
    """Centered moving average; the window shrinks at the edges"""
    return pd.Series(np.asarray(values, dtype=float)).rolling(width, center=True, min_periods=1).mean().to_numpy()


def _runs(values: np.ndarray) -> List[Tuple[int, int]]:
    runs = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] != values[start]:
            runs.append((start, i - 1))
            start = i
    return runs


def find_extrema(series, smooth_width: int = DEFAULT_SMOOTH_WIDTH) -> Extrema:
    """
    Maximal runs around strict local maxima and minima of the smoothed
    series. Runs touching either end are skipped, except the global maximum.
    """
    values = series.values if isinstance(series, IntensitySeries) else np.asarray(series, dtype=float)
    if smooth_width < 1 or smooth_width % 2 == 0:
        raise ValueError(f"Smoothing width must be a positive odd integer, got {smooth_width}")
    if len(values) < smooth_width:
        raise ValueError(f"Series of length {len(values)} is shorter than smoothing width {smooth_width}")

    smoothed = smooth(values, smooth_width)
    runs = _runs(smoothed)
    maxima, minima = [], []
    for r, (lo, hi) in enumerate(runs):
        if r == 0 or r == len(runs) - 1:
            continue
        here = smoothed[lo]
        before = smoothed[runs[r - 1][0]]
        after = smoothed[runs[r + 1][0]]
        if here > before and here > after:
            maxima.append((lo, hi))
        elif here < before and here < after:
            minima.append((lo, hi))

    if len(runs) > 1:
        peak = max(runs, key=lambda run: smoothed[run[0]])
        if peak not in maxima:
            maxima.append(peak)
            maxima.sort()

    return Extrema(maxima=maxima, minima=minima, smoothed=smoothed)


def window_for_time(windows: Sequence[Window], t: float) -> int:
    """Last window starting at or before t; gaps belong to the earlier window"""
    starts = [w.start_time for w in windows]
    q = bisect.bisect_right(starts, t) - 1
    return windows[max(q, 0)].index


def detect_phases(
    cascade: Cascade,
    windows: Sequence[Window],
    params: KernelParams,
    quiescence: float = DEFAULT_QUIESCENCE,
    smooth_width: int = DEFAULT_SMOOTH_WIDTH
) -> PhaseDetection:
    """
    Steep time: the global maximum of the smoothed intensity. Inhibition
    time: the earliest candidate minimum after it past which the smoothed
    intensity stays below `quiescence` times the peak. Without one the
    inhibition phase falls back to the last window.
    """
    if not windows:
        raise ValueError("Phase detection needs at least one window")
    if not 0 < quiescence < 1:
        raise ValueError(f"Quiescence fraction must be in (0, 1), got {quiescence}")

    series = intensity(cascade, params)
    extrema = find_extrema(series, smooth_width)
    smoothed = extrema.smoothed
    times = series.times

    def mean_time(run):
        return float(times[run[0]:run[1] + 1].mean())

    if extrema.maxima:
        peak_run = max(extrema.maxima, key=lambda run: (smoothed[run[0]], -run[0]))
    else:
        peak_run = (0, len(times) - 1)
    peak = smoothed[peak_run[0]]
    t_steep = mean_time(peak_run)

    t_inhib = None
    threshold = quiescence * peak
    # suffix_max[i] = max of smoothed[i:]
    suffix_max = np.maximum.accumulate(smoothed[::-1])[::-1]
    for run in extrema.minima:
        t = mean_time(run)
        if t <= t_steep:
            continue
        if suffix_max[run[0]] < threshold:
            t_inhib = t
            break

    steep_window = window_for_time(windows, t_steep)
    fallback = t_inhib is None or len(windows) == 1
    if fallback:
        t_inhib = cascade.duration
        inhib_window = windows[-1].index
        logger.debug(f"Cascade {cascade.id}: no quiescent minimum, inhibition falls back to last window")
    else:
        inhib_window = window_for_time(windows, t_inhib)

    return PhaseDetection(
        cascade_id=cascade.id,
        t_steep=t_steep,
        t_inhib=t_inhib,
        steep_window=steep_window,
        inhib_window=max(inhib_window, steep_window),
        fallback=fallback,
        bandwidth=params.bandwidth,
        maxima=tuple((mean_time(r), float(smoothed[r[0]])) for r in extrema.maxima),
        minima=tuple((mean_time(r), float(smoothed[r[0]])) for r in extrema.minima)
    )


def override_phases(cascade: Cascade, windows: Sequence[Window], steep_window: int, inhib_window: int) -> PhaseDetection:
    """Externally supplied phase windows, validated against the cascade"""
    last = windows[-1].index
    for name, q in (("steep", steep_window), ("inhibition", inhib_window)):
        if not 0 <= q <= last:
            raise ValueError(f"{name} window {q} outside 0..{last} for cascade '{cascade.id}'")
    if steep_window > inhib_window:
        raise ValueError(f"Steep window {steep_window} comes after inhibition window {inhib_window}")

    return PhaseDetection(
        cascade_id=cascade.id,
        t_steep=windows[steep_window].start_time,
        t_inhib=windows[inhib_window].end_time,
        steep_window=steep_window,
        inhib_window=inhib_window,
        overridden=True
    )


def log_likelihood(event_times: Sequence[float], horizon: float, bandwidth: float) -> float:
    """Point-process log-likelihood of the unit-mass exponential kernel"""
    events = np.sort(np.asarray(event_times, dtype=float))
    left_limits = intensity_at(events, events, bandwidth)
    return float(np.sum(np.log(left_limits + LOG_FLOOR)) - compensator(events, horizon, bandwidth))


def fit_bandwidth(cascade: Cascade, grid: Sequence[float]) -> float:
    """
    Grid-search maximum-likelihood bandwidth

    Ties go to the smallest bandwidth; cascades with at most one event
    return the grid median.
    """
    if len(grid) == 0:
        raise ValueError("Bandwidth grid is empty")
    candidates = sorted(float(theta) for theta in grid)
    if candidates[0] <= 0:
        raise ValueError(f"Bandwidth grid must be positive: {list(grid)}")

    times = cascade.event_times
    if len(times) <= 1:
        return candidates[(len(candidates) - 1) // 2]

    scores = [log_likelihood(times, cascade.duration, theta) for theta in candidates]
    best = int(np.argmax(scores))
    logger.debug(f"Cascade {cascade.id}: bandwidth {candidates[best]} (log-likelihood {scores[best]:.3f})")
    return candidates[best]
