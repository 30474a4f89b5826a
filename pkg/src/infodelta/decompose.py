"""Additive seasonal-trend decomposition of a delta series.

The classic iterative scheme: detrend, smooth each cycle subseries,
remove the low-pass leakage, deseasonalise, re-estimate the trend. The
remainder (observed minus seasonal minus trend) is what anomaly
detection runs on. Optional robustness iterations downweight points
with large remainders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPeriod, SeriesTooShort, WindowTooSmall
from .loess import smooth_at

_DEFAULT_INNER_LOOPS = 2
_DEFAULT_OUTER_LOOPS = 0


@dataclass(frozen=True)
class Decomposition:
    """Observed = seasonal + trend + remainder, all of equal length."""

    observed: np.ndarray
    seasonal: np.ndarray
    trend: np.ndarray
    remainder: np.ndarray
    period: int

    def __post_init__(self):
        for name in ("observed", "seasonal", "trend", "remainder"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        n = len(self.observed)
        if any(len(getattr(self, f)) != n for f in ("seasonal", "trend", "remainder")):
            raise ValueError("all four components must have equal length")

    def __len__(self) -> int:
        return len(self.observed)

    def recomposition_error(self) -> float:
        """Max absolute residual of the additive identity."""
        return float(
            np.max(np.abs(self.observed - (self.seasonal + self.trend + self.remainder)))
        )


def _moving_average(x: np.ndarray, width: int) -> np.ndarray:
    return np.convolve(x, np.full(width, 1.0 / width), mode="valid")


def _seasonal_component(
    detrended: np.ndarray, period: int, seasonal_window: int | None, rho: np.ndarray
) -> np.ndarray:
    """Cycle-subseries smoothing followed by low-pass removal."""
    n = len(detrended)
    # Smooth each cycle subseries and extend it one cycle on both sides
    # so the moving-average cascade below comes back to length n.
    padded = np.empty(n + 2 * period)
    for phase in range(period):
        idx = np.arange(phase, n, period)
        sub = detrended[idx]
        m = len(sub)
        q = m if seasonal_window is None else min(seasonal_window, m)
        degree = 1 if q >= 3 else 0
        eval_pos = np.arange(-1, m + 1)
        smoothed = smooth_at(sub, eval_pos, q, degree, robustness=rho[idx])
        slots = phase + np.arange(-1, m + 1) * period + period
        padded[slots] = smoothed

    lowpass = _moving_average(_moving_average(_moving_average(padded, period), period), 3)
    q_lp = max(period + (1 - period % 2), 3)  # smallest odd window >= period
    q_lp = min(q_lp, len(lowpass))
    lowpass = smooth_at(lowpass, np.arange(len(lowpass)), q_lp, 1)
    return padded[period : period + n] - lowpass


def _robustness_weights(remainder: np.ndarray) -> np.ndarray:
    scale = 6.0 * np.median(np.abs(remainder))
    if scale <= 0.0:
        return np.ones(len(remainder))
    u = np.clip(np.abs(remainder) / scale, 0.0, 1.0)
    return (1.0 - u**2) ** 2


def stl_decompose(
    series,
    period: int,
    trend_window: int,
    inner_loops: int = _DEFAULT_INNER_LOOPS,
    outer_loops: int = _DEFAULT_OUTER_LOOPS,
    seasonal_window: int | None = None,
) -> Decomposition:
    """Split a series into seasonal, trend and remainder components.

    ``period`` is the seasonal cycle length in points (7 for daily data
    with weekly seasonality); pass 0 to disable seasonality entirely,
    in which case the seasonal component is identically zero. The trend
    is a degree-1 local fit over ``trend_window`` points. By default the
    seasonal subseries smoother spans all cycle instances, giving a
    slowly varying per-phase baseline.

    ``outer_loops`` > 0 adds robustness passes that downweight
    large-remainder points in every smoother.
    """
    y = np.asarray(series, dtype=float)
    n = len(y)
    if period < 0 or period == 1:
        raise InvalidPeriod(f"period must be 0 or >= 2, got {period}")
    if n < 3:
        raise SeriesTooShort(f"need at least 3 points, got {n}")
    if period and n < 2 * period:
        raise SeriesTooShort(f"need at least 2 full cycles ({2 * period}), got {n}")
    if trend_window < 3:
        raise WindowTooSmall(f"trend window must be >= 3 points, got {trend_window}")
    if inner_loops < 1:
        raise ValueError("inner_loops must be >= 1")
    if outer_loops < 0:
        raise ValueError("outer_loops must be >= 0")

    q_trend = min(trend_window, n)
    positions = np.arange(n)
    trend = np.zeros(n)
    seasonal = np.zeros(n)
    rho = np.ones(n)

    for outer in range(outer_loops + 1):
        for _ in range(inner_loops):
            detrended = y - trend
            if period:
                seasonal = _seasonal_component(detrended, period, seasonal_window, rho)
            trend = smooth_at(y - seasonal, positions, q_trend, 1, robustness=rho)
        if outer < outer_loops:
            rho = _robustness_weights(y - seasonal - trend)

    remainder = y - seasonal - trend
    return Decomposition(
        observed=y, seasonal=seasonal, trend=trend, remainder=remainder, period=period
    )
