"""Core time-series containers and the supply/demand transforms.

A :class:`TimeSeries` is one stream of non-negative daily or weekly
counts. Supply and demand streams are made comparable by rescaling each
by its own mean, and their per-timestamp difference (the delta series)
is the signal everything downstream works on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import (
    AlreadyWeekly,
    EmptySeries,
    NoOverlap,
    ResolutionMismatch,
    ZeroMaxSeries,
    ZeroMeanSeries,
)


class Role(Enum):
    SUPPLY = "supply"
    DEMAND = "demand"


class Resolution(Enum):
    DAILY = "daily"
    WEEKLY = "weekly"

    @property
    def step(self) -> timedelta:
        return timedelta(days=1 if self is Resolution.DAILY else 7)


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)  # fresh copy; callers keep their own
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """One (role, source, region, topic) stream of counts.

    Timestamps are strictly increasing calendar dates; values are
    non-negative reals (integer counts are widened on construction).
    ``imputed`` marks gap-filled points, ``partial`` marks weekly sums
    built from fewer than seven days.
    """

    id: str
    role: Role
    source: str
    region: str
    topic: str
    resolution: Resolution
    dates: tuple[date, ...]
    values: np.ndarray
    imputed: np.ndarray = field(default=None)  # type: ignore[assignment]
    partial: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if len(self.dates) != len(self.values):
            raise ValueError("dates and values must have equal length")
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise ValueError(f"timestamps must be strictly increasing ({a!r} -> {b!r})")
        if len(self.values) and float(np.min(self.values)) < 0:
            raise ValueError("values must be non-negative")
        for name in ("imputed", "partial"):
            flags = getattr(self, name)
            if flags is None:
                flags = np.zeros(len(self.dates), dtype=bool)
            object.__setattr__(self, name, _frozen_array(flags, dtype=bool))
            if len(getattr(self, name)) != len(self.dates):
                raise ValueError(f"{name} flags must match series length")

    def __len__(self) -> int:
        return len(self.dates)

    def is_contiguous(self) -> bool:
        """True when consecutive timestamps differ by exactly one step."""
        step = self.resolution.step
        return all(b - a == step for a, b in zip(self.dates, self.dates[1:]))

    def window(self, start: date | None = None, end: date | None = None) -> "TimeSeries":
        """Restrict to dates in [start, end] (either bound optional)."""
        keep = [
            i
            for i, d in enumerate(self.dates)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return replace(
            self,
            dates=tuple(self.dates[i] for i in keep),
            values=self.values[keep],
            imputed=self.imputed[keep],
            partial=self.partial[keep],
        )


@dataclass(frozen=True)
class RescaledSeries:
    """A series divided by its own mean; dimensionless, mean 1."""

    base: TimeSeries
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _frozen_array(self.values))

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def resolution(self) -> Resolution:
        return self.base.resolution


@dataclass(frozen=True)
class DeltaSeries:
    """Per-timestamp imbalance: rescaled supply minus rescaled demand.

    Defined on the intersection of the two parent series' timestamps;
    the number of points dropped from either side is kept as a coverage
    summary.
    """

    supply_id: str
    demand_id: str
    resolution: Resolution
    dates: tuple[date, ...]
    deltas: np.ndarray
    supply_rescaled: np.ndarray
    demand_rescaled: np.ndarray
    dropped_supply: int = 0
    dropped_demand: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        for name in ("deltas", "supply_rescaled", "demand_rescaled"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
            if len(getattr(self, name)) != len(self.dates):
                raise ValueError(f"{name} must match the timestamp count")

    def __len__(self) -> int:
        return len(self.dates)


def rescale(series: TimeSeries) -> RescaledSeries:
    """Divide every value by the series mean over the full window.

    The mean is taken over the whole observation window, not rolling,
    so the output is scale-free with mean exactly 1: shape is preserved
    and rescale(c * x) == rescale(x) for any c > 0.
    """
    if len(series) < 2:
        raise EmptySeries(f"series {series.id!r} has {len(series)} point(s); need >= 2")
    mean = float(np.mean(series.values))
    if mean <= 0.0:
        raise ZeroMeanSeries(f"series {series.id!r} has zero mean; cannot rescale")
    return RescaledSeries(base=series, dates=series.dates, values=series.values / mean)


def compute_delta(supply: RescaledSeries, demand: RescaledSeries) -> DeltaSeries:
    """Supply minus demand on their common timestamps.

    Positive deltas mean supply outpaces demand; negative deltas mean
    demand outpaces supply. Timestamps present on only one side are
    dropped and counted in the coverage summary.
    """
    if supply.resolution is not demand.resolution:
        raise ResolutionMismatch(
            f"supply is {supply.resolution.value}, demand is {demand.resolution.value}"
        )
    demand_index = {d: i for i, d in enumerate(demand.dates)}
    common = [(i, demand_index[d]) for i, d in enumerate(supply.dates) if d in demand_index]
    if len(common) < 2:
        raise NoOverlap(
            f"series {supply.base.id!r} and {demand.base.id!r} share "
            f"{len(common)} timestamp(s); need >= 2"
        )
    sup_idx = [i for i, _ in common]
    dem_idx = [j for _, j in common]
    s = supply.values[sup_idx]
    d = demand.values[dem_idx]
    return DeltaSeries(
        supply_id=supply.base.id,
        demand_id=demand.base.id,
        resolution=supply.resolution,
        dates=tuple(supply.dates[i] for i in sup_idx),
        deltas=s - d,
        supply_rescaled=s,
        demand_rescaled=d,
        dropped_supply=len(supply) - len(common),
        dropped_demand=len(demand) - len(common),
    )


def week_start(day: date, week_starts_monday: bool = True) -> date:
    """First day of the week containing ``day`` (ISO Monday by default)."""
    offset = day.weekday() if week_starts_monday else (day.weekday() + 1) % 7
    return day - timedelta(days=offset)


def aggregate_weekly(series: TimeSeries, week_starts_monday: bool = True) -> TimeSeries:
    """Sum a daily series into calendar weeks.

    Weeks with fewer than seven contributing days (typically the first
    and last) are flagged ``partial``. The week convention defaults to
    ISO (Monday start); pass ``week_starts_monday=False`` for
    Sunday-anchored weeks.
    """
    if series.resolution is Resolution.WEEKLY:
        raise AlreadyWeekly(f"series {series.id!r} is already weekly")
    sums: dict[date, float] = {}
    counts: dict[date, int] = {}
    for day, value in zip(series.dates, series.values):
        wk = week_start(day, week_starts_monday)
        sums[wk] = sums.get(wk, 0.0) + float(value)
        counts[wk] = counts.get(wk, 0) + 1
    weeks = sorted(sums)
    return TimeSeries(
        id=series.id,
        role=series.role,
        source=series.source,
        region=series.region,
        topic=series.topic,
        resolution=Resolution.WEEKLY,
        dates=tuple(weeks),
        values=np.array([sums[w] for w in weeks]),
        partial=np.array([counts[w] < 7 for w in weeks]),
    )


def normalize_weekly_0_100(series: TimeSeries) -> TimeSeries:
    """Floor-normalise a weekly series so its maximum maps to 100.

    Each value becomes floor(v / max * 100), an integer in [0, 100];
    the maximum always maps to exactly 100. The ratio is evaluated in
    exact rational arithmetic so the floor never flips on a float
    rounding artefact.
    """
    if series.resolution is not Resolution.WEEKLY:
        raise ResolutionMismatch(f"series {series.id!r} is not weekly")
    if len(series) == 0:
        raise EmptySeries(f"series {series.id!r} is empty")
    peak = float(np.max(series.values))
    if peak <= 0.0:
        raise ZeroMaxSeries(f"series {series.id!r} has max 0; cannot normalise")
    peak_frac = Fraction(peak)
    scaled = [float(math.floor(Fraction(float(v)) * 100 / peak_frac)) for v in series.values]
    return replace(series, values=np.array(scaled))


def fill_gaps(series: TimeSeries) -> TimeSeries:
    """Make a series contiguous by linear interpolation of interior gaps.

    Interpolated points are flagged ``imputed``. Leading and trailing
    gaps do not exist relative to the series' own span, so nothing is
    ever extrapolated.
    """
    if len(series) < 2 or series.is_contiguous():
        return series
    step = series.resolution.step
    full_dates: list[date] = []
    day = series.dates[0]
    while day <= series.dates[-1]:
        full_dates.append(day)
        day += step
    known = {d: i for i, d in enumerate(series.dates)}
    positions = np.array([(d - series.dates[0]) // step for d in series.dates], dtype=float)
    grid = np.arange(len(full_dates), dtype=float)
    values = np.interp(grid, positions, series.values)
    imputed = np.array([d not in known for d in full_dates])
    partial = np.array([series.partial[known[d]] if d in known else False for d in full_dates])
    return replace(
        series,
        dates=tuple(full_dates),
        values=values,
        imputed=imputed,
        partial=partial,
    )
