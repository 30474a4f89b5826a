"""End-to-end analysis: two ingested streams in, a labelled report out.

Chains the whole pipeline (window, gap-fill, harmonise resolutions,
rescale, delta, decompose, detect, sign, classify, persistence) with
every tunable carried in one config object that the report echoes back,
so a report can always be reproduced from its own metadata.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import date

import numpy as np

from .anomaly import AnomalyConfig, AnomalyResult, detect_anomalies, sign_anomalies
from .decompose import Decomposition, stl_decompose
from .errors import ResolutionPairUnsupported
from .regimes import (
    DEFAULT_BALANCE_EPSILON,
    DEFAULT_GAP_TOLERANCE,
    PersistenceRun,
    PersistenceSummary,
    RegimeLabel,
    classify_regimes,
    persistence_runs,
    persistence_summary,
)
from .series import (
    DeltaSeries,
    Resolution,
    TimeSeries,
    aggregate_weekly,
    compute_delta,
    fill_gaps,
    normalize_weekly_0_100,
    rescale,
)

DAILY_TREND_WINDOW = 91   # three months of daily points
WEEKLY_TREND_WINDOW = 13  # three months of weekly points
DAILY_PERIOD = 7          # weekly seasonality for daily data
WEEKLY_PERIOD = 0         # no sub-annual seasonality assumed for weekly data
DEFAULT_DELTA_CAP = 10.0


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the analysis run.

    ``seasonal_period`` and ``trend_window`` default to None, meaning
    "pick by resolution": period 7 / window 91 for daily data, period 0
    / window 13 for weekly. ``delta_cap`` only clips the value written
    to the capped display column, never the analysis itself.
    """

    alpha: float = 0.05
    max_anoms: float = 0.10
    seasonal_period: int | None = None
    trend_window: int | None = None
    stl_inner_loops: int = 2
    stl_outer_loops: int = 0
    gap_tolerance: int = DEFAULT_GAP_TOLERANCE
    balance_epsilon: float = DEFAULT_BALANCE_EPSILON
    week_starts_monday: bool = True
    window_start: date | None = None
    window_end: date | None = None
    delta_cap: float = DEFAULT_DELTA_CAP

    def __post_init__(self):
        if self.window_start and self.window_end and self.window_start >= self.window_end:
            raise ValueError("window_start must be before window_end")
        if self.delta_cap <= 0:
            raise ValueError("delta_cap must be positive")
        AnomalyConfig(alpha=self.alpha, max_anoms=self.max_anoms)  # range checks

    def resolved_period(self, resolution: Resolution) -> int:
        if self.seasonal_period is not None:
            return self.seasonal_period
        return DAILY_PERIOD if resolution is Resolution.DAILY else WEEKLY_PERIOD

    def resolved_trend_window(self, resolution: Resolution) -> int:
        if self.trend_window is not None:
            return self.trend_window
        return DAILY_TREND_WINDOW if resolution is Resolution.DAILY else WEEKLY_TREND_WINDOW

    def anomaly_config(self) -> AnomalyConfig:
        return AnomalyConfig(alpha=self.alpha, max_anoms=self.max_anoms)

    def echo(self) -> dict:
        d = asdict(self)
        d["window_start"] = self.window_start.isoformat() if self.window_start else None
        d["window_end"] = self.window_end.isoformat() if self.window_end else None
        return d


@dataclass(frozen=True)
class StreamInfo:
    """Provenance of one input stream as it entered the delta."""

    series_id: str
    source: str
    region: str
    topic: str
    resolution: str
    points: int
    imputed_points: int
    partial_weeks: int
    aggregated_from_daily: bool = False
    normalized_0_100: bool = False


@dataclass(frozen=True)
class AnalysisSummary:
    total_points: int
    anomaly_count: int
    anomaly_pct: float
    positive_pct: float
    negative_pct: float
    persistence: PersistenceSummary
    persistence_unit: str


@dataclass(frozen=True)
class AnalysisReport:
    config: PipelineConfig
    supply: StreamInfo
    demand: StreamInfo
    delta: DeltaSeries
    decomposition: Decomposition
    anomalies: AnomalyResult
    labels: list[RegimeLabel] = field(repr=False)
    runs: list[PersistenceRun] = field(repr=False)
    summary: AnalysisSummary = None  # type: ignore[assignment]


def _prepare(series: TimeSeries, config: PipelineConfig) -> TimeSeries:
    windowed = series.window(config.window_start, config.window_end)
    return fill_gaps(windowed)


def _stream_info(series: TimeSeries, aggregated: bool = False, normalized: bool = False) -> StreamInfo:
    return StreamInfo(
        series_id=series.id,
        source=series.source,
        region=series.region,
        topic=series.topic,
        resolution=series.resolution.value,
        points=len(series),
        imputed_points=int(series.imputed.sum()),
        partial_weeks=int(series.partial.sum()),
        aggregated_from_daily=aggregated,
        normalized_0_100=normalized,
    )


def harmonize_resolutions(
    supply: TimeSeries, demand: TimeSeries, config: PipelineConfig
) -> tuple[TimeSeries, TimeSeries, StreamInfo, StreamInfo]:
    """Bring a supply/demand pair onto one resolution.

    Daily/daily passes through. Weekly demand (a 0-100 search-interest
    index) pulls the supply onto its scale: daily supply is summed into
    weeks, then floor-normalised so its peak week reads 100. Weekly
    supply against daily demand has no defined harmonisation.
    """
    if demand.resolution is Resolution.DAILY:
        if supply.resolution is not Resolution.DAILY:
            raise ResolutionPairUnsupported(
                "weekly supply against daily demand is not supported"
            )
        return supply, demand, _stream_info(supply), _stream_info(demand)

    aggregated = False
    if supply.resolution is Resolution.DAILY:
        supply = fill_gaps(aggregate_weekly(supply, config.week_starts_monday))
        aggregated = True
    supply = normalize_weekly_0_100(supply)
    return (
        supply,
        demand,
        _stream_info(supply, aggregated=aggregated, normalized=True),
        _stream_info(demand),
    )


def run_analysis(
    supply: TimeSeries, demand: TimeSeries, config: PipelineConfig | None = None
) -> AnalysisReport:
    """Run the full detection pipeline on one supply/demand pair."""
    config = config or PipelineConfig()
    supply = _prepare(supply, config)
    demand = _prepare(demand, config)
    supply, demand, supply_info, demand_info = harmonize_resolutions(supply, demand, config)

    delta = compute_delta(rescale(supply), rescale(demand))
    resolution = delta.resolution
    decomposition = stl_decompose(
        delta.deltas,
        period=config.resolved_period(resolution),
        trend_window=config.resolved_trend_window(resolution),
        inner_loops=config.stl_inner_loops,
        outer_loops=config.stl_outer_loops,
    )
    anomalies = sign_anomalies(detect_anomalies(decomposition, config.anomaly_config()), delta)
    labels = classify_regimes(delta, anomalies, config.balance_epsilon)
    runs = persistence_runs(labels, config.gap_tolerance)

    n = len(delta)
    n_anom = anomalies.anomaly_count
    n_pos = int((anomalies.anomaly_sign > 0).sum())
    n_neg = int((anomalies.anomaly_sign < 0).sum())
    summary = AnalysisSummary(
        total_points=n,
        anomaly_count=n_anom,
        anomaly_pct=100.0 * n_anom / n,
        positive_pct=100.0 * n_pos / n,
        negative_pct=100.0 * n_neg / n,
        persistence=persistence_summary(runs),
        persistence_unit="days" if resolution is Resolution.DAILY else "weeks",
    )
    return AnalysisReport(
        config=config,
        supply=supply_info,
        demand=demand_info,
        delta=delta,
        decomposition=decomposition,
        anomalies=anomalies,
        labels=labels,
        runs=runs,
        summary=summary,
    )


def capped_deltas(report: AnalysisReport) -> np.ndarray:
    """Delta clipped to +-delta_cap, for display columns and plots only."""
    cap = report.config.delta_cap
    return np.clip(report.delta.deltas, -cap, cap)
