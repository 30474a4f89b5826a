"""Detect information voids and overabundance in supply/demand streams.

The library quantifies the imbalance between how much content is
produced on a topic (supply) and how much people look for it (demand),
flags statistically exceptional imbalances, classifies every timestamp
into one of five regimes, and measures how long anomalous episodes
persist. A synthetic benchmark scores the whole detection chain against
injected ground truth.
"""

from .anomaly import (
    AnomalyConfig,
    AnomalyResult,
    Sign,
    default_threshold_multiplier,
    detect_anomalies,
    quantile,
    sign_anomalies,
)
from .analytics import (
    AnomalyState,
    CredibilityRating,
    PostRecord,
    QualityTable,
    ScoreBucket,
    bucket_score,
    cross_correlation_lag0,
    quality_by_anomaly_state,
)
from .benchmark import (
    BenchmarkReport,
    GroundTruth,
    InjectionTarget,
    SynthConfig,
    generate_base_pair,
    inject_anomalies,
    run_benchmark,
    score_detection,
)
from .decompose import Decomposition, stl_decompose
from .ingest import ingest_csv, load_posts_csv, load_ratings_csv
from .loess import LoessConfig, loess_smooth
from .pipeline import AnalysisReport, PipelineConfig, run_analysis
from .regimes import (
    MacroState,
    PersistenceRun,
    Regime,
    RegimeLabel,
    classify_regimes,
    persistence_runs,
    persistence_summary,
)
from .series import (
    DeltaSeries,
    RescaledSeries,
    Resolution,
    Role,
    TimeSeries,
    aggregate_weekly,
    compute_delta,
    fill_gaps,
    normalize_weekly_0_100,
    rescale,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AnomalyConfig",
    "AnomalyResult",
    "AnomalyState",
    "BenchmarkReport",
    "CredibilityRating",
    "Decomposition",
    "DeltaSeries",
    "GroundTruth",
    "InjectionTarget",
    "LoessConfig",
    "MacroState",
    "PersistenceRun",
    "PipelineConfig",
    "PostRecord",
    "QualityTable",
    "Regime",
    "RegimeLabel",
    "RescaledSeries",
    "Resolution",
    "Role",
    "ScoreBucket",
    "Sign",
    "SynthConfig",
    "TimeSeries",
    "aggregate_weekly",
    "bucket_score",
    "classify_regimes",
    "compute_delta",
    "cross_correlation_lag0",
    "default_threshold_multiplier",
    "detect_anomalies",
    "fill_gaps",
    "generate_base_pair",
    "ingest_csv",
    "inject_anomalies",
    "load_posts_csv",
    "load_ratings_csv",
    "loess_smooth",
    "normalize_weekly_0_100",
    "persistence_runs",
    "persistence_summary",
    "quality_by_anomaly_state",
    "quantile",
    "rescale",
    "run_analysis",
    "run_benchmark",
    "score_detection",
    "sign_anomalies",
    "stl_decompose",
]
