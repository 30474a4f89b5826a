"""Demand/supply co-movement and credibility-score distributions.

Two small analyses on top of the pipeline output: the lag-0 Pearson
correlation between a demand and a supply series, and the distribution
of post credibility scores across non-anomalous, void and overabundant
periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyJoin, LengthMismatch, ScoreOutOfRange, ZeroVariance
from .regimes import MacroState, Regime, RegimeLabel


def cross_correlation_lag0(a, b) -> float:
    """Pearson correlation of two aligned series.

    Symmetric, bounded in [-1, 1], and invariant under positive affine
    transforms of either argument.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if len(x) != len(y):
        raise LengthMismatch(f"series lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatch(f"need >= 2 points, got {len(x)}")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(float(xc @ xc))
    sy = math.sqrt(float(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("correlation of a constant series is undefined")
    r = float(xc @ yc) / (sx * sy)
    return min(1.0, max(-1.0, r))


class ScoreBucket(Enum):
    """Credibility score bands, top to bottom.

    A perfect 100 stands alone; below it the bands are [75, 100),
    [60, 75), [40, 60) and [0, 40), so fractional scores fall into the
    lower band at each boundary.
    """

    TOP = "top"
    HIGH = "high"
    MODERATE = "moderate"
    CAUTION = "caution"
    MAX_CAUTION = "max_caution"


def bucket_score(score: float) -> ScoreBucket:
    """Map a 0-100 credibility score to its bucket."""
    if not 0.0 <= score <= 100.0:
        raise ScoreOutOfRange(f"score must be in [0, 100], got {score}")
    if score == 100.0:
        return ScoreBucket.TOP
    if score >= 75.0:
        return ScoreBucket.HIGH
    if score >= 60.0:
        return ScoreBucket.MODERATE
    if score >= 40.0:
        return ScoreBucket.CAUTION
    return ScoreBucket.MAX_CAUTION


@dataclass(frozen=True)
class CredibilityRating:
    domain: str
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 100.0:
            raise ScoreOutOfRange(f"score must be in [0, 100], got {self.score}")


@dataclass(frozen=True)
class PostRecord:
    timestamp: date
    domain: str
    platform: str
    region: str = ""
    topic: str = ""


class AnomalyState(Enum):
    NON_ANOMALY = "non_anomaly"
    NEGATIVE_ANOMALY = "negative_anomaly"
    POSITIVE_ANOMALY = "positive_anomaly"


def _state_of(label: RegimeLabel) -> AnomalyState:
    if label.macro_state is MacroState.REGULAR:
        return AnomalyState.NON_ANOMALY
    if label.regime is Regime.VOID:
        return AnomalyState.NEGATIVE_ANOMALY
    return AnomalyState.POSITIVE_ANOMALY


def normalize_domain(raw: str) -> str:
    """Lowercase a domain and strip any scheme, path, port or userinfo.

    Matching is exact on the remaining host; no public-suffix or
    www-prefix guessing.
    """
    s = raw.strip().lower()
    if "://" in s:
        s = s.split("://", 1)[1]
    s = s.split("/", 1)[0].split("?", 1)[0].split("#", 1)[0]
    if "@" in s:
        s = s.rsplit("@", 1)[1]
    if ":" in s:
        s = s.split(":", 1)[0]
    return s


def share_percentages(counts: Mapping[ScoreBucket, int]) -> dict[ScoreBucket, float]:
    """Bucket shares as percentages that sum to exactly 100.00.

    Rounded to two decimals by largest remainder, so a row never gains
    or loses mass to rounding.
    """
    total = sum(counts.values())
    if total == 0:
        return {b: 0.0 for b in ScoreBucket}
    hundredths = {}
    remainders = {}
    for bucket in ScoreBucket:
        exact = counts.get(bucket, 0) * 10000 / total
        hundredths[bucket] = math.floor(exact)
        remainders[bucket] = exact - math.floor(exact)
    leftover = 10000 - sum(hundredths.values())
    for bucket in sorted(ScoreBucket, key=lambda b: -remainders[b])[:leftover]:
        hundredths[bucket] += 1
    return {b: hundredths[b] / 100.0 for b in ScoreBucket}


@dataclass(frozen=True)
class QualityRow:
    platform: str
    state: AnomalyState
    post_count: int
    percentages: dict[ScoreBucket, float]
    counts: dict[ScoreBucket, int]


@dataclass(frozen=True)
class QualityTable:
    rows: tuple[QualityRow, ...]
    total_posts: int
    included_posts: int
    excluded_unrated: int
    excluded_unlabelled: int
    excluded_before_window: int
    window_start: date | None


def quality_by_anomaly_state(
    posts: Sequence[PostRecord],
    ratings: Mapping[str, float],
    labels: Iterable[RegimeLabel],
    window_start: date | None = None,
) -> QualityTable:
    """Distribution of post credibility per platform and anomaly state.

    Posts before ``window_start``, posts on days without a regime
    label, and posts whose domain has no rating are excluded and
    tallied. Each remaining (platform, state) row reports the share of
    posts per score bucket, summing to 100%.
    """
    rating_index = {normalize_domain(dom): score for dom, score in ratings.items()}
    state_by_date = {label.timestamp: _state_of(label) for label in labels}

    counts: dict[tuple[str, AnomalyState], dict[ScoreBucket, int]] = {}
    n_unrated = n_unlabelled = n_windowed = 0
    for post in posts:
        if window_start is not None and post.timestamp < window_start:
            n_windowed += 1
            continue
        state = state_by_date.get(post.timestamp)
        if state is None:
            n_unlabelled += 1
            continue
        score = rating_index.get(normalize_domain(post.domain))
        if score is None:
            n_unrated += 1
            continue
        key = (post.platform, state)
        counts.setdefault(key, {b: 0 for b in ScoreBucket})
        counts[key][bucket_score(score)] += 1

    included = sum(sum(c.values()) for c in counts.values())
    if included == 0:
        raise EmptyJoin("no post matched a rated domain inside the labelled window")

    rows = []
    for platform in sorted({p for p, _ in counts}):
        for state in AnomalyState:
            bucket_counts = counts.get((platform, state))
            if bucket_counts is None:
                continue
            rows.append(
                QualityRow(
                    platform=platform,
                    state=state,
                    post_count=sum(bucket_counts.values()),
                    percentages=share_percentages(bucket_counts),
                    counts=dict(bucket_counts),
                )
            )
    return QualityTable(
        rows=tuple(rows),
        total_posts=len(posts),
        included_posts=included,
        excluded_unrated=n_unrated,
        excluded_unlabelled=n_unlabelled,
        excluded_before_window=n_windowed,
        window_start=window_start,
    )
