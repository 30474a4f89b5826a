"""Interquartile-range anomaly detection on the decomposition remainder.

Limits are quartiles of the remainder pushed out by a multiple of the
IQR; points strictly outside are anomaly candidates, ranked by how far
they exceed the nearer limit, and only a capped fraction of the series
may be flagged. The limits are also recomposed onto the observed scale
so reports can draw tolerance bands around the raw delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from .decompose import Decomposition
from .errors import EmptySample, SeriesTooShort, TimestampMismatch
from .series import DeltaSeries

DEFAULT_ALPHA = 0.05
DEFAULT_MAX_ANOMS = 0.10


class Sign(Enum):
    POSITIVE = 1
    NEGATIVE = -1
    NONE = 0

    @property
    def label(self) -> str:
        return {1: "positive", -1: "negative", 0: ""}[self.value]


def default_threshold_multiplier(alpha: float) -> float:
    """Width multiplier k(alpha) = 0.15 / alpha.

    At the default alpha = 0.05 this is the conventional 3 * IQR rule;
    smaller alpha widens the band and flags less.
    """
    return 0.15 / alpha


@dataclass(frozen=True)
class AnomalyConfig:
    alpha: float = DEFAULT_ALPHA
    max_anoms: float = DEFAULT_MAX_ANOMS
    k_of_alpha: Callable[[float], float] = field(default=default_threshold_multiplier)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.max_anoms <= 1.0:
            raise ValueError(f"max_anoms must be in (0, 1], got {self.max_anoms}")
        if self.k_of_alpha(self.alpha) <= 0.0:
            raise ValueError("k(alpha) must be positive")


@dataclass(frozen=True)
class AnomalyResult:
    """Per-timestamp anomaly flags plus the bands they were judged by.

    ``severity_rank`` is 1 for the most extreme anomaly and increases
    from there; 0 marks points that are not flagged. ``anomaly_sign``
    holds +1/-1 once :func:`sign_anomalies` has run, 0 before that and
    for regular points.
    """

    remainder: np.ndarray
    lower_limit: float
    upper_limit: float
    recomposed_l1: np.ndarray
    recomposed_l2: np.ndarray
    is_anomaly: np.ndarray
    anomaly_sign: np.ndarray
    severity_rank: np.ndarray

    def __post_init__(self):
        n = len(self.remainder)
        for name in ("remainder", "recomposed_l1", "recomposed_l2"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name, dtype in (("is_anomaly", bool), ("anomaly_sign", np.int8),
                            ("severity_rank", int)):
            arr = np.array(getattr(self, name), dtype=dtype)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name in ("recomposed_l1", "recomposed_l2", "is_anomaly",
                     "anomaly_sign", "severity_rank"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must match the remainder length")

    def __len__(self) -> int:
        return len(self.remainder)

    @property
    def anomaly_count(self) -> int:
        return int(self.is_anomaly.sum())

    def sign_at(self, i: int) -> Sign:
        return Sign(int(self.anomaly_sign[i]))


def quantile(sample, p: float) -> float:
    """Empirical quantile with linear interpolation between order stats.

    Interpolates at rank h = (n - 1) * p + 1 (1-based), the common
    default in statistical software; pinned explicitly here because the
    detection thresholds, and with them the whole benchmark, depend on
    it.
    """
    values = np.sort(np.asarray(sample, dtype=float))
    n = len(values)
    if n == 0:
        raise EmptySample("quantile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    h = (n - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, n - 1)
    frac = h - lo
    return float(values[lo] + frac * (values[hi] - values[lo]))


def detect_anomalies(decomposition: Decomposition, config: AnomalyConfig) -> AnomalyResult:
    """Flag remainder points strictly outside the IQR band.

    Candidates beyond [Q1 - k*IQR, Q3 + k*IQR] are ranked by distance
    past the violated limit (ties broken by earlier position) and at
    most ceil(max_anoms * T) survive. Band limits are recomposed onto
    the observed scale as seasonal + trend + limit.
    """
    remainder = decomposition.remainder
    n = len(remainder)
    if n < 4:
        raise SeriesTooShort(f"need >= 4 points for quartiles, got {n}")
    q1 = quantile(remainder, 0.25)
    q3 = quantile(remainder, 0.75)
    spread = q3 - q1
    k = config.k_of_alpha(config.alpha)
    lower = q1 - k * spread
    upper = q3 + k * spread

    excess = np.zeros(n)
    below = remainder < lower
    above = remainder > upper
    excess[below] = lower - remainder[below]
    excess[above] = remainder[above] - upper

    candidates = np.flatnonzero(excess > 0.0)
    ranked = sorted(candidates, key=lambda i: (-excess[i], i))
    cap = math.ceil(config.max_anoms * n)
    kept = ranked[:cap]

    is_anomaly = np.zeros(n, dtype=bool)
    severity = np.zeros(n, dtype=int)
    for rank, i in enumerate(kept, start=1):
        is_anomaly[i] = True
        severity[i] = rank

    baseline = decomposition.seasonal + decomposition.trend
    return AnomalyResult(
        remainder=remainder,
        lower_limit=lower,
        upper_limit=upper,
        recomposed_l1=baseline + lower,
        recomposed_l2=baseline + upper,
        is_anomaly=is_anomaly,
        anomaly_sign=np.zeros(n, dtype=np.int8),
        severity_rank=severity,
    )


def sign_anomalies(result: AnomalyResult, delta: DeltaSeries) -> AnomalyResult:
    """Assign each anomaly the sign of its delta value.

    Detection runs on the remainder, but the void/overabundance
    polarity is the sign of the delta itself. An anomalous point whose
    delta is exactly zero is reclassified as regular. Inputs are
    aligned positionally; the pipeline builds both from the same delta
    series.
    """
    if len(result) != len(delta):
        raise TimestampMismatch(
            f"anomaly result covers {len(result)} points, delta {len(delta)}"
        )
    signs = np.zeros(len(result), dtype=np.int8)
    is_anomaly = np.array(result.is_anomaly)
    severity = np.array(result.severity_rank)
    for i in np.flatnonzero(result.is_anomaly):
        d = float(delta.deltas[i])
        if d > 0:
            signs[i] = 1
        elif d < 0:
            signs[i] = -1
        else:
            is_anomaly[i] = False
            severity[i] = 0
    return replace(result, is_anomaly=is_anomaly, anomaly_sign=signs, severity_rank=severity)
