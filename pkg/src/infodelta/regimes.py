"""Five-regime classification and persistence of anomalous episodes.

Anomalous timestamps become Void (demand exceeds supply) or
Overabundance (supply exceeds demand); regular timestamps split into
Lack, Balance and Abundance around a configurable epsilon band. A
persistence run is a maximal stretch of same-sign anomalies, allowed to
bridge short regular interruptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

import numpy as np

from .anomaly import AnomalyResult, Sign
from .errors import TimestampMismatch
from .series import DeltaSeries

DEFAULT_BALANCE_EPSILON = 0.5
DEFAULT_GAP_TOLERANCE = 2


class Regime(Enum):
    VOID = "void"
    LACK = "lack"
    BALANCE = "balance"
    ABUNDANCE = "abundance"
    OVERABUNDANCE = "overabundance"


class MacroState(Enum):
    ANOMALY = "anomaly"
    REGULAR = "regular"


_ANOMALOUS_REGIMES = {Regime.VOID, Regime.OVERABUNDANCE}


@dataclass(frozen=True)
class RegimeLabel:
    timestamp: date
    regime: Regime
    macro_state: MacroState
    delta: float

    @property
    def sign(self) -> Sign:
        if self.regime is Regime.VOID:
            return Sign.NEGATIVE
        if self.regime is Regime.OVERABUNDANCE:
            return Sign.POSITIVE
        return Sign.NONE


@dataclass(frozen=True)
class PersistenceRun:
    """A maximal same-sign anomalous episode.

    ``length`` counts every period from the first to the last anomaly
    inclusive, so bridged regular days inside the run are part of it;
    the unit is the label resolution (days for daily data).
    """

    sign: Sign
    start: date
    end: date
    length: int
    bridged_gaps: int


@dataclass(frozen=True)
class SignSummary:
    count: int
    mean_length: float | None
    max_length: int


@dataclass(frozen=True)
class PersistenceSummary:
    negative: SignSummary
    positive: SignSummary


def classify_regimes(
    delta: DeltaSeries,
    anomalies: AnomalyResult,
    balance_epsilon: float = DEFAULT_BALANCE_EPSILON,
) -> list[RegimeLabel]:
    """Label every timestamp with exactly one of the five regimes.

    Expects the anomaly result to have been signed already: an
    anomalous point with delta exactly zero is a contract violation
    (sign_anomalies reclassifies those as regular).
    """
    if balance_epsilon < 0:
        raise ValueError(f"balance_epsilon must be >= 0, got {balance_epsilon}")
    if len(delta) != len(anomalies):
        raise TimestampMismatch(
            f"delta covers {len(delta)} points, anomalies {len(anomalies)}"
        )
    labels = []
    for i, day in enumerate(delta.dates):
        d = float(delta.deltas[i])
        if anomalies.is_anomaly[i]:
            if d == 0.0:
                raise ValueError(
                    f"anomalous point with zero delta at {day}; run sign_anomalies first"
                )
            regime = Regime.VOID if d < 0 else Regime.OVERABUNDANCE
            macro = MacroState.ANOMALY
        else:
            if d < -balance_epsilon:
                regime = Regime.LACK
            elif d > balance_epsilon:
                regime = Regime.ABUNDANCE
            else:
                regime = Regime.BALANCE
            macro = MacroState.REGULAR
        labels.append(RegimeLabel(timestamp=day, regime=regime, macro_state=macro, delta=d))
    return labels


def persistence_runs(
    labels: list[RegimeLabel], gap_tolerance: int = DEFAULT_GAP_TOLERANCE
) -> list[PersistenceRun]:
    """Collapse same-sign anomalies into maximal runs.

    Regular interruptions of at most ``gap_tolerance`` periods are
    absorbed into the surrounding run and counted in its length; a
    longer interruption, or an anomaly of the opposite sign, ends the
    run. Labels must cover consecutive periods.
    """
    if gap_tolerance < 0:
        raise ValueError(f"gap_tolerance must be >= 0, got {gap_tolerance}")
    runs: list[PersistenceRun] = []
    start = last = -1
    sign = Sign.NONE
    bridged = 0

    def close():
        if sign is not Sign.NONE:
            runs.append(
                PersistenceRun(
                    sign=sign,
                    start=labels[start].timestamp,
                    end=labels[last].timestamp,
                    length=last - start + 1,
                    bridged_gaps=bridged,
                )
            )

    for i, label in enumerate(labels):
        if label.macro_state is not MacroState.ANOMALY:
            continue
        if sign is Sign.NONE:
            start = last = i
            sign = label.sign
            bridged = 0
        elif label.sign is sign and i - last - 1 <= gap_tolerance:
            bridged += i - last - 1
            last = i
        else:
            close()
            start = last = i
            sign = label.sign
            bridged = 0
    close()
    return runs


def _summarise(lengths: list[int]) -> SignSummary:
    if not lengths:
        return SignSummary(count=0, mean_length=None, max_length=0)
    return SignSummary(
        count=len(lengths),
        mean_length=float(np.mean(lengths)),
        max_length=max(lengths),
    )


def persistence_summary(runs: list[PersistenceRun]) -> PersistenceSummary:
    """Per-sign run count, mean length and maximum length."""
    return PersistenceSummary(
        negative=_summarise([r.length for r in runs if r.sign is Sign.NEGATIVE]),
        positive=_summarise([r.length for r in runs if r.sign is Sign.POSITIVE]),
    )
