"""Exception types raised by the infodelta pipeline.

Validation problems raise one of these instead of a bare ValueError so
callers (and the CLI exit-code mapping) can tell bad input apart from
bugs.
"""


class InfoDeltaError(Exception):
    """Base class for all infodelta errors."""


# --- series construction / transforms ---------------------------------

class EmptySeries(InfoDeltaError):
    """Series has fewer than two points."""


class ZeroMeanSeries(InfoDeltaError):
    """All values are zero, so rescaling by the mean is undefined."""


class NoOverlap(InfoDeltaError):
    """Supply and demand share fewer than two timestamps."""


class ResolutionMismatch(InfoDeltaError):
    """Operands have different temporal resolutions."""


class AlreadyWeekly(InfoDeltaError):
    """Weekly aggregation requested on a series that is already weekly."""


class ZeroMaxSeries(InfoDeltaError):
    """0-100 normalisation requested on a series whose maximum is zero."""


# --- smoothing / decomposition -----------------------------------------

class WindowTooSmall(InfoDeltaError):
    """Loess window resolves to fewer points than the fit needs."""


class SeriesTooShort(InfoDeltaError):
    """Series is too short for the requested operation."""


class InvalidPeriod(InfoDeltaError):
    """Seasonal period must be 0 (disabled) or an integer >= 2."""


# --- anomaly detection ---------------------------------------------------

class EmptySample(InfoDeltaError):
    """Quantile of an empty sample."""


class TimestampMismatch(InfoDeltaError):
    """Two aligned inputs do not cover the same timestamps."""


# --- benchmark -----------------------------------------------------------

class CountExceedsLength(InfoDeltaError):
    """More injection points requested than the series has."""


# --- analytics -----------------------------------------------------------

class LengthMismatch(InfoDeltaError):
    """Paired sequences have different lengths."""


class ZeroVariance(InfoDeltaError):
    """Correlation of a constant sequence is undefined."""


class ScoreOutOfRange(InfoDeltaError):
    """Credibility score outside [0, 100]."""


class EmptyJoin(InfoDeltaError):
    """No post matched any credibility rating."""


# --- ingestion / reporting ------------------------------------------------

class MalformedRow(InfoDeltaError):
    """CSV row failed validation; message carries the line number."""


class DuplicateTimestamp(InfoDeltaError):
    """Same (series_id, date) appears twice in the input."""


class NegativeValue(InfoDeltaError):
    """Counts must be non-negative."""


class UnknownRole(InfoDeltaError):
    """Role column must be 'supply' or 'demand'."""


class ResolutionPairUnsupported(InfoDeltaError):
    """No harmonisation rule for this supply/demand resolution pair."""


class IoFailure(InfoDeltaError):
    """Report or figure could not be written."""
