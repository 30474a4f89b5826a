"""CSV ingestion for count streams, credibility ratings and posts.

The stream schema is long-format:
``series_id,role,source,region,topic,date,value`` with ISO dates and
non-negative values. Every validation error carries the offending line
number.
"""

from __future__ import annotations

import csv
from datetime import date, datetime
from pathlib import Path

import numpy as np

from .analytics import PostRecord
from .errors import (
    DuplicateTimestamp,
    IoFailure,
    MalformedRow,
    NegativeValue,
    ScoreOutOfRange,
    UnknownRole,
)
from .pipeline import PipelineConfig
from .series import Resolution, Role, TimeSeries

STREAM_HEADER = ["series_id", "role", "source", "region", "topic", "date", "value"]
RATINGS_HEADER = ["domain", "score"]
POSTS_HEADER = ["timestamp", "domain", "platform", "region", "topic"]


def _parse_date(text: str, lineno: int, column: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise MalformedRow(f"line {lineno}: {column} {text!r} is not an ISO date") from None


def _read_rows(path, expected_header: list[str]):
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: file is empty") from None
        if [h.strip() for h in header] != expected_header:
            raise MalformedRow(
                f"line 1: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        yield from ((lineno, row) for lineno, row in enumerate(reader, start=2))


def _infer_resolution(dates: list[date]) -> Resolution:
    # A series whose points are all exactly whole weeks apart reads as
    # weekly; anything denser or irregular is treated as daily with gaps.
    if len(dates) < 2:
        return Resolution.DAILY
    gaps = [(b - a).days for a, b in zip(dates, dates[1:])]
    if min(gaps) >= 7 and all(g % 7 == 0 for g in gaps):
        return Resolution.WEEKLY
    return Resolution.DAILY


def ingest_csv(path) -> dict[str, TimeSeries]:
    """Load every stream from a long-format CSV, keyed by series id."""
    rows_by_id: dict[str, dict] = {}
    for lineno, row in _read_rows(path, STREAM_HEADER):
        if len(row) != len(STREAM_HEADER):
            raise MalformedRow(
                f"line {lineno}: expected {len(STREAM_HEADER)} fields, got {len(row)}"
            )
        series_id, role_text, source, region, topic, date_text, value_text = (
            f.strip() for f in row
        )
        if not series_id:
            raise MalformedRow(f"line {lineno}: empty series_id")
        try:
            role = Role(role_text.lower())
        except ValueError:
            raise UnknownRole(
                f"line {lineno}: role must be 'supply' or 'demand', got {role_text!r}"
            ) from None
        day = _parse_date(date_text, lineno, "date")
        try:
            value = float(value_text)
        except ValueError:
            raise MalformedRow(f"line {lineno}: value {value_text!r} is not a number") from None
        if not np.isfinite(value):
            raise MalformedRow(f"line {lineno}: value {value_text!r} is not finite")
        if value < 0:
            raise NegativeValue(f"line {lineno}: negative value {value} for {series_id!r}")

        bucket = rows_by_id.setdefault(
            series_id,
            {"role": role, "source": source, "region": region, "topic": topic, "points": {}},
        )
        for attr, got in (("role", role), ("source", source), ("region", region), ("topic", topic)):
            if bucket[attr] != got:
                raise MalformedRow(
                    f"line {lineno}: series {series_id!r} changes {attr} mid-file"
                )
        if day in bucket["points"]:
            raise DuplicateTimestamp(
                f"line {lineno}: duplicate date {day} for series {series_id!r}"
            )
        bucket["points"][day] = value

    catalog = {}
    for series_id, bucket in rows_by_id.items():
        days = sorted(bucket["points"])
        catalog[series_id] = TimeSeries(
            id=series_id,
            role=bucket["role"],
            source=bucket["source"],
            region=bucket["region"],
            topic=bucket["topic"],
            resolution=_infer_resolution(days),
            dates=tuple(days),
            values=np.array([bucket["points"][d] for d in days]),
        )
    return catalog


def load_ratings_csv(path) -> dict[str, float]:
    """Load ``domain,score`` credibility ratings."""
    ratings: dict[str, float] = {}
    for lineno, row in _read_rows(path, RATINGS_HEADER):
        if len(row) != 2:
            raise MalformedRow(f"line {lineno}: expected 2 fields, got {len(row)}")
        domain, score_text = (f.strip() for f in row)
        try:
            score = float(score_text)
        except ValueError:
            raise MalformedRow(f"line {lineno}: score {score_text!r} is not a number") from None
        if not 0.0 <= score <= 100.0:
            raise ScoreOutOfRange(f"line {lineno}: score {score} outside [0, 100]")
        if domain in ratings:
            raise MalformedRow(f"line {lineno}: duplicate domain {domain!r}")
        ratings[domain] = score
    return ratings


def load_posts_csv(path) -> list[PostRecord]:
    """Load ``timestamp,domain,platform,region,topic`` post records."""
    posts = []
    for lineno, row in _read_rows(path, POSTS_HEADER):
        if len(row) != len(POSTS_HEADER):
            raise MalformedRow(
                f"line {lineno}: expected {len(POSTS_HEADER)} fields, got {len(row)}"
            )
        stamp, domain, platform, region, topic = (f.strip() for f in row)
        posts.append(
            PostRecord(
                timestamp=_parse_date(stamp, lineno, "timestamp"),
                domain=domain,
                platform=platform,
                region=region,
                topic=topic,
            )
        )
    return posts


# --- flat key/value config files -----------------------------------------

_CONFIG_PARSERS = {
    "alpha": float,
    "max_anoms": float,
    "seasonal_period": int,
    "trend_window": int,
    "stl_inner_loops": int,
    "stl_outer_loops": int,
    "gap_tolerance": int,
    "balance_epsilon": float,
    "week_convention": str,
    "window_start": date.fromisoformat,
    "window_end": date.fromisoformat,
    "delta_cap": float,
}


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` config file into typed values."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise MalformedRow(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition(sep))
        if key not in _CONFIG_PARSERS:
            raise MalformedRow(
                f"config line {lineno}: unknown key {key!r} "
                f"(valid: {', '.join(sorted(_CONFIG_PARSERS))})"
            )
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise MalformedRow(f"config line {lineno}: bad value for {key!r}: {exc}") from None
    return values


def config_from_values(values: dict, base: PipelineConfig | None = None) -> PipelineConfig:
    """Build a PipelineConfig from config-file values over a base."""
    base = base or PipelineConfig()
    kwargs = {}
    for key, value in values.items():
        if key == "week_convention":
            if value not in ("iso", "sunday"):
                raise MalformedRow(f"week_convention must be 'iso' or 'sunday', got {value!r}")
            kwargs["week_starts_monday"] = value == "iso"
        else:
            kwargs[key] = value
    merged = {**base.__dict__, **kwargs}
    return PipelineConfig(**merged)
