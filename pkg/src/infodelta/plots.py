"""Render report figures to files next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .benchmark import BenchmarkReport
from .errors import IoFailure
from .pipeline import AnalysisReport, capped_deltas


def _save(fig, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=150, bbox_inches="tight")
    except OSError as exc:
        raise IoFailure(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def plot_delta_regimes(report: AnalysisReport, path) -> Path:
    """Delta series with tolerance bands and signed anomaly markers.

    The delta line is clipped to the configured display cap; the bands
    are the recomposed detection limits on the observed scale.
    """
    dates = report.delta.dates
    cap = report.config.delta_cap
    capped = capped_deltas(report)
    lo = np.clip(report.anomalies.recomposed_l1, -cap, cap)
    hi = np.clip(report.anomalies.recomposed_l2, -cap, cap)

    fig, ax = plt.subplots(figsize=(11, 4))
    ax.fill_between(dates, lo, hi, color="0.85", label="tolerance band")
    ax.plot(dates, capped, color="0.25", lw=0.9, label="delta (capped)")
    ax.axhline(0.0, color="0.5", lw=0.6, ls="--")

    pos = np.flatnonzero(report.anomalies.anomaly_sign > 0)
    neg = np.flatnonzero(report.anomalies.anomaly_sign < 0)
    if len(pos):
        ax.plot([dates[i] for i in pos], capped[pos], "o", ms=4,
                color="tab:red", label="overabundance")
    if len(neg):
        ax.plot([dates[i] for i in neg], capped[neg], "o", ms=4,
                color="tab:blue", label="void")

    ax.set_ylabel("supply-demand delta")
    ax.set_title(f"{report.supply.series_id} vs {report.demand.series_id}")
    ax.legend(loc="upper left", fontsize=8)
    fig.autofmt_xdate()
    return _save(fig, Path(path))


def plot_decomposition(report: AnalysisReport, path) -> Path:
    """Observed, seasonal, trend and remainder panels."""
    dec = report.decomposition
    dates = report.delta.dates
    fig, axes = plt.subplots(4, 1, figsize=(11, 8), sharex=True)
    for ax, name in zip(axes, ("observed", "seasonal", "trend", "remainder")):
        ax.plot(dates, getattr(dec, name), lw=0.8, color="0.25")
        ax.set_ylabel(name)
    axes[-1].axhline(report.anomalies.lower_limit, color="tab:red", lw=0.7, ls="--")
    axes[-1].axhline(report.anomalies.upper_limit, color="tab:red", lw=0.7, ls="--")
    fig.autofmt_xdate()
    fig.align_ylabels(axes)
    return _save(fig, Path(path))


def plot_benchmark(report: BenchmarkReport, path) -> Path:
    """Mean precision and F1 against injected spike magnitude."""
    sigmas = [r.sigma for r in report.results]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(sigmas, [r.mean_precision for r in report.results], "o-", ms=4,
            label="mean precision")
    ax.plot(sigmas, [r.mean_f1 for r in report.results], "s-", ms=4,
            label="mean F1")
    ax.set_xlabel("spike magnitude (multiples of base std)")
    ax.set_ylabel("score")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="upper left", fontsize=9)
    ax.grid(alpha=0.3)
    return _save(fig, Path(path))
