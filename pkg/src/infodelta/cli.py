"""Batch command-line interface.

Subcommands: ``analyze`` runs the detection pipeline on an ingested
supply/demand pair, ``benchmark`` scores it on synthetic data,
``decompose`` dumps the components of one series, ``persistence``
extracts the run table from a prior report, and ``credibility`` joins
posts and ratings against a prior report's regime labels.

Exit codes: 0 success, 1 validation error, 2 I/O error. The environment
variable ``INFODELTA_CONFIG`` names a default config file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import date
from pathlib import Path

from . import __version__
from .anomaly import AnomalyConfig
from .benchmark import InjectionTarget, SynthConfig, run_benchmark
from .errors import InfoDeltaError, IoFailure, MalformedRow
from .ingest import (
    config_from_values,
    ingest_csv,
    load_posts_csv,
    load_ratings_csv,
    read_config_file,
)
from .pipeline import PipelineConfig, run_analysis
from .report import (
    decomposition_csv,
    emit_benchmark,
    emit_report,
    labels_from_payload,
    quality_csv,
    runs_csv,
    write_text,
)

CONFIG_ENV_VAR = "INFODELTA_CONFIG"


class _Parser(argparse.ArgumentParser):
    # Bad flags are a validation problem: exit 1, never argparse's 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message) from None


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file "
                        f"(default: ${CONFIG_ENV_VAR} when set)")
    parser.add_argument("--alpha", type=float, help="anomaly band width parameter")
    parser.add_argument("--max-anoms", type=float, help="max fraction of points flagged")
    parser.add_argument("--trend-window", type=int, help="trend smoother window (points)")
    parser.add_argument("--period", type=int, help="seasonal period (0 disables)")
    parser.add_argument("--gap-tolerance", type=int, help="regular days bridged inside a run")
    parser.add_argument("--epsilon", type=float, help="balance band half-width")
    parser.add_argument("--week-start", choices=["monday", "sunday"],
                        help="week convention for daily-to-weekly aggregation")
    parser.add_argument("--cap", type=float, help="display cap for the capped delta column")
    parser.add_argument("--from", dest="window_from", type=date.fromisoformat,
                        metavar="DATE", help="analysis window start (inclusive)")
    parser.add_argument("--to", dest="window_to", type=date.fromisoformat,
                        metavar="DATE", help="analysis window end (inclusive)")


def build_pipeline_config(args) -> PipelineConfig:
    """Defaults, overlaid by the config file, overlaid by CLI flags."""
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = PipelineConfig()
    if config_path:
        config = config_from_values(read_config_file(config_path), base=config)
    overrides = {
        "alpha": args.alpha,
        "max_anoms": args.max_anoms,
        "trend_window": args.trend_window,
        "seasonal_period": args.period,
        "gap_tolerance": args.gap_tolerance,
        "balance_epsilon": args.epsilon,
        "delta_cap": args.cap,
        "window_start": args.window_from,
        "window_end": args.window_to,
    }
    if args.week_start is not None:
        overrides["week_starts_monday"] = args.week_start == "monday"
    merged = {**config.__dict__, **{k: v for k, v in overrides.items() if v is not None}}
    return PipelineConfig(**merged)


def _lookup(catalog: dict, series_id: str):
    if series_id not in catalog:
        known = ", ".join(sorted(catalog)) or "(none)"
        raise MalformedRow(f"series {series_id!r} not in input; available: {known}")
    return catalog[series_id]


def _load_report_payload(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedRow(f"report {path} is not valid JSON: {exc}") from None


def cmd_analyze(args) -> int:
    config = build_pipeline_config(args)
    catalog = ingest_csv(args.input)
    supply = _lookup(catalog, args.supply)
    demand = _lookup(catalog, args.demand)
    report = run_analysis(supply, demand, config)

    out = Path(args.out)
    written = emit_report(report, args.format, out)
    if args.plots:
        from . import plots

        written.append(plots.plot_delta_regimes(report, out / "figures" / "delta_regimes.png"))
        written.append(plots.plot_decomposition(report, out / "figures" / "decomposition.png"))

    s = report.summary
    print(
        f"{s.total_points} points: {s.anomaly_count} anomalies "
        f"({s.anomaly_pct:.2f}%), {s.positive_pct:.2f}% positive, "
        f"{s.negative_pct:.2f}% negative"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_benchmark(args) -> int:
    sigma_lo, sigma_hi, sigma_step = args.sigma_min, args.sigma_max, args.sigma_step
    if sigma_lo <= 0 or sigma_hi < sigma_lo or sigma_step <= 0:
        raise MalformedRow("sigma grid must satisfy 0 < min <= max with positive step")
    grid = []
    sigma = sigma_lo
    while sigma <= sigma_hi + 1e-9:
        grid.append(round(sigma, 6))
        sigma += sigma_step
    config = SynthConfig(
        series_length=args.length,
        injection_count=args.injections,
        repetitions=args.repetitions,
        injection_target=InjectionTarget(args.target),
        rng_seed=args.seed,
        magnitude_grid=tuple(grid),
    )
    anomaly_config = AnomalyConfig(alpha=args.alpha, max_anoms=args.max_anoms)

    def progress(sigma, result):
        print(
            f"sigma {sigma:5.1f}: precision {result.mean_precision:.3f} "
            f"f1 {result.mean_f1:.3f}",
            flush=True,
        )

    report = run_benchmark(config, anomaly_config, on_progress=progress if args.verbose else None)
    out = Path(args.out)
    written = emit_benchmark(report, args.format, out)
    if args.plots:
        from . import plots

        written.append(plots.plot_benchmark(report, out / "figures" / "benchmark_scores.png"))
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_decompose(args) -> int:
    from .decompose import stl_decompose
    from .pipeline import PipelineConfig as _Cfg
    from .series import fill_gaps

    catalog = ingest_csv(args.input)
    series = fill_gaps(_lookup(catalog, args.series))
    base = _Cfg()
    period = args.period if args.period is not None else base.resolved_period(series.resolution)
    trend_window = (
        args.trend_window
        if args.trend_window is not None
        else base.resolved_trend_window(series.resolution)
    )
    decomposition = stl_decompose(series.values, period=period, trend_window=trend_window)
    out = Path(args.out)
    path = write_text(out / "decomposition.csv", decomposition_csv(series.dates, decomposition))
    print(f"wrote {path}")
    return 0


def cmd_persistence(args) -> int:
    payload = _load_report_payload(args.report)
    if "runs" not in payload:
        raise MalformedRow(f"report {args.report} has no runs section")
    path = write_text(Path(args.out) / "runs.csv", runs_csv(payload["runs"]))
    print(f"wrote {path}")
    return 0


def cmd_credibility(args) -> int:
    from .analytics import quality_by_anomaly_state

    payload = _load_report_payload(args.report)
    labels = labels_from_payload(payload)
    posts = load_posts_csv(args.posts)
    ratings = load_ratings_csv(args.ratings)
    table = quality_by_anomaly_state(posts, ratings, labels, window_start=args.window_start)
    path = write_text(Path(args.out) / "credibility.csv", quality_csv(table))
    print(
        f"{table.included_posts}/{table.total_posts} posts included "
        f"({table.excluded_unrated} unrated, {table.excluded_unlabelled} unlabelled, "
        f"{table.excluded_before_window} before window)"
    )
    print(f"wrote {path}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="infodelta", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the detection pipeline on one pair")
    p.add_argument("--input", required=True, help="long-format stream CSV")
    p.add_argument("--supply", required=True, help="supply series id")
    p.add_argument("--demand", required=True, help="demand series id")
    _add_pipeline_flags(p)
    p.add_argument("--format", choices=["csv", "json", "both"], default="both")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-plots", dest="plots", action="store_false",
                   help="skip figure rendering")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("benchmark", help="score the pipeline on synthetic data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=486, help="synthetic series length (days)")
    p.add_argument("--injections", type=int, default=20)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--target", choices=[t.value for t in InjectionTarget], default="supply")
    p.add_argument("--sigma-min", type=float, default=1.0)
    p.add_argument("--sigma-max", type=float, default=15.0)
    p.add_argument("--sigma-step", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--max-anoms", type=float, default=0.10)
    p.add_argument("--format", choices=["csv", "json", "both"], default="both")
    p.add_argument("--out", default=".")
    p.add_argument("--no-plots", dest="plots", action="store_false")
    p.add_argument("--verbose", action="store_true", help="print per-sigma progress")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("decompose", help="emit the components of one series")
    p.add_argument("--input", required=True)
    p.add_argument("--series", required=True, help="series id to decompose")
    p.add_argument("--period", type=int)
    p.add_argument("--trend-window", type=int)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("persistence", help="extract the run table from a report")
    p.add_argument("--report", required=True, help="report.json from a prior analyze")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_persistence)

    p = sub.add_parser("credibility", help="credibility distribution by anomaly state")
    p.add_argument("--report", required=True, help="report.json from a prior analyze")
    p.add_argument("--posts", required=True, help="timestamp,domain,platform,region,topic CSV")
    p.add_argument("--ratings", required=True, help="domain,score CSV")
    p.add_argument("--window-start", type=date.fromisoformat, metavar="DATE")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_credibility)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return exc.code if isinstance(exc.code, int) else 0
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InfoDeltaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
