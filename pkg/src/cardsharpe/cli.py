"""Command-line interface.

``cardsharpe run`` executes an annual or rolling study from a key=value
config file and/or flags (flags win) and writes CSV/JSON outputs.
``cardsharpe scatter-delta`` post-processes an annual records file into
(optimum Sharpe, deviation) pairs.  Exit codes: 0 ok, 1 validation failure,
2 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import StudyConfig, parse_config_file, resolve_config
from .engine import SamplingPlan
from .errors import CardsharpeError
from .market_data import compute_returns, generate_gbm_panel, load_price_csv
from .reporting import (
    write_annual_curves,
    write_annual_records,
    write_rolling_outputs,
    write_run_meta,
    write_scatter_delta,
)
from .study import run_annual_study, run_rolling_study


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cardsharpe")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an annual or rolling study")
    run.add_argument("--config", help="key=value config file")
    run.add_argument("--study", choices=["annual", "rolling"])
    run.add_argument("--input", help="price panel CSV")
    run.add_argument("--gbm", help="inline synthetic spec, e.g. n_assets=50,n_days=600")
    run.add_argument("--layout", choices=["wide", "long"])
    run.add_argument("--align", choices=["strict", "intersect"])
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--kmin", type=int)
    run.add_argument("--kmax", type=int)
    run.add_argument("--period", type=int)
    run.add_argument("--stride", type=int)
    run.add_argument("--quantiles", help="comma-separated, e.g. 0.1,0.5,0.9")
    run.add_argument("--alpha", type=float)
    run.add_argument("--m", type=int, help="Bonferroni hypothesis count override")
    run.add_argument("--resample", choices=["per-window", "fixed-across-windows"])
    run.add_argument("--workers", type=int)
    run.add_argument("--out", help="output directory")

    scatter = sub.add_parser("scatter-delta", help="optimum Sharpe vs deviation pairs")
    scatter.add_argument("--records", required=True, help="annual_records.csv path")
    scatter.add_argument("--out", required=True, help="output CSV path")
    return parser


def _config_from_args(args) -> StudyConfig:
    file_values = parse_config_file(args.config) if args.config else {}
    overrides = {
        "study": args.study,
        "input": args.input,
        "gbm": args.gbm,
        "layout": args.layout,
        "align": args.align,
        "seed": args.seed,
        "samples": args.samples,
        "kmin": args.kmin,
        "kmax": args.kmax,
        "period": args.period,
        "stride": args.stride,
        "quantiles": args.quantiles,
        "alpha": args.alpha,
        "m": args.m,
        "resample": args.resample,
        "workers": args.workers,
        "out": args.out,
    }
    return resolve_config(file_values, overrides)


def _load_panel(config: StudyConfig):
    if config.gbm is not None:
        prices = generate_gbm_panel(config.gbm, config.seed)
    else:
        prices = load_price_csv(config.input_csv, layout=config.layout, align=config.align)
    return compute_returns(prices)


def cmd_run(config: StudyConfig) -> int:
    panel = _load_panel(config)
    plan = SamplingPlan(
        seed=config.seed,
        n_samples=config.n_samples,
        k_min=config.k_min,
        k_max=config.k_max,
        resample_policy=config.resample_policy,
    )
    if config.study == "annual":
        records = run_annual_study(
            panel,
            plan,
            quantiles=config.quantiles,
            window_length=config.period,
            alpha=config.alpha,
            m=config.m_override,
            workers=config.workers,
        )
        write_annual_records(config.output_dir, records)
        write_annual_curves(config.output_dir, records)
    else:
        series = run_rolling_study(
            panel,
            plan,
            quantiles=config.quantiles,
            window_length=config.period,
            stride=config.stride,
            workers=config.workers,
        )
        write_rolling_outputs(config.output_dir, series)
    write_run_meta(config.output_dir, config)
    return 0


def cmd_scatter_delta(records_path, out_path) -> int:
    write_scatter_delta(records_path, out_path)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_config_from_args(args))
        return cmd_scatter_delta(args.records, args.out)
    except CardsharpeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
