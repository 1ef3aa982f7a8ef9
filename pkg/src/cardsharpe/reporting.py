"""CSV and JSON serialization of study outputs.

Column orders and headers are frozen; floats are written with ``repr`` so a
re-run with the same config produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .config import StudyConfig
from .errors import MissingColumnError
from .study import AnnualStudyRecord, RollingSeries, k0_histogram

ANNUAL_COLUMNS = [
    "year",
    "q",
    "AIC_lin",
    "BIC_lin",
    "adjR2_lin",
    "beta1_1",
    "AIC_quad",
    "BIC_quad",
    "adjR2_quad",
    "beta2_2",
    "p_beta2_2",
    "verdict",
    "k0",
    "k_hat",
    "delta",
]

ROLLING_COLUMNS = ["window_start", "q", "k0"]
HISTOGRAM_COLUMNS = ["q", "k", "count"]
CURVE_COLUMNS = ["k", "q", "value"]
SCATTER_COLUMNS = ["sharpe_k0", "delta"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def write_annual_records(out_dir, records: list[AnnualStudyRecord]) -> Path:
    rows = []
    for rec in records:
        rows.append(
            [
                rec.year_index,
                rec.q,
                rec.linear.aic,
                rec.linear.bic,
                rec.linear.adj_r2,
                rec.linear.coefficients[1],
                rec.quadratic.aic,
                rec.quadratic.bic,
                rec.quadratic.adj_r2,
                rec.quadratic.coefficients[2],
                rec.quadratic.p_values[2],
                rec.comparison.verdict,
                rec.optima.k0,
                rec.optima.k_hat,
                rec.optima.delta,
            ]
        )
    path = Path(out_dir) / "annual_records.csv"
    _write_csv(path, ANNUAL_COLUMNS, rows)
    return path


def write_curve(out_dir, identifier, k_values, quantiles, values) -> Path:
    """One curve file: rows (k, q, value), k outer, q inner."""
    rows = []
    for i, k in enumerate(k_values):
        for j, q in enumerate(quantiles):
            rows.append([int(k), float(q), float(values[i, j])])
    path = Path(out_dir) / "curves" / f"{identifier}.csv"
    _write_csv(path, CURVE_COLUMNS, rows)
    return path


def write_annual_curves(out_dir, records: list[AnnualStudyRecord]) -> None:
    seen: set[int] = set()
    for rec in records:
        if rec.year_index in seen:
            continue
        seen.add(rec.year_index)
        write_curve(
            out_dir, rec.year_index, rec.curve.k_values, rec.curve.quantiles, rec.curve.values
        )


def write_rolling_outputs(out_dir, series: RollingSeries) -> None:
    rows = []
    for w, start in enumerate(series.window_starts):
        for q in series.quantiles:
            rows.append([int(start), float(q), series.records[q][w].k0])
    _write_csv(Path(out_dir) / "rolling_k0.csv", ROLLING_COLUMNS, rows)

    hist_rows = []
    for q in series.quantiles:
        counts = k0_histogram(series, q)
        for k in sorted(counts):
            hist_rows.append([float(q), k, counts[k]])
    _write_csv(Path(out_dir) / "k0_histogram.csv", HISTOGRAM_COLUMNS, hist_rows)

    for w, start in enumerate(series.window_starts):
        write_curve(
            out_dir, int(start), series.k_values, series.quantiles, series.curve_values[w]
        )


def write_run_meta(out_dir, config: StudyConfig) -> Path:
    path = Path(out_dir) / "run_meta.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_meta(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def scatter_delta_rows(records_path) -> list[tuple[float, float]]:
    """(optimum Sharpe, deviation) pairs for q=0.1 rows with a penalized optimum.

    The optimum's Sharpe value is looked up in the ``curves/`` directory next
    to the records file, which a study run writes alongside it.
    """
    records_path = Path(records_path)
    with open(records_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for needed in ("year", "q", "k0", "k_hat", "delta"):
            if needed not in fields:
                raise MissingColumnError(f"{records_path}: missing column {needed!r}")
        rows = list(reader)

    pairs: list[tuple[float, float]] = []
    for row in rows:
        if float(row["q"]) != 0.1 or row["k_hat"] == "":
            continue
        k0 = int(row["k0"])
        curve_path = records_path.parent / "curves" / f"{row['year']}.csv"
        sharpe_k0 = _curve_lookup(curve_path, k0, 0.1)
        pairs.append((sharpe_k0, float(row["delta"])))
    return pairs


def _curve_lookup(curve_path: Path, k: int, q: float) -> float:
    with open(curve_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for needed in CURVE_COLUMNS:
            if needed not in fields:
                raise MissingColumnError(f"{curve_path}: missing column {needed!r}")
        for row in reader:
            if int(row["k"]) == k and float(row["q"]) == q:
                return float(row["value"])
    raise MissingColumnError(f"{curve_path}: no row for (k={k}, q={q})")


def write_scatter_delta(records_path, out_path) -> Path:
    pairs = scatter_delta_rows(records_path)
    out_path = Path(out_path)
    _write_csv(out_path, SCATTER_COLUMNS, [[a, b] for a, b in pairs])
    return out_path
