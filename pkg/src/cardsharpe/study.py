"""Study orchestration: annual partition analysis and rolling-window analysis.

The annual study chops the panel into consecutive year-length windows and, per
(window, quantile), produces the quantile curve, linear and quadratic fits,
the model-selection verdict, and the raw / penalized optima.

The rolling study slides a short window across the panel and tracks the raw
optimum per quantile.  Under the default fixed-across-windows policy the
portfolios are drawn once per k and every window's Sharpe values come from
prefix sums of the portfolio return series, so the whole sweep costs O(T)
per (portfolio, k) after setup instead of O(T * P).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import (
    SamplingPlan,
    _sample_index_matrix,
    _sharpe_from_sums,
    _weight_matrix,
    stream_key,
)
from .errors import SamplingExhaustedError, TooShortError, ValidationError
from .market_data import ReturnsPanel, Window
from .optima import (
    OptimaRecord,
    QuantileCurve,
    build_quantile_curve,
    penalized_optimum,
    raw_optimum,
    sharpe_deviation,
)
from .regression import ModelComparison, RegressionFit, compare_models, ols_fit


@dataclass(frozen=True)
class AnnualStudyRecord:
    """Everything the annual study derives for one (window, quantile) pair."""

    year_index: int
    q: float
    linear: RegressionFit
    quadratic: RegressionFit
    comparison: ModelComparison
    optima: OptimaRecord
    curve: QuantileCurve


@dataclass(frozen=True, eq=False)
class RollingSeries:
    """Per-quantile series of raw optima over sliding windows.

    ``curve_values[w, i, j]`` is the Sharpe quantile for window start
    ``window_starts[w]``, cardinality ``k_values[i]``, quantile
    ``quantiles[j]``.
    """

    window_starts: np.ndarray
    stride: int
    k_values: np.ndarray
    quantiles: tuple[float, ...]
    records: dict[float, list[OptimaRecord]]
    curve_values: np.ndarray

    def q_index(self, q: float) -> int:
        try:
            return self.quantiles.index(float(q))
        except ValueError:
            raise ValidationError(f"quantile {q} not in this series") from None


def annual_partition(n_days: int, window_length: int = 252) -> list[Window]:
    """Consecutive non-overlapping windows from day 0; remainder days dropped."""
    if window_length < 2:
        raise ValidationError(f"window length {window_length} must be >= 2")
    if n_days < window_length:
        raise TooShortError(
            f"panel has {n_days} days, shorter than one window of {window_length}"
        )
    count = n_days // window_length
    return [Window(i * window_length, window_length) for i in range(count)]


def _optima_for(curve: QuantileCurve, q: float, slope: float) -> OptimaRecord:
    k0 = raw_optimum(curve, q)
    k_hat = penalized_optimum(curve, q, slope)
    delta = sharpe_deviation(curve, q, k0, k_hat) if k_hat is not None else None
    return OptimaRecord(q=q, k0=k0, k_hat=k_hat, delta=delta, slope=slope)


def run_annual_study(
    panel: ReturnsPanel,
    plan: SamplingPlan,
    quantiles=(0.1, 0.5, 0.9),
    window_length: int = 252,
    alpha: float = 0.05,
    m: int | None = None,
    workers: int = 1,
) -> list[AnnualStudyRecord]:
    """Run the full per-window analysis; records are ordered by (year, q).

    The Bonferroni hypothesis count defaults to one test per curve,
    i.e. ``len(quantiles) * number_of_windows``.
    """
    windows = annual_partition(panel.n_days, window_length)
    quantiles = tuple(float(q) for q in quantiles)
    if m is None:
        m = len(quantiles) * len(windows)
    records: list[AnnualStudyRecord] = []
    for year_index, window in enumerate(windows):
        curve = build_quantile_curve(panel, window, plan, quantiles, workers=workers)
        k_grid = curve.k_values.astype(float)
        for q in quantiles:
            column = curve.values[:, curve.q_index(q)]
            linear = ols_fit(k_grid, column, degree=1)
            quadratic = ols_fit(k_grid, column, degree=2)
            comparison = compare_models(linear, quadratic, alpha=alpha, m=m)
            optima = _optima_for(curve, q, slope=linear.coefficients[1])
            records.append(
                AnnualStudyRecord(
                    year_index=year_index,
                    q=q,
                    linear=linear,
                    quadratic=quadratic,
                    comparison=comparison,
                    optima=optima,
                    curve=curve,
                )
            )
    return records


def _rolling_fixed_cell(panel, plan, k, starts, window_length):
    """Quantile values for one k over all window starts, via prefix sums."""
    rng = np.random.default_rng(stream_key(plan.seed, 0, k))
    matrix = _sample_index_matrix(rng, panel.n_assets, k, plan.n_samples)
    weights = _weight_matrix(matrix, panel.n_assets)
    series = weights @ panel.returns
    zero = np.zeros((plan.n_samples, 1))
    prefix = np.concatenate([zero, np.cumsum(series, axis=1)], axis=1)
    prefix_sq = np.concatenate([zero, np.cumsum(series * series, axis=1)], axis=1)
    total = prefix[:, starts + window_length] - prefix[:, starts]
    total_sq = prefix_sq[:, starts + window_length] - prefix_sq[:, starts]
    values, bad = _sharpe_from_sums(total, total_sq, window_length)
    if np.any(bad):
        # fixed samples cannot be redrawn for a single window without
        # changing every other window, so a degenerate panel is an error
        raise SamplingExhaustedError(
            f"k={k}: {int(bad.sum())} (portfolio, window) cells have ZeroVariance "
            "under the fixed-across-windows policy"
        )
    return values


def run_rolling_study(
    panel: ReturnsPanel,
    plan: SamplingPlan,
    quantiles=(0.1, 0.5, 0.9),
    window_length: int = 90,
    stride: int = 1,
    workers: int = 1,
) -> RollingSeries:
    """Track the raw optimum per quantile over sliding windows.

    With ``plan.resample_policy == 'fixed-across-windows'`` the portfolio
    draws per k are shared by all windows (keyed like the window at day 0)
    and evaluated through prefix sums; with ``'per-window'`` every window
    redraws, which is exact but far slower.
    """
    if stride < 1:
        raise ValidationError(f"stride {stride} must be >= 1")
    if panel.n_days < window_length:
        raise TooShortError(
            f"panel has {panel.n_days} days, shorter than one window of {window_length}"
        )
    quantiles = tuple(float(q) for q in quantiles)
    starts = np.arange(0, panel.n_days - window_length + 1, stride, dtype=np.intp)
    k_values = plan.k_values
    if plan.k_max > panel.n_assets:
        raise ValidationError(
            f"k_max={plan.k_max} exceeds universe size {panel.n_assets}"
        )
    q_list = list(quantiles)

    if plan.resample_policy == "fixed-across-windows":

        def one_k(k: int) -> np.ndarray:
            sharpes = _rolling_fixed_cell(panel, plan, int(k), starts, window_length)
            return np.quantile(sharpes, q_list, axis=0)  # (n_q, n_starts)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                per_k = list(pool.map(one_k, k_values))
        else:
            per_k = [one_k(k) for k in k_values]
        # (n_starts, n_k, n_q)
        curve_values = np.stack(per_k, axis=0).transpose(2, 0, 1)
    else:
        curves = [
            build_quantile_curve(
                panel, Window(int(start), window_length), plan, quantiles, workers=workers
            )
            for start in starts
        ]
        curve_values = np.stack([c.values for c in curves], axis=0)

    # OLS slope of each (window, q) column against k, in closed form
    k_centered = k_values.astype(float) - k_values.mean()
    sxx = float(k_centered @ k_centered)
    slopes = np.einsum("i,wij->wj", k_centered, curve_values) / sxx

    best = np.argmax(curve_values, axis=1)  # (n_starts, n_q), first max
    records: dict[float, list[OptimaRecord]] = {}
    for j, q in enumerate(quantiles):
        records[q] = [
            OptimaRecord(
                q=q,
                k0=int(k_values[best[w, j]]),
                k_hat=None,
                delta=None,
                slope=float(slopes[w, j]),
            )
            for w in range(starts.size)
        ]
    return RollingSeries(
        window_starts=starts,
        stride=stride,
        k_values=k_values,
        quantiles=quantiles,
        records=records,
        curve_values=curve_values,
    )


def k0_histogram(series: RollingSeries, q: float) -> dict[int, int]:
    """Counts of the raw optimum per cardinality bin; zero bins included."""
    series.q_index(q)
    counts = {int(k): 0 for k in series.k_values}
    for record in series.records[float(q)]:
        counts[record.k0] += 1
    return counts
