"""Monte Carlo core: equally weighted portfolio sampling and windowed Sharpe ratios.

Sharpe convention: the numerator is the sum of daily portfolio returns over
the window and the denominator is the daily sample standard deviation
(divisor P-1) scaled by sqrt(P).  Any other common convention differs by a
positive per-window factor, which leaves every argmax-based output downstream
unchanged; that invariance is covered by tests.

Determinism contract: every (window, k) cell gets its own RNG substream keyed
by (plan seed, window start, k), so results are independent of evaluation
order and of how many worker threads the caller uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    KTooLargeError,
    SamplingExhaustedError,
    ValidationError,
    ZeroVarianceError,
)
from .market_data import ReturnsPanel, Window

SharpeValue = float

#: rounds of zero-variance replacement before sampling gives up
REDRAW_CAP = 100

RESAMPLE_POLICIES = ("per-window", "fixed-across-windows")


@dataclass(frozen=True, eq=False)
class PortfolioSample:
    """Sorted indices of the k distinct assets in one equally weighted portfolio."""

    indices: np.ndarray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.intp)
        object.__setattr__(self, "indices", indices)
        indices.setflags(write=False)
        if indices.ndim != 1 or indices.size == 0:
            raise ValidationError("portfolio needs at least one asset index")
        if indices[0] < 0 or np.any(np.diff(indices) <= 0):
            raise ValidationError("indices must be strictly increasing and non-negative")

    @property
    def k(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class SamplingPlan:
    """How many portfolios to draw, over which cardinalities, from which seed."""

    seed: int
    n_samples: int = 1000
    k_min: int = 10
    k_max: int = 100
    resample_policy: str = "per-window"

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.n_samples < 1:
            raise ValidationError("n_samples must be >= 1")
        if not 2 <= self.k_min <= self.k_max:
            raise ValidationError(f"need 2 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if self.resample_policy not in RESAMPLE_POLICIES:
            raise ValidationError(f"unknown resample policy {self.resample_policy!r}")

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)


def stream_key(seed: int, window_start: int, k: int) -> np.random.SeedSequence:
    """Substream key for the (window, k) cell, derived from the plan seed."""
    return np.random.SeedSequence(entropy=[seed, window_start, k])


def _sample_index_matrix(rng, n_assets: int, k: int, n_samples: int) -> np.ndarray:
    """(n_samples, k) matrix of sorted uniform k-subsets of range(n_assets).

    Partial Fisher-Yates, vectorised across samples: position i swaps with a
    uniform j in [i, N), so rows are uniform over all C(N, k) subsets.
    """
    arr = np.tile(np.arange(n_assets, dtype=np.intp), (n_samples, 1))
    rows = np.arange(n_samples)
    for i in range(k):
        j = rng.integers(i, n_assets, size=n_samples)
        picked = arr[rows, j]
        arr[rows, j] = arr[rows, i]
        arr[rows, i] = picked
    return np.sort(arr[:, :k], axis=1)


def sample_portfolios(n_assets: int, k: int, n_samples: int, key) -> list[PortfolioSample]:
    """Draw ``n_samples`` independent uniform k-subsets of ``range(n_assets)``.

    Draws are i.i.d. across samples, so duplicate portfolios are possible.
    ``key`` is the derived substream seed (int or SeedSequence); the output is
    deterministic for a fixed key.
    """
    if k > n_assets:
        raise KTooLargeError(f"k={k} exceeds universe size {n_assets}")
    if k < 1 or n_samples < 1:
        raise ValidationError("need k >= 1 and n_samples >= 1")
    rng = np.random.default_rng(key)
    matrix = _sample_index_matrix(rng, n_assets, k, n_samples)
    return [PortfolioSample(indices=row) for row in matrix]


def portfolio_return_series(
    panel: ReturnsPanel, sample: PortfolioSample, window: Window
) -> np.ndarray:
    """Daily equal-weight portfolio returns over the window (length P)."""
    window.check_fits(panel.n_days)
    if sample.indices[-1] >= panel.n_assets:
        raise ValidationError("portfolio index out of range for this panel")
    block = panel.returns[sample.indices, window.start : window.stop]
    return block.mean(axis=0)


def _sharpe_from_sums(total, total_sq, length: int):
    """Sharpe values from window sums of r and r^2; non-positive variance -> nan.

    Shared by the direct and the prefix-sum paths so both compute the same
    statistic: total return over (daily sample std * sqrt(P)).
    """
    var = (total_sq - total * total / length) / (length - 1)
    bad = var <= 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        out = total / (np.sqrt(np.where(bad, np.nan, var)) * math.sqrt(length))
    return out, bad


def sharpe_ratio(panel: ReturnsPanel, sample: PortfolioSample, window: Window) -> SharpeValue:
    """Sharpe ratio of one equally weighted portfolio over one window."""
    series = portfolio_return_series(panel, sample, window)
    total = series.sum()
    total_sq = series @ series
    value, bad = _sharpe_from_sums(total, total_sq, window.length)
    if bad:
        raise ZeroVarianceError(
            f"zero variance over window [{window.start}, {window.stop})"
        )
    return float(value)


def _batch_sharpes(returns_block: np.ndarray, index_matrix: np.ndarray):
    """Sharpe per row of ``index_matrix`` over the given (N, P) return block."""
    weights = _weight_matrix(index_matrix, returns_block.shape[0])
    series = weights @ returns_block
    total = series.sum(axis=1)
    total_sq = np.einsum("ij,ij->i", series, series)
    return _sharpe_from_sums(total, total_sq, returns_block.shape[1])


def _weight_matrix(index_matrix: np.ndarray, n_assets: int) -> np.ndarray:
    n, k = index_matrix.shape
    weights = np.zeros((n, n_assets))
    np.put_along_axis(weights, index_matrix, 1.0 / k, axis=1)
    return weights


def sharpe_distribution(
    panel: ReturnsPanel, k: int, window: Window, plan: SamplingPlan
) -> np.ndarray:
    """Sharpe values of ``plan.n_samples`` sampled k-portfolios over the window.

    Zero-variance portfolios are redrawn (from the same substream) up to
    :data:`REDRAW_CAP` times; if any slot is still degenerate the draw fails
    with :class:`SamplingExhaustedError`.  Output is ordered by sample index
    and deterministic for a fixed plan seed, independent of parallelism.
    """
    if k > panel.n_assets:
        raise KTooLargeError(f"k={k} exceeds universe size {panel.n_assets}")
    window.check_fits(panel.n_days)
    rng = np.random.default_rng(stream_key(plan.seed, window.start, k))
    block = panel.returns[:, window.start : window.stop]
    matrix = _sample_index_matrix(rng, panel.n_assets, k, plan.n_samples)
    values, bad = _batch_sharpes(block, matrix)
    redraws = 0
    while np.any(bad):
        if redraws >= REDRAW_CAP:
            raise SamplingExhaustedError(
                f"gave up after {REDRAW_CAP} redraws: {int(bad.sum())} portfolios "
                f"still have ZeroVariance over window [{window.start}, {window.stop})"
            )
        redraws += 1
        slots = np.flatnonzero(bad)
        retry = _sample_index_matrix(rng, panel.n_assets, k, slots.size)
        new_values, new_bad = _batch_sharpes(block, retry)
        values[slots] = new_values
        bad = np.zeros_like(bad)
        bad[slots] = new_bad
    return values
