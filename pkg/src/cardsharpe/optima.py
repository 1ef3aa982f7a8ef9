"""Quantile curves over cardinality and their raw / penalized optima.

A quantile curve maps (k, q) to the q-th quantile of the Sharpe distribution
over sampled k-portfolios in one window.  The raw optimum is the smallest k
attaining the curve maximum; the penalized optimum charges each unit of k the
fitted linear slope of the curve and only exists when that slope is positive.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import SamplingPlan, sharpe_distribution
from .errors import EmptyInputError, ValidationError
from .market_data import ReturnsPanel, Window

#: near-tie and zero-slope tolerance, relative to the curve's magnitude.
#: Keeps the smallest-k tie-break and the slope>0 gate stable under the
#: rounding of an OLS fit on exactly linear or exactly symmetric data.
REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantileCurve:
    """Representative Sharpe values on a (k, q) grid for one window."""

    window: Window
    k_values: np.ndarray
    quantiles: tuple[float, ...]
    values: np.ndarray  # shape (len(k_values), len(quantiles))

    def __post_init__(self):
        k_values = np.asarray(self.k_values, dtype=np.intp)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "k_values", k_values)
        object.__setattr__(self, "quantiles", tuple(float(q) for q in self.quantiles))
        object.__setattr__(self, "values", values)
        k_values.setflags(write=False)
        values.setflags(write=False)
        if np.any(np.diff(k_values) <= 0):
            raise ValidationError("k_values must be strictly increasing")
        if any(not 0.0 < q < 1.0 for q in self.quantiles):
            raise ValidationError("quantiles must lie in (0, 1)")
        if values.shape != (k_values.size, len(self.quantiles)):
            raise ValidationError(
                f"values shape {values.shape} does not match grid "
                f"({k_values.size}, {len(self.quantiles)})"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("curve values must be finite")

    def q_index(self, q: float) -> int:
        try:
            return self.quantiles.index(float(q))
        except ValueError:
            raise ValidationError(f"quantile {q} not on this curve") from None

    def k_index(self, k: int) -> int:
        pos = int(np.searchsorted(self.k_values, k))
        if pos >= self.k_values.size or self.k_values[pos] != k:
            raise ValidationError(f"k={k} not on this curve")
        return pos

    def value_at(self, k: int, q: float) -> float:
        return float(self.values[self.k_index(k), self.q_index(q)])


@dataclass(frozen=True)
class OptimaRecord:
    """Raw optimum, optional penalized optimum, and their Sharpe gap for one q."""

    q: float
    k0: int
    k_hat: int | None
    delta: float | None
    slope: float


def empirical_quantile(values, q: float) -> float:
    """Order-statistic quantile with linear interpolation at h = (n-1) q."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise EmptyInputError("cannot take a quantile of an empty sample")
    if not 0.0 < q < 1.0:
        raise ValidationError(f"quantile {q} must lie in (0, 1)")
    data = np.sort(data)
    h = (data.size - 1) * q
    lo = math.floor(h)
    t = h - lo
    if t == 0.0:
        return float(data[lo])
    a = data[lo]
    b = data[lo + 1]
    d = b - a
    # same two-sided interpolation numpy uses, for accuracy near t = 1
    if t >= 0.5:
        return float(b - d * (1.0 - t))
    return float(a + d * t)


def build_quantile_curve(
    panel: ReturnsPanel,
    window: Window,
    plan: SamplingPlan,
    quantiles=(0.1, 0.5, 0.9),
    workers: int = 1,
) -> QuantileCurve:
    """Sharpe quantile values for every k in the plan's range over one window.

    ``workers`` threads split the independent k cells; the output is
    identical for any worker count because each cell has its own substream.
    """
    if plan.k_max > panel.n_assets:
        raise ValidationError(
            f"k_max={plan.k_max} exceeds universe size {panel.n_assets}"
        )
    quantiles = tuple(float(q) for q in quantiles)
    k_values = plan.k_values

    def one_k(k: int) -> list[float]:
        dist = sharpe_distribution(panel, int(k), window, plan)
        return [empirical_quantile(dist, q) for q in quantiles]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one_k, k_values))
    else:
        rows = [one_k(k) for k in k_values]
    return QuantileCurve(
        window=window,
        k_values=k_values,
        quantiles=quantiles,
        values=np.array(rows, dtype=float),
    )


def raw_optimum(curve: QuantileCurve, q: float) -> int:
    """Smallest k attaining the maximum of the curve at quantile q."""
    column = curve.values[:, curve.q_index(q)]
    return int(curve.k_values[int(np.argmax(column))])


def penalized_optimum(curve: QuantileCurve, q: float, slope: float) -> int | None:
    """Smallest k maximizing ``value(k, q) - k * slope``, or None.

    Absent when the fitted slope is non-positive (a per-unit-k charge only
    makes sense for a rising curve).  Slopes whose total effect across the k
    range is below :data:`REL_TOL` of the curve's magnitude count as zero, and
    objective values within the same tolerance of the maximum count as ties,
    resolved toward the smallest k.
    """
    column = curve.values[:, curve.q_index(q)]
    k_values = curve.k_values
    scale = float(np.max(np.abs(column)))
    span = float(k_values[-1] - k_values[0])
    if slope <= 0.0 or slope * span <= REL_TOL * scale:
        return None
    objective = column - slope * k_values
    near_tie = objective >= objective.max() - REL_TOL * scale
    return int(k_values[int(np.argmax(near_tie))])


def sharpe_deviation(curve: QuantileCurve, q: float, k0: int, k_hat: int) -> float:
    """Sharpe value given up by holding k_hat assets instead of the raw optimum."""
    return curve.value_at(k0, q) - curve.value_at(k_hat, q)
