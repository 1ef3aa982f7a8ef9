"""Price and return panels: CSV ingestion, validation, synthetic generation.

The panel types are immutable once constructed and safe to share across
threads.  All downstream sampling draws from a :class:`ReturnsPanel`, so the
validation here is deliberately strict: holes are rejected rather than
imputed, prices must be strictly positive, and dates must strictly increase.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpecError,
    MissingCellError,
    NonMonotoneDatesError,
    NonPositivePriceError,
    PanelParseError,
    ValidationError,
)


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Aligned matrix of daily prices: one row per ticker, one column per date."""

    tickers: tuple[str, ...]
    dates: tuple[str, ...]
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "prices", prices)
        prices.setflags(write=False)
        if prices.ndim != 2 or prices.shape != (len(self.tickers), len(self.dates)):
            raise ValidationError(
                f"price matrix shape {prices.shape} does not match "
                f"{len(self.tickers)} tickers x {len(self.dates)} dates"
            )
        if len(self.tickers) < 2:
            raise ValidationError("need at least 2 tickers")
        if len(self.dates) < 3:
            raise ValidationError("need at least 3 dates (two return days)")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0.0):
            raise NonPositivePriceError("prices must be strictly positive and finite")
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise NonMonotoneDatesError("dates must be strictly increasing")

    @property
    def n_assets(self) -> int:
        return len(self.tickers)

    @property
    def n_days(self) -> int:
        return len(self.dates)


@dataclass(frozen=True, eq=False)
class ReturnsPanel:
    """Daily simple returns: one row per ticker, one column per trading day.

    ``dates[t]`` labels the day on which ``returns[:, t]`` was realised,
    i.e. the later of the two price dates the return was computed from.
    """

    tickers: tuple[str, ...]
    dates: tuple[str, ...]
    returns: np.ndarray

    def __post_init__(self):
        returns = np.asarray(self.returns, dtype=float)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "returns", returns)
        returns.setflags(write=False)
        if returns.ndim != 2 or returns.shape != (len(self.tickers), len(self.dates)):
            raise ValidationError(
                f"returns matrix shape {returns.shape} does not match "
                f"{len(self.tickers)} tickers x {len(self.dates)} days"
            )
        if len(self.tickers) < 2:
            raise ValidationError("need at least 2 tickers")
        if len(self.dates) < 2:
            raise ValidationError("need at least 2 return days")
        if not np.all(np.isfinite(returns)) or np.any(returns <= -1.0):
            raise ValidationError("returns must be finite and greater than -1")

    @property
    def n_assets(self) -> int:
        return len(self.tickers)

    @property
    def n_days(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class Window:
    """Contiguous block of trading days: ``[start, start + length)``."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 0:
            raise ValidationError(f"window start {self.start} must be >= 0")
        if self.length < 2:
            raise ValidationError(f"window length {self.length} must be >= 2")

    @property
    def stop(self) -> int:
        return self.start + self.length

    def check_fits(self, n_days: int) -> None:
        if self.stop > n_days:
            raise ValidationError(
                f"window [{self.start}, {self.stop}) exceeds panel length {n_days}"
            )


@dataclass(frozen=True)
class GbmSpec:
    """Parameters for the correlated geometric-Brownian-motion generator.

    Per-asset daily drift and volatility are drawn uniformly from the given
    ranges; all asset pairs share the same log-return correlation.  A zero
    ``vol_range`` is allowed so degenerate, noise-free panels can be built
    for tests.
    """

    n_assets: int
    n_days: int
    drift_range: tuple[float, float] = (-0.0005, 0.0015)
    vol_range: tuple[float, float] = (0.008, 0.02)
    pairwise_correlation: float = 0.3
    initial_price: float = 100.0

    def __post_init__(self):
        if self.n_assets < 2 or self.n_days < 3:
            raise DegenerateSpecError(
                f"need n_assets >= 2 and n_days >= 3, got {self.n_assets}, {self.n_days}"
            )
        mu_lo, mu_hi = self.drift_range
        sig_lo, sig_hi = self.vol_range
        if not (np.isfinite(mu_lo) and np.isfinite(mu_hi) and mu_lo <= mu_hi):
            raise ValidationError(f"bad drift range {self.drift_range}")
        if not (np.isfinite(sig_lo) and np.isfinite(sig_hi) and 0.0 <= sig_lo <= sig_hi):
            raise ValidationError(f"bad volatility range {self.vol_range}")
        if not 0.0 <= self.pairwise_correlation < 1.0:
            raise ValidationError(
                f"pairwise correlation {self.pairwise_correlation} must be in [0, 1)"
            )
        if not (np.isfinite(self.initial_price) and self.initial_price > 0.0):
            raise ValidationError(f"initial price {self.initial_price} must be positive")


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except csv.Error as exc:
        raise PanelParseError(f"{path}: {exc}") from exc
    if len(rows) < 2:
        raise PanelParseError(f"{path}: no data rows")
    return rows


def _parse_price(token: str, where: str):
    token = token.strip()
    if token == "":
        return None
    try:
        value = float(token)
    except ValueError as exc:
        raise PanelParseError(f"bad price {token!r} at {where}") from exc
    if not np.isfinite(value) or value <= 0.0:
        raise NonPositivePriceError(f"non-positive price {value!r} at {where}")
    return value


def load_price_csv(path, layout: str = "wide", align: str = "strict") -> PricePanel:
    """Load a price panel from CSV.

    ``layout='wide'`` expects a header ``date,<t1>,<t2>,...`` with one row per
    date; ``layout='long'`` expects ``date,ticker,price`` rows.  Tickers come
    out deduplicated and sorted.  With ``align='strict'`` any missing cell is
    an error; with ``align='intersect'`` the panel is restricted to dates on
    which every ticker has a price.
    """
    if layout not in ("wide", "long"):
        raise ValidationError(f"unknown layout {layout!r}")
    if align not in ("strict", "intersect"):
        raise ValidationError(f"unknown align mode {align!r}")
    rows = _read_rows(path)
    header, body = rows[0], rows[1:]

    # cells[ticker][date] -> price
    cells: dict[str, dict[str, float]] = {}
    if layout == "wide":
        if len(header) < 2 or header[0].strip().lower() != "date":
            raise PanelParseError(f"{path}: wide header must start with 'date'")
        tickers_in_file = [t.strip() for t in header[1:]]
        if len(set(tickers_in_file)) != len(tickers_in_file):
            raise PanelParseError(f"{path}: duplicate ticker column in header")
        dates_in_file = []
        for row in body:
            if len(row) != len(header):
                raise PanelParseError(f"{path}: row for {row[0]!r} has wrong width")
            date = row[0].strip()
            dates_in_file.append(date)
            for ticker, token in zip(tickers_in_file, row[1:]):
                price = _parse_price(token, f"({ticker}, {date})")
                if price is not None:
                    cells.setdefault(ticker, {})[date] = price
        if any(a >= b for a, b in zip(dates_in_file, dates_in_file[1:])):
            raise NonMonotoneDatesError(f"{path}: date rows must strictly increase")
    else:
        if len(header) != 3 or [h.strip().lower() for h in header] != ["date", "ticker", "price"]:
            raise PanelParseError(f"{path}: long header must be 'date,ticker,price'")
        for row in body:
            if len(row) != 3:
                raise PanelParseError(f"{path}: long row {row!r} has wrong width")
            date, ticker = row[0].strip(), row[1].strip()
            price = _parse_price(row[2], f"({ticker}, {date})")
            if price is None:
                raise MissingCellError(f"{path}: empty price for ({ticker}, {date})")
            seen = cells.setdefault(ticker, {})
            if date in seen and seen[date] != price:
                raise PanelParseError(
                    f"{path}: conflicting prices for ({ticker}, {date})"
                )
            seen[date] = price

    tickers = tuple(sorted(cells))
    if len(tickers) < 2:
        raise ValidationError(f"{path}: need at least 2 tickers")
    all_dates = sorted({d for per in cells.values() for d in per})
    if align == "intersect":
        dates = tuple(d for d in all_dates if all(d in cells[t] for t in tickers))
    else:
        dates = tuple(all_dates)
        for ticker in tickers:
            for date in dates:
                if date not in cells[ticker]:
                    raise MissingCellError(f"{path}: missing price for ({ticker}, {date})")
    if len(dates) < 3:
        raise ValidationError(f"{path}: fewer than 3 usable dates")
    prices = np.array([[cells[t][d] for d in dates] for t in tickers], dtype=float)
    return PricePanel(tickers=tickers, dates=dates, prices=prices)


def compute_returns(panel: PricePanel) -> ReturnsPanel:
    """Convert a price panel to daily simple returns ``p[t+1]/p[t] - 1``."""
    returns = panel.prices[:, 1:] / panel.prices[:, :-1] - 1.0
    return ReturnsPanel(tickers=panel.tickers, dates=panel.dates[1:], returns=returns)


def gbm_asset_params(spec: GbmSpec, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-asset (drift, volatility) draws used by :func:`generate_gbm_panel`.

    Uses the same stream as the generator, so the returned parameters are
    exactly the ones realised in the panel for the same ``(spec, seed)``.
    """
    rng = np.random.default_rng(seed)
    return _draw_asset_params(rng, spec)


def _draw_asset_params(rng, spec: GbmSpec):
    mus = rng.uniform(spec.drift_range[0], spec.drift_range[1], size=spec.n_assets)
    sigmas = rng.uniform(spec.vol_range[0], spec.vol_range[1], size=spec.n_assets)
    return mus, sigmas


def generate_gbm_panel(spec: GbmSpec, seed: int) -> PricePanel:
    """Generate a synthetic price panel with equicorrelated Gaussian log-returns.

    Deterministic for a fixed ``(spec, seed)``.  Asset ``i`` gets daily
    log-return ``mu_i + sigma_i * z`` where the ``z`` shocks share the spec's
    pairwise correlation through a single common factor.
    """
    rng = np.random.default_rng(seed)
    mus, sigmas = _draw_asset_params(rng, spec)
    n_steps = spec.n_days - 1
    rho = spec.pairwise_correlation
    common = rng.standard_normal(size=n_steps)
    idio = rng.standard_normal(size=(spec.n_assets, n_steps))
    shocks = np.sqrt(rho) * common[None, :] + np.sqrt(1.0 - rho) * idio
    log_returns = mus[:, None] + sigmas[:, None] * shocks
    prices = np.empty((spec.n_assets, spec.n_days))
    prices[:, 0] = spec.initial_price
    prices[:, 1:] = spec.initial_price * np.exp(np.cumsum(log_returns, axis=1))
    dates = tuple(f"d{t:06d}" for t in range(spec.n_days))
    tickers = tuple(f"A{i:04d}" for i in range(spec.n_assets))
    return PricePanel(tickers=tickers, dates=dates, prices=prices)


def covariance_matrix(panel: ReturnsPanel, window: Window) -> np.ndarray:
    """Sample covariance (divisor P-1) of daily returns over the window.

    Symmetrised so that ``M == M.T`` holds exactly.
    """
    window.check_fits(panel.n_days)
    block = panel.returns[:, window.start : window.stop]
    cov = np.cov(block, ddof=1)
    cov = np.atleast_2d(cov)
    return (cov + cov.T) / 2.0
