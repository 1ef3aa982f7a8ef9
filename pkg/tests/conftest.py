import numpy as np
import pytest

from cardsharpe import GbmSpec, SamplingPlan, compute_returns, generate_gbm_panel


@pytest.fixture(scope="session")
def small_panel():
    """20 assets x 299 return days of mildly heterogeneous GBM data."""
    spec = GbmSpec(
        n_assets=20,
        n_days=300,
        drift_range=(-0.0008, 0.0012),
        vol_range=(0.01, 0.02),
        pairwise_correlation=0.3,
    )
    return compute_returns(generate_gbm_panel(spec, seed=101))


@pytest.fixture(scope="session")
def tiny_plan():
    return SamplingPlan(seed=42, n_samples=200, k_min=2, k_max=10)


@pytest.fixture()
def identical_asset_panel():
    """Panel whose rows are all the same non-constant series."""
    rng = np.random.default_rng(5)
    row = rng.normal(0.0005, 0.01, size=120)
    returns = np.tile(row, (12, 1))
    from cardsharpe import ReturnsPanel

    return ReturnsPanel(
        tickers=tuple(f"T{i}" for i in range(12)),
        dates=tuple(f"d{t:03d}" for t in range(120)),
        returns=returns,
    )
