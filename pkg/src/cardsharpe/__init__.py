"""Monte Carlo study of portfolio cardinality against investor-skill quantiles.

Samples equally weighted k-stock portfolios from a returns panel, builds
Sharpe-ratio quantile curves over k, locates raw and penalized optimal
cardinalities, and runs a linear-vs-quadratic regression battery with
information-criterion model selection, on both annual partitions and rolling
windows.
"""

from .config import StudyConfig
from .engine import (
    PortfolioSample,
    SamplingPlan,
    portfolio_return_series,
    sample_portfolios,
    sharpe_distribution,
    sharpe_ratio,
)
from .errors import CardsharpeError
from .market_data import (
    GbmSpec,
    PricePanel,
    ReturnsPanel,
    Window,
    compute_returns,
    covariance_matrix,
    generate_gbm_panel,
    gbm_asset_params,
    load_price_csv,
)
from .optima import (
    OptimaRecord,
    QuantileCurve,
    build_quantile_curve,
    empirical_quantile,
    penalized_optimum,
    raw_optimum,
    sharpe_deviation,
)
from .regression import (
    ModelComparison,
    RegressionFit,
    compare_models,
    ols_fit,
    student_t_two_sided_p,
)
from .study import (
    AnnualStudyRecord,
    RollingSeries,
    annual_partition,
    k0_histogram,
    run_annual_study,
    run_rolling_study,
)

__version__ = "0.1.0"

__all__ = [
    "AnnualStudyRecord",
    "CardsharpeError",
    "GbmSpec",
    "ModelComparison",
    "OptimaRecord",
    "PortfolioSample",
    "PricePanel",
    "QuantileCurve",
    "RegressionFit",
    "ReturnsPanel",
    "RollingSeries",
    "SamplingPlan",
    "StudyConfig",
    "Window",
    "annual_partition",
    "build_quantile_curve",
    "compare_models",
    "compute_returns",
    "covariance_matrix",
    "empirical_quantile",
    "gbm_asset_params",
    "generate_gbm_panel",
    "k0_histogram",
    "load_price_csv",
    "ols_fit",
    "penalized_optimum",
    "portfolio_return_series",
    "raw_optimum",
    "run_annual_study",
    "run_rolling_study",
    "sample_portfolios",
    "sharpe_deviation",
    "sharpe_distribution",
    "sharpe_ratio",
    "student_t_two_sided_p",
]
