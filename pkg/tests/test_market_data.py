import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardsharpe import (
    GbmSpec,
    PricePanel,
    ReturnsPanel,
    Window,
    compute_returns,
    covariance_matrix,
    gbm_asset_params,
    generate_gbm_panel,
    load_price_csv,
)
from cardsharpe.errors import (
    DegenerateSpecError,
    MissingCellError,
    NonMonotoneDatesError,
    NonPositivePriceError,
    PanelParseError,
    ValidationError,
)


def write(tmp_path, text, name="prices.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadPriceCsv:
    def test_wide_constant_panel(self, tmp_path):
        path = write(
            tmp_path,
            "date,AAA,BBB\n2020-01-01,100,100\n2020-01-02,100,100\n2020-01-03,100,100\n",
        )
        panel = load_price_csv(path, layout="wide")
        assert panel.tickers == ("AAA", "BBB")
        assert panel.prices.shape == (2, 3)
        assert np.all(panel.prices == 100.0)

    def test_long_hole_is_missing_cell(self, tmp_path):
        path = write(
            tmp_path,
            "date,ticker,price\n"
            "2020-01-01,AAA,10\n2020-01-02,AAA,10\n2020-01-03,AAA,10\n"
            "2020-01-01,BBB,20\n2020-01-03,BBB,20\n",
        )
        with pytest.raises(MissingCellError):
            load_price_csv(path, layout="long")

    def test_long_intersect_drops_incomplete_dates(self, tmp_path):
        path = write(
            tmp_path,
            "date,ticker,price\n"
            "2020-01-01,AAA,10\n2020-01-02,AAA,11\n2020-01-03,AAA,12\n2020-01-04,AAA,13\n"
            "2020-01-01,BBB,20\n2020-01-03,BBB,21\n2020-01-04,BBB,22\n",
        )
        panel = load_price_csv(path, layout="long", align="intersect")
        assert panel.dates == ("2020-01-01", "2020-01-03", "2020-01-04")

    def test_zero_price_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "date,AAA,BBB\n2020-01-01,100,0\n2020-01-02,100,100\n2020-01-03,100,100\n",
        )
        with pytest.raises(NonPositivePriceError):
            load_price_csv(path, layout="wide")

    def test_unsorted_wide_dates_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "date,AAA,BBB\n2020-01-02,100,100\n2020-01-01,100,100\n2020-01-03,100,100\n",
        )
        with pytest.raises(NonMonotoneDatesError):
            load_price_csv(path, layout="wide")

    def test_tickers_sorted(self, tmp_path):
        path = write(
            tmp_path,
            "date,ZZZ,AAA\n2020-01-01,1,2\n2020-01-02,1,2\n2020-01-03,1,2\n",
        )
        panel = load_price_csv(path, layout="wide")
        assert panel.tickers == ("AAA", "ZZZ")
        assert np.all(panel.prices[0] == 2.0)

    def test_duplicate_wide_column_rejected(self, tmp_path):
        path = write(tmp_path, "date,AAA,AAA\n2020-01-01,1,1\n2020-01-02,1,1\n")
        with pytest.raises(PanelParseError):
            load_price_csv(path, layout="wide")

    def test_conflicting_long_duplicate_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "date,ticker,price\n2020-01-01,AAA,10\n2020-01-01,AAA,11\n",
        )
        with pytest.raises(PanelParseError):
            load_price_csv(path, layout="long")

    def test_garbage_price_is_parse_error(self, tmp_path):
        path = write(
            tmp_path,
            "date,AAA,BBB\n2020-01-01,abc,1\n2020-01-02,1,1\n2020-01-03,1,1\n",
        )
        with pytest.raises(PanelParseError):
            load_price_csv(path, layout="wide")

    def test_bad_layout_rejected(self, tmp_path):
        path = write(tmp_path, "date,AAA\n")
        with pytest.raises(ValidationError):
            load_price_csv(path, layout="ohlc")


class TestComputeReturns:
    def test_constant_prices(self):
        panel = PricePanel(("A", "B"), ("d1", "d2", "d3"), np.full((2, 3), 100.0))
        returns = compute_returns(panel)
        assert returns.returns.shape == (2, 2)
        assert np.all(returns.returns == 0.0)

    def test_hand_computed(self):
        panel = PricePanel(
            ("A", "B"), ("d1", "d2", "d3"), np.array([[100.0, 110.0, 99.0]] * 2)
        )
        returns = compute_returns(panel)
        assert returns.returns[0] == pytest.approx([0.10, -0.10])

    def test_identical_rows_give_identical_returns(self):
        prices = np.array([[100.0, 105.0, 103.0, 110.0]] * 2)
        returns = compute_returns(PricePanel(("A", "B"), ("d1", "d2", "d3", "d4"), prices))
        assert np.array_equal(returns.returns[0], returns.returns[1])

    def test_round_trip_reconstruction(self, small_panel):
        spec = GbmSpec(n_assets=6, n_days=50)
        prices = generate_gbm_panel(spec, seed=3)
        returns = compute_returns(prices)
        rebuilt = prices.prices[:, :1] * np.cumprod(1.0 + returns.returns, axis=1)
        np.testing.assert_allclose(rebuilt, prices.prices[:, 1:], rtol=1e-12)


class TestGbm:
    def test_zero_noise_degenerate(self):
        spec = GbmSpec(
            n_assets=3, n_days=10, drift_range=(0.0, 0.0), vol_range=(0.0, 0.0)
        )
        panel = generate_gbm_panel(spec, seed=1)
        assert np.all(panel.prices == spec.initial_price)

    def test_deterministic_for_fixed_seed(self):
        spec = GbmSpec(n_assets=5, n_days=40)
        first = generate_gbm_panel(spec, seed=77)
        second = generate_gbm_panel(spec, seed=77)
        assert np.array_equal(first.prices, second.prices)
        assert first.dates == second.dates

    def test_mean_log_return_matches_drawn_drift(self):
        spec = GbmSpec(
            n_assets=5,
            n_days=10_001,
            drift_range=(0.0001, 0.002),
            vol_range=(0.01, 0.02),
            pairwise_correlation=0.3,
        )
        seed = 123
        mus, sigmas = gbm_asset_params(spec, seed)
        panel = generate_gbm_panel(spec, seed)
        log_returns = np.diff(np.log(panel.prices), axis=1)
        n = log_returns.shape[1]
        for i in range(spec.n_assets):
            se = sigmas[i] / np.sqrt(n)
            assert abs(log_returns[i].mean() - mus[i]) < 3 * se

    def test_degenerate_spec_rejected(self):
        with pytest.raises(DegenerateSpecError):
            GbmSpec(n_assets=1, n_days=10)
        with pytest.raises(DegenerateSpecError):
            GbmSpec(n_assets=5, n_days=2)

    def test_bad_ranges_rejected(self):
        with pytest.raises(ValidationError):
            GbmSpec(n_assets=3, n_days=10, drift_range=(0.01, -0.01))
        with pytest.raises(ValidationError):
            GbmSpec(n_assets=3, n_days=10, vol_range=(-0.01, 0.01))
        with pytest.raises(ValidationError):
            GbmSpec(n_assets=3, n_days=10, pairwise_correlation=1.0)


class TestCovariance:
    def test_single_window_hand_value(self):
        returns = np.array([[0.01, -0.01], [0.01, -0.01]])
        panel = ReturnsPanel(("A", "B"), ("d1", "d2"), returns)
        cov = covariance_matrix(panel, Window(0, 2))
        np.testing.assert_allclose(cov, np.full((2, 2), 2e-4), rtol=1e-12)

    def test_constant_window_is_zero(self):
        returns = np.full((3, 6), 0.25)
        panel = ReturnsPanel(("A", "B", "C"), tuple(f"d{i}" for i in range(6)), returns)
        cov = covariance_matrix(panel, Window(1, 4))
        assert np.all(cov == 0.0)

    def test_exact_symmetry_and_psd(self, small_panel):
        cov = covariance_matrix(small_panel, Window(10, 120))
        assert np.array_equal(cov, cov.T)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.normal(size=cov.shape[0])
            assert x @ cov @ x >= -1e-10 * (x @ x)

    def test_window_must_fit(self, small_panel):
        with pytest.raises(ValidationError):
            covariance_matrix(small_panel, Window(small_panel.n_days - 3, 10))


class TestWindow:
    def test_validation(self):
        with pytest.raises(ValidationError):
            Window(-1, 10)
        with pytest.raises(ValidationError):
            Window(0, 1)
        assert Window(3, 5).stop == 8


class TestPanelInvariants:
    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            PricePanel(("A", "B"), ("d1", "d2"), np.ones((2, 3)))

    def test_too_few_tickers(self):
        with pytest.raises(ValidationError):
            PricePanel(("A",), ("d1", "d2", "d3"), np.ones((1, 3)))

    def test_nonfinite_price(self):
        prices = np.ones((2, 3))
        prices[0, 1] = np.inf
        with pytest.raises(NonPositivePriceError):
            PricePanel(("A", "B"), ("d1", "d2", "d3"), prices)

    def test_non_monotone_dates(self):
        with pytest.raises(NonMonotoneDatesError):
            PricePanel(("A", "B"), ("d2", "d1", "d3"), np.ones((2, 3)))

    def test_returns_bound(self):
        returns = np.zeros((2, 2))
        returns[1, 1] = -1.5
        with pytest.raises(ValidationError):
            ReturnsPanel(("A", "B"), ("d1", "d2"), returns)


@settings(max_examples=40, deadline=None)
@given(
    start=st.floats(1.0, 1e4),
    steps=st.lists(st.floats(-0.5, 1.0), min_size=2, max_size=40),
)
def test_price_return_round_trip(start, steps):
    row = start * np.cumprod(1.0 + np.asarray([0.0, *steps]))
    prices = np.vstack([row, row * 2.0])
    panel = PricePanel(("A", "B"), tuple(f"d{i:03d}" for i in range(row.size)), prices)
    returns = compute_returns(panel)
    rebuilt = prices[:, :1] * np.cumprod(1.0 + returns.returns, axis=1)
    np.testing.assert_allclose(rebuilt, prices[:, 1:], rtol=1e-12)
