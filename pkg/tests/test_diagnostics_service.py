import numpy as np
import pandas as pd
import pytest

from src.services import diagnostics_service
from src.services.diagnostics_service import autocorr, iat_ess, diagnose_trace, summarize_reports
from src.services.errors import DataError


def _ar1(phi, size, seed=0):
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(size)
    x = np.empty(size)
    x[0] = noise[0]
    for t in range(1, size):
        x[t] = phi * x[t - 1] + noise[t]
    return x


class TestAutocorrelation:

    def test_alternating_series(self):
        rho = autocorr(np.tile([0.0, 1.0], 500))
        assert rho[0] == 1.0
        assert rho[1] == pytest.approx(-1.0, abs=1e-2)
        assert rho[2] == pytest.approx(1.0, abs=1e-2)

    def test_biased_normalisation(self):
        rho = autocorr(np.array([0.0, 1.0]))
        assert rho.tolist() == pytest.approx([1.0, -0.5])

    def test_constant_series(self):
        with pytest.raises(DataError, match="zero-variance series"):
            autocorr(np.full(10, 3.0))


class TestIatEss:

    def test_shortest_series(self):
        report = iat_ess(np.array([0.0, 1.0, 0.0, 1.0]))
        assert report.M == 2
        assert report.cutoff_C == 1
        assert report.tau_hat == pytest.approx(0.5)
        assert report.ess == pytest.approx(4.0 / 1.5)
        assert report.ess_conventional == pytest.approx(2.0)

    @pytest.mark.parametrize("phi", [0.0, 0.5, 0.9])
    def test_ess_identity(self, phi):
        report = iat_ess(_ar1(phi, 4000, seed=1))
        assert report.ess * (1.0 + report.tau_hat) == pytest.approx(2 * report.M)

    def test_white_noise(self):
        report = iat_ess(_ar1(0.0, 20000, seed=2))
        assert report.tau_hat == pytest.approx(0.5, abs=0.2)

    @pytest.mark.parametrize("phi", [0.5, 0.9])
    def test_matches_truncated_geometric_sum(self, phi):
        report = iat_ess(_ar1(phi, 20000, seed=3))
        expected = 0.5 + sum(phi ** lag for lag in range(1, report.cutoff_C))
        assert report.tau_hat == pytest.approx(expected, rel=0.25)
        assert report.ess < report.M

    def test_shuffling_lowers_tau(self):
        x = _ar1(0.8, 10000, seed=4)
        shuffled = np.random.default_rng(5).permutation(x)
        assert iat_ess(shuffled).tau_hat < iat_ess(x).tau_hat

    def test_only_second_half_counts(self):
        x = np.concatenate([np.full(500, 100.0), _ar1(0.0, 500, seed=6)])
        report = iat_ess(x)
        assert report.M == 500
        assert report.tau_hat < 1.0

    def test_conventional_ess_with_non_positive_tau(self, monkeypatch):
        rho = np.zeros(50)
        rho[0], rho[1] = 1.0, -0.7
        monkeypatch.setattr(diagnostics_service, 'autocorr', lambda series, max_lag=None: rho)
        report = diagnostics_service.iat_ess(np.arange(100.0))
        assert report.cutoff_C == 2
        assert report.tau_hat == pytest.approx(-0.2)
        assert report.ess == pytest.approx(100 / 0.8)
        assert np.isfinite(report.ess_conventional) and report.ess_conventional > 0


    def test_constant_series(self):
        with pytest.raises(DataError, match="zero-variance series"):
            iat_ess(np.ones(100))

    @pytest.mark.parametrize("series", [np.array([1.0, 2.0, 3.0]), np.array([1.0, np.nan, 2.0, 3.0, 4.0])])
    def test_invalid_series(self, series):
        with pytest.raises(DataError):
            iat_ess(series)


class TestTraceDiagnostics:

    def test_one_report_per_chain(self):
        frame = pd.DataFrame({
            'chain': np.repeat([0, 1], 200),
            'iteration': np.tile(np.arange(1, 201), 2),
            'K': np.concatenate([_ar1(0.5, 200, seed=7), _ar1(0.5, 200, seed=8)]),
        })
        reports = diagnose_trace(frame.sample(frac=1.0, random_state=0), 'K')
        assert len(reports) == 2
        assert reports[0].tau_hat == pytest.approx(iat_ess(frame['K'][:200].to_numpy()).tau_hat)
        summary = summarize_reports(reports)
        assert summary['tau_hat']['mean'] == pytest.approx(np.mean([r.tau_hat for r in reports]))

    def test_missing_column(self):
        with pytest.raises(DataError, match="no column"):
            diagnose_trace(pd.DataFrame({'iteration': [1, 2], 'K': [1, 2]}), 'log_joint')

    def test_constant_chain_is_named(self):
        frame = pd.DataFrame({'chain': [0] * 6 + [1] * 6, 'iteration': list(range(6)) * 2, 'K': [1, 2, 1, 3, 2, 1] + [2] * 6})
        with pytest.raises(DataError, match="chain 1"):
            diagnose_trace(frame, 'K')
