import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from ggnlib.errors import DomainError
from ggnlib.estimation import FitOptions
from ggnlib.ggn import GgnParams, ggn_cdf
from ggnlib.gof import (
    GofReport,
    ad_stat,
    cvm_stat,
    empirical_density,
    gof_report,
    info_criteria,
    ks_stat,
    sym_chi2,
    sym_kl,
)
from ggnlib.models import ecdf_model, fit_model
from ggnlib.sampling import StreamSpec, ggn_sample


def test_uniform_grid_bins():
    x = np.linspace(0, 5, 1000)
    h = empirical_density(x, 10)
    np.testing.assert_allclose(h.density, 1 / 5, rtol=1e-12)
    assert h.method == "fixed" and h.bins == 10


def test_density_integrates_to_one():
    x = np.random.default_rng(0).normal(size=777)
    h = empirical_density(x)
    assert math.fsum(h.density * h.widths) == pytest.approx(1.0, abs=1e-12)


def test_fd_bin_count():
    x = np.random.default_rng(1).normal(size=10_000)
    h = empirical_density(x)
    assert 30 <= h.bins <= 120 and h.method == "freedman-diaconis"


def test_zero_iqr_fallback():
    x = np.concatenate([np.zeros(50), [1.0, 2.0]])
    h = empirical_density(x)
    assert h.method.startswith("sqrt-n") and h.bins == math.ceil(math.sqrt(52))


def test_density_errors():
    with pytest.raises(DomainError):
        empirical_density(np.arange(10.0))
    with pytest.raises(DomainError):
        empirical_density(np.ones(30))


def test_toy_divergences():
    f, p = [0.6, 0.4], [0.5, 0.5]
    kl = 0.6 * math.log(1.2) + 0.4 * math.log(0.8) + 0.5 * math.log(0.5 / 0.6) + 0.5 * math.log(1.25)
    assert sym_kl(f, p) == pytest.approx(kl, rel=1e-14)
    assert sym_kl(f, p) == pytest.approx(0.0406, abs=1e-4)
    chi = 0.01 / 0.6 + 0.01 / 0.5 + 0.01 / 0.4 + 0.01 / 0.5
    assert sym_chi2(f, p) == pytest.approx(chi, rel=1e-14)
    assert sym_chi2(f, p) == pytest.approx(0.0817, abs=1e-4)
    assert sym_kl(p, p) == 0 and sym_chi2(p, p) == 0


pos = arrays(float, 8, elements=st.floats(1e-3, 10))


@given(pos, pos)
def test_divergence_symmetry_and_sign(f, p):
    assert sym_kl(f, p) == pytest.approx(sym_kl(p, f), rel=1e-12, abs=1e-15)
    assert sym_kl(f, p) >= 0 and sym_chi2(f, p) >= 0
    assert sym_chi2(f, p) == pytest.approx(sym_chi2(p, f), rel=1e-12, abs=1e-15)


def test_divergence_errors():
    with pytest.raises(DomainError):
        sym_kl([0.5, 0.0], [0.5, 0.5])
    with pytest.raises(DomainError):
        sym_chi2([0.5], [0.5, 0.5])


def test_ks_values():
    cdf = stats.norm.cdf
    assert ks_stat([0.0], cdf) == pytest.approx(0.5)
    n = 200
    x = stats.norm.ppf(np.arange(1, n + 1) / (n + 1))
    assert ks_stat(x, cdf) < 1 / n + 1 / (n + 1)
    y = np.random.default_rng(3).normal(size=10_000)
    assert ks_stat(y, cdf) < 1.6 / math.sqrt(y.size)


def test_ks_matches_scipy():
    y = np.random.default_rng(4).normal(size=300)
    assert ks_stat(y, stats.norm.cdf) == pytest.approx(stats.kstest(y, "norm").statistic, rel=1e-14)


@given(arrays(float, 30, elements=st.floats(-5, 5), unique=True))
def test_ks_invariant_under_monotone_map(x):
    g = np.exp  # strictly increasing
    a = ks_stat(x, stats.norm.cdf)
    b = ks_stat(g(x), lambda v: stats.norm.cdf(np.log(v)))
    assert a == pytest.approx(b, abs=1e-12)


def test_cvm_perfect_spacing():
    n = 50
    u = (2 * np.arange(1, n + 1) - 1) / (2 * n)
    w2 = cvm_stat(u, lambda v: v, modified=False)
    assert w2 == pytest.approx(1 / (12 * n), rel=1e-12)
    assert cvm_stat(u, lambda v: v) == pytest.approx(w2 * (1 + 0.5 / n), rel=1e-12)


def test_cvm_and_ad_match_scipy():
    y = np.random.default_rng(5).normal(size=120)
    assert cvm_stat(y, stats.norm.cdf, modified=False) == pytest.approx(
        stats.cramervonmises(y, "norm").statistic, rel=1e-12)
    # scipy.stats.anderson estimates parameters; compare against the formula directly
    u = np.sort(stats.norm.cdf(y))
    n = y.size
    i = np.arange(1, n + 1)
    a2 = -n - np.sum((2 * i - 1) * (np.log(u) + np.log(1 - u[::-1]))) / n
    assert ad_stat(y, stats.norm.cdf, modified=False) == pytest.approx(a2, rel=1e-12)


def test_cvm_monotone_in_shift():
    y = np.random.default_rng(6).normal(size=200)
    vals = [cvm_stat(y, lambda v, d=d: stats.norm.cdf(v - d)) for d in (0.5, 1.0, 2.0, 3.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_ad_true_model_below_critical():
    hits = 0
    for seed in range(20):
        y = np.random.default_rng(seed).normal(size=10_000)
        hits += ad_stat(y, stats.norm.cdf) < 3.9
    assert hits >= 19


def test_ad_clamp():
    y = np.array([-50.0, 0.0, 1.0])
    assert np.isfinite(ad_stat(y, stats.norm.cdf))
    with pytest.raises(DomainError):
        ad_stat(y, stats.norm.cdf, clamp=False)


def test_info_criteria():
    ic = info_criteria(0.0, 4, 100)
    assert ic.aic == 8 and ic.aicc == pytest.approx(8 + 40 / 95, rel=1e-15)
    assert ic.bic == pytest.approx(4 * math.log(100), rel=1e-15)
    small, big = info_criteria(-10, 2, 50), info_criteria(-10, 4, 50)
    assert small.aic < big.aic and small.aicc < big.aicc and small.bic < big.bic
    assert math.isnan(info_criteria(0, 4, 5).aicc)
    assert info_criteria(-3, 2, 10).aicc >= info_criteria(-3, 2, 10).aic


def test_self_comparison_is_zero():
    x = ggn_sample(GgnParams(0, 1, 1.4, 2.0), 500, StreamSpec(9)).values
    r = gof_report(x, ecdf_model(x))
    assert r.d_kl <= 1e-12 and r.d_chi2 <= 1e-12
    assert r.d_ks == pytest.approx(0.5 / x.size)  # mid-step ecdf sits half a step off


@pytest.fixture(scope="module")
def ggn_model_and_data():
    p = GgnParams(0, 1, 1.4, 2.0)
    x = ggn_sample(p, 400, StreamSpec(10)).values
    return x, fit_model("ggn", x, options=FitOptions())


def test_report_complete_and_deterministic(ggn_model_and_data):
    x, m = ggn_model_and_data
    r1, r2 = gof_report(x, m), gof_report(x, m)
    assert r1 == r2
    for k in ("d_kl", "d_chi2", "d_ks", "w_star", "a_star", "aic", "aicc", "bic"):
        assert math.isfinite(getattr(r1, k))
    assert 0 <= r1.d_ks <= 1 and r1.aicc >= r1.aic
    assert r1.binning["method"] == "freedman-diaconis"
    assert GofReport.from_dict(r1.to_dict()) == r1


def test_report_uses_model_cdf(ggn_model_and_data):
    x, m = ggn_model_and_data
    r = gof_report(x, m)
    assert r.d_ks == pytest.approx(ks_stat(x, lambda v: ggn_cdf(m.fit.ggn_params(), v)), rel=1e-14)
