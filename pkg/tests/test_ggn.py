import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from ggnlib.errors import DomainError
from ggnlib.ggn import (
    GgnParams,
    ggn_cdf,
    ggn_limit_pdf,
    ggn_logpdf,
    ggn_pdf,
    ggn_quantile,
    ggn_sf,
)
from ggnlib.gn import GnParams, gn_cdf, gn_pdf, gn_quantile

GRID = [(s, a) for s in (0.5, 1, 2, 3) for a in (0.5, 1, 2, 5)]


def test_pdf_values():
    assert ggn_pdf(GgnParams(0, 1, 2, 1), 0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert ggn_pdf(GgnParams(0, 1, 1, 1), 0.0) == pytest.approx(0.5, rel=1e-15)
    v = ggn_pdf(GgnParams(0, 1, 2, 2), 0.0)
    assert v == pytest.approx(math.log(2) / math.sqrt(math.pi), rel=1e-15)
    assert v == pytest.approx(0.39106, abs=1e-5)


def test_cdf_values():
    assert ggn_cdf(GgnParams(2, 3, 1.4, 1), 2.0) == pytest.approx(0.5, abs=1e-15)
    v = ggn_cdf(GgnParams(0, 1, 1.7, 2), 0.0)
    assert v == pytest.approx(1 - (1 + math.log(2)) / 2, rel=1e-14)
    assert v == pytest.approx(0.1534, abs=1e-4)
    p = GgnParams(0, 1, 1.2, 2.5)
    assert ggn_cdf(p, -1e6) == 0.0
    assert ggn_cdf(p, 1e6) == 1.0


def test_quantile_values():
    u = np.linspace(0.01, 0.99, 99)
    g = GnParams(0.2, 1.3, 1.7)
    np.testing.assert_allclose(ggn_quantile(GgnParams(0.2, 1.3, 1.7, 1), u), gn_quantile(g, u), atol=1e-13)
    assert ggn_quantile(GgnParams(0, 1, 2, 1), 0.9213503964748575) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("s,a", GRID)
def test_roundtrip(s, a):
    p = GgnParams(0.5, 2.0, s, a)
    u = np.linspace(0.001, 0.999, 999)
    assert np.max(np.abs(ggn_cdf(p, ggn_quantile(p, u)) - u)) <= 1e-12


def test_extreme_quantiles():
    p = GgnParams(0, 1, 1.5, 3)
    for u in (1e-12, 1 - 1e-12):
        x = ggn_quantile(p, u)
        assert np.isfinite(x)
    assert ggn_sf(p, ggn_quantile(p, 1 - 1e-12)) == pytest.approx(1e-12, rel=1e-8)


def test_limit_values():
    p = GgnParams(0, 2, 5, 1)
    x = np.linspace(-1.9, 1.9, 11)
    np.testing.assert_allclose(ggn_limit_pdf(p, x), 0.25, rtol=1e-15)
    assert ggn_limit_pdf(GgnParams(0, 1, 5, 2), 0.0) == pytest.approx(math.log(2) / 2, rel=1e-15)
    assert ggn_limit_pdf(GgnParams(0, 1, 5, 2), 1.5) == 0.0


def test_limit_convergence_monotone():
    eps = 0.05
    x = np.linspace(-1 + eps, 1 - eps, 400)
    errs = []
    for s in (100, 200, 400):
        p = GgnParams(0, 1, s, 2.0)
        errs.append(np.max(np.abs(ggn_pdf(p, x) - ggn_limit_pdf(p, x))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] < 0.04  # error decays like 1/s: 0.056, 0.033, 0.017


@pytest.mark.parametrize("s,a", GRID)
def test_normalization(s, a):
    p = GgnParams(0, 1, s, a)
    v = sum(integrate.quad(lambda x: ggn_pdf(p, x), lo, hi, limit=200, epsabs=1e-13)[0]
            for lo, hi in ((-np.inf, 0), (0, np.inf)))
    assert v == pytest.approx(1.0, abs=1e-7)


def test_pdf_is_cdf_derivative():
    p = GgnParams(0.3, 1.2, 1.6, 2.4)
    x = ggn_quantile(p, np.linspace(0.02, 0.98, 50))
    h = 1e-5 * np.maximum(1, np.abs(x))
    fd = (ggn_cdf(p, x + h) - ggn_cdf(p, x - h)) / (2 * h)
    np.testing.assert_allclose(fd, ggn_pdf(p, x), rtol=1e-6)


def test_log_tail_path():
    p = GgnParams(0, 1, 2, 3)
    # far right tail: 1 - Phi underflows but the log-density stays finite
    v = ggn_logpdf(p, 40.0)
    z = 40.0
    log_phi = -z * z - math.lgamma(0.5) - math.log(1.0)  # log(2/(2 Gamma(1/2)))
    log_l = math.log(z * z + math.log(2 * z * math.sqrt(math.pi)))
    assert v == pytest.approx(log_phi + 2 * log_l - math.lgamma(3), rel=1e-6)
    assert np.isfinite(ggn_logpdf(p, -40.0))


@given(st.floats(-5, 5), st.floats(0.1, 10), st.floats(0.3, 6), st.floats(0.3, 6), st.floats(-10, 10))
def test_location_scale(mu, sigma, s, a, x):
    lhs = ggn_pdf(GgnParams(mu, sigma, s, a), x)
    rhs = ggn_pdf(GgnParams(0, 1, s, a), (x - mu) / sigma) / sigma
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_special_cases_exact():
    x = np.linspace(-4, 4, 200)
    np.testing.assert_allclose(ggn_pdf(GgnParams(0, 1, 2, 1), x),
                               stats.norm(0, math.sqrt(0.5)).pdf(x), atol=1e-12, rtol=0)
    np.testing.assert_allclose(ggn_pdf(GgnParams(0, 1, 1, 1), x), stats.laplace().pdf(x), atol=1e-12, rtol=0)
    np.testing.assert_allclose(ggn_cdf(GgnParams(0, 1, 1.3, 1), x), gn_cdf(GnParams(0, 1, 1.3), x), atol=1e-14)
    np.testing.assert_allclose(ggn_pdf(GgnParams(0, 1, 1.3, 1), x), gn_pdf(GnParams(0, 1, 1.3), x), rtol=1e-14)


def test_invalid():
    with pytest.raises(DomainError):
        GgnParams(0, 1, 2, 0)
    with pytest.raises(DomainError):
        ggn_quantile(GgnParams(0, 1, 2, 1), 1.0)
