import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from ggnlib.errors import DomainError
from ggnlib.gn import GnParams, gn_cdf, gn_pdf, gn_quantile, std_gn_cdf, std_gn_pdf


def test_pdf_values():
    assert gn_pdf(GnParams(0, 1, 2), 0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert gn_pdf(GnParams(0, 1, 1), 0.0) == pytest.approx(0.5, rel=1e-15)
    assert gn_pdf(GnParams(3, 2, 2), 3.0) == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-15)


def test_cdf_values():
    assert std_gn_cdf(2.7, 0.0) == 0.5
    ref = float(mp.quad(lambda z: mp.exp(-z * z) / mp.sqrt(mp.pi), [-mp.inf, 0, 1]))
    assert std_gn_cdf(2.0, 1.0) == pytest.approx(ref, abs=1e-14)
    assert ref == pytest.approx(0.9213503964748575, abs=1e-15)  # frozen
    assert std_gn_cdf(1.0, -0.7) == pytest.approx(math.exp(-0.7) / 2, rel=1e-15)
    assert gn_cdf(GnParams(0, 1, 2), 1.0) == pytest.approx(ref, abs=1e-14)
    assert gn_cdf(GnParams(4, 3, 0.7), 4.0) == 0.5


def test_quantile_values():
    assert gn_quantile(GnParams(1.5, 2, 3), 0.5) == 1.5
    assert gn_quantile(GnParams(0, 1, 1), 0.75) == pytest.approx(math.log(2), rel=1e-15)
    u = np.arange(1, 100) / 100
    for s in (0.5, 1.0, 2.0, 5.0):
        p = GnParams(0.3, 1.7, s)
        np.testing.assert_allclose(gn_cdf(p, gn_quantile(p, u)), u, atol=1e-13)


def test_monotone_cdf():
    x = np.linspace(-6, 6, 500)
    assert np.all(np.diff(gn_cdf(GnParams(0, 1, 1.3), x)) > 0)


@pytest.mark.parametrize("s", [0.5, 1, 2, 3, 8, 16])
def test_normalized(s):
    v, _ = integrate.quad(lambda z: std_gn_pdf(s, z), -np.inf, np.inf, epsabs=1e-12, limit=200)
    assert v == pytest.approx(1.0, abs=1e-8)


def test_special_cases():
    x = np.linspace(-5, 5, 201)
    np.testing.assert_allclose(gn_pdf(GnParams(0.4, 1.3, 2), x),
                               stats.norm(0.4, 1.3 / math.sqrt(2)).pdf(x), atol=1e-12, rtol=0)
    np.testing.assert_allclose(gn_pdf(GnParams(0.4, 1.3, 1), x),
                               stats.laplace(0.4, 1.3).pdf(x), atol=1e-12, rtol=0)


@given(st.floats(0.2, 20), st.floats(-30, 30))
def test_symmetry(s, z):
    assert abs(std_gn_cdf(s, -z) - (1 - std_gn_cdf(s, z))) <= 1e-14
    assert std_gn_pdf(s, z) == std_gn_pdf(s, -z)


@pytest.mark.parametrize("s", [50.0, 400.0, 2000.0])
def test_cdf_near_center_large_s(s):
    # |z|**s underflows here; the cdf must still move away from 1/2.
    z = 0.2
    ref = 0.5 + 0.5 * float(mp.gammainc(1 / mp.mpf(s), 0, mp.mpf(z) ** s, regularized=True))
    assert std_gn_cdf(s, z) == pytest.approx(ref, rel=1e-13)
    assert gn_quantile(GnParams(0, 1, s), ref) == pytest.approx(z, rel=1e-12)


def test_cdf_clamp_flag():
    assert std_gn_cdf(2.0, 40.0) == 1.0
    assert std_gn_cdf(2.0, 40.0, clamp=True) < 1.0
    assert std_gn_cdf(2.0, -40.0, clamp=True) > 0.0


def test_invalid_params():
    with pytest.raises(DomainError):
        GnParams(0, -1, 2)
    with pytest.raises(DomainError):
        GnParams(0, 1, 0)
    with pytest.raises(DomainError):
        GnParams(float("nan"), 1, 2)
