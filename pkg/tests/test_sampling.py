import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from ggnlib.errors import DomainError
from ggnlib.ggn import GgnParams, gn_from_gamma, ggn_cdf, ggn_quantile
from ggnlib.sample import Sample
from ggnlib.sampling import GENERATOR_NAME, StreamSpec, gamma_variate, ggn_sample, uniforms
from ggnlib.specfun import gamma_quantile, reg_lower_inc_gamma


def test_uniforms_open_interval():
    u = uniforms(StreamSpec(1).generator(), 10_000)
    assert u.min() > 0 and u.max() < 1


def test_gamma_variate_means():
    assert abs(gamma_variate(1.0, StreamSpec(11), 100_000).mean() - 1) < 0.02
    assert abs(gamma_variate(5.0, StreamSpec(12), 100_000).mean() - 5) < 0.05


def test_gamma_variate_scalar_and_repro():
    a = gamma_variate(2.0, StreamSpec(5, 3))
    assert isinstance(a, float)
    assert a == gamma_variate(2.0, StreamSpec(5, 3))
    np.testing.assert_array_equal(gamma_variate(0.4, StreamSpec(5, 3), 50),
                                  gamma_variate(0.4, StreamSpec(5, 3), 50))


def test_streams_differ():
    x = gamma_variate(1.0, StreamSpec(5, 0), 1000)
    y = gamma_variate(1.0, StreamSpec(5, 1), 1000)
    z = gamma_variate(1.0, StreamSpec(6, 0), 1000)
    assert not np.array_equal(x, y) and not np.array_equal(x, z)
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.1


def test_frozen_first_draws():
    # guards the generator pinning (Philox, SeedSequence spawn keys)
    x = ggn_sample(GgnParams(0, 1, 2, 1.5), 3, StreamSpec(2024, 7)).values
    again = ggn_sample(GgnParams(0, 1, 2, 1.5), 3, StreamSpec(2024, 7)).values
    np.testing.assert_array_equal(x, again)
    assert GENERATOR_NAME == "Philox"


def test_branch_point_maps_to_mu():
    p = GgnParams(1.5, 2.0, 1.3, 2.2)
    assert gn_from_gamma(p, math.log(2)) == pytest.approx(1.5, abs=1e-15)


def test_ks_normal_case():
    p = GgnParams(0, 1, 2, 1)
    x = ggn_sample(p, 100_000, StreamSpec(99)).values
    assert stats.kstest(x, lambda v: ggn_cdf(p, v)).statistic < 0.006


def test_fraction_below_mu():
    p = GgnParams(0, 1, 0.5, 4)
    x = ggn_sample(p, 100_000, StreamSpec(3)).values
    assert abs(np.mean(x < 0) - ggn_cdf(p, 0.0)) < 0.01


def test_branch_frequency():
    a = 2.5
    p = GgnParams(0, 1, 1.4, a)
    n = 100_000
    x = ggn_sample(p, n, StreamSpec(17)).values
    prob = reg_lower_inc_gamma(a, math.log(2))
    assert prob == pytest.approx(ggn_cdf(p, 0.0), rel=1e-14)
    se = math.sqrt(prob * (1 - prob) / n)
    assert abs(np.mean(x <= 0) - prob) < 3 * se


def test_monotone_coupling():
    p = GgnParams(0, 1, 0.8, 1.7)
    z = np.concatenate([np.linspace(1e-6, 15, 3000), [math.log(2)]])
    z.sort()
    x = gn_from_gamma(p, z)
    assert np.all(np.diff(x) >= 0)
    assert np.all(np.diff(x)[np.diff(z) > 1e-12] > 0)


def test_quantile_consistency():
    u = np.linspace(0.005, 0.995, 199)
    for p in (GgnParams(0, 1, 1.2, 0.6), GgnParams(2, 3, 2.5, 3.1)):
        np.testing.assert_allclose(gn_from_gamma(p, gamma_quantile(p.a, u)), ggn_quantile(p, u),
                                   atol=1e-9, rtol=1e-9)


def test_sample_metadata():
    s = ggn_sample(GgnParams(0, 1, 2, 2), 10, StreamSpec(4, 2))
    assert isinstance(s, Sample) and len(s) == 10
    assert s.metadata["base_seed"] == 4 and s.metadata["stream_index"] == 2
    assert s.metadata["params"]["a"] == 2
    with pytest.raises(ValueError):
        s.values[0] = 1.0


def test_invalid():
    with pytest.raises(DomainError):
        StreamSpec(-1)
    with pytest.raises(DomainError):
        ggn_sample(GgnParams(0, 1, 2, 1), 0, StreamSpec(1))
    with pytest.raises(DomainError):
        gamma_variate(0.0, StreamSpec(1))


@given(st.integers(0, 2**63), st.integers(0, 1000))
def test_reproducible_any_stream(seed, idx):
    p = GgnParams(0, 1, 1.5, 2)
    assert ggn_sample(p, 4, StreamSpec(seed, idx)) == ggn_sample(p, 4, StreamSpec(seed, idx))
