import math

import numpy as np
import pytest

from ggnlib.errors import DomainError
from ggnlib.models import FittedModel, ecdf_model, fit_model, support_map
from ggnlib.sampling import StreamSpec, ggn_sample
from ggnlib.ggn import GgnParams


@pytest.fixture(scope="module")
def data():
    return ggn_sample(GgnParams(0.0, 1.0, 1.5, 2.0), 300, StreamSpec(11)).values


def test_support_map_identity_for_ggn(data):
    assert support_map("ggn", data, "auto").reason == "identity"
    assert support_map("beta", data, "none").reason == "identity"


def test_support_map_places_data_inside(data):
    g = support_map("gamma", data, "auto")
    assert g.forward(data).min() > 0
    b = support_map("beta", data, "auto")
    y = b.forward(data)
    assert y.min() > 0 and y.max() < 1
    np.testing.assert_allclose(b.inverse(y), data, rtol=0, atol=1e-12)


def test_support_map_errors(data):
    with pytest.raises(DomainError):
        support_map("beta", data, "sideways")
    with pytest.raises(DomainError):
        support_map("beta", np.full(10, 2.0), "auto")
    with pytest.raises(DomainError):
        fit_model("cauchy", data)


@pytest.mark.parametrize("model", ["gamma", "beta"])
def test_loglik_includes_jacobian(data, model):
    m = fit_model(model, data, support="auto")
    assert m.fit.converged
    direct = math.fsum(np.log(m.pdf(data)))
    assert m.loglik == pytest.approx(direct, rel=1e-9)


def test_ggn_model_pdf_cdf_quantile(data):
    m = fit_model("ggn", data)
    assert m.name == "GGN" and m.k_params == 4
    u = np.array([0.05, 0.5, 0.95])
    np.testing.assert_allclose(m.cdf(m.quantile(u)), u, atol=1e-10)
    assert m.loglik == pytest.approx(math.fsum(np.log(m.pdf(data))), rel=1e-9)


def test_round_trip(data):
    m = fit_model("beta", data, support="auto")
    assert FittedModel.from_dict(m.to_dict()) == m


def test_ecdf_model_is_self_consistent(data):
    e = ecdf_model(data)
    c = e.cdf(np.sort(data))
    assert np.all(np.diff(c) > 0) and 0 < c[0] < c[-1] < 1
    assert np.all(e.pdf(data) > 0)
