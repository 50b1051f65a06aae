"""Uniform pdf/cdf/log-likelihood access to fitted models.

A :class:`FittedModel` wraps a :class:`~ggnlib.estimation.FitResult` and an
optional affine support map ``y = (x - loc) / scale``.  The map lets the
gamma and beta baselines be fitted to data moved onto their support while
densities, cdfs and log-likelihoods stay on the original data scale (the
log-likelihood carries the Jacobian ``-n log scale``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DomainError
from .estimation import FitOptions, FitResult, ModelTag, fit_beta, fit_gamma, fit_ggn
from .ggn import GgnParams, ggn_cdf, ggn_pdf, ggn_quantile
from .gof import BinnedDensity, empirical_density
from .sample import as_values

__all__ = ["FittedModel", "SupportMap", "support_map", "fit_model", "ecdf_model", "MODEL_NAMES"]

MODEL_NAMES = ("ggn", "gamma", "beta")


@dataclass(frozen=True)
class SupportMap:
    """``y = (x - loc) / scale``; identity by default."""

    loc: float = 0.0
    scale: float = 1.0
    reason: str = "identity"

    def forward(self, x):
        return (np.asarray(x, dtype=float) - self.loc) / self.scale

    def inverse(self, y):
        return self.loc + self.scale * np.asarray(y, dtype=float)

    def to_dict(self):
        return {"loc": self.loc, "scale": self.scale, "reason": self.reason}


def support_map(model: str, data, mode="none") -> SupportMap:
    """Map that places ``data`` inside the support of ``model``.

    ``mode="none"`` returns the identity.  ``mode="auto"`` shifts data to be
    strictly positive for the gamma model and rescales it into ``(0, 1)``
    for the beta model, leaving a margin of ``range / n`` beyond the
    extremes.  The GGN model always gets the identity.
    """
    if mode == "none" or model == "ggn":
        return SupportMap()
    if mode != "auto":
        raise DomainError(f"unknown support mode {mode!r}")
    x = as_values(data)
    lo, hi = float(x.min()), float(x.max())
    margin = (hi - lo) / x.size
    if not margin > 0:
        raise DomainError("cannot map a constant sample onto a model support")
    if model == "gamma":
        if lo > 0:
            return SupportMap()
        return SupportMap(lo - margin, 1.0, "shift to positive values")
    if model == "beta":
        if lo > 0 and hi < 1:
            return SupportMap()
        a, b = lo - margin, hi + margin
        return SupportMap(a, b - a, "rescale into (0, 1)")
    raise DomainError(f"unknown model {model!r}")


@dataclass(frozen=True)
class FittedModel:
    fit: FitResult
    transform: SupportMap = SupportMap()

    @property
    def name(self):
        return self.fit.model_tag.value

    @property
    def k_params(self):
        return self.fit.k_params

    @property
    def loglik(self):
        # Jacobian of the support map.
        return self.fit.loglik - self.fit.n_obs * math.log(self.transform.scale)

    def _dist(self):
        tag = self.fit.model_tag
        if tag is ModelTag.GAMMA:
            shape, rate = self.fit.estimates
            return stats.gamma(shape, scale=1.0 / rate)
        if tag is ModelTag.BETA:
            return stats.beta(*self.fit.estimates)
        return None

    def pdf(self, x):
        y = self.transform.forward(x)
        if self.fit.model_tag is ModelTag.GGN:
            v = ggn_pdf(GgnParams(*self.fit.estimates), y)
        else:
            v = self._dist().pdf(y)
        return np.asarray(v, dtype=float) / self.transform.scale

    def cdf(self, x):
        y = self.transform.forward(x)
        if self.fit.model_tag is ModelTag.GGN:
            return np.asarray(ggn_cdf(GgnParams(*self.fit.estimates), y), dtype=float)
        return self._dist().cdf(y)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if self.fit.model_tag is ModelTag.GGN:
            y = ggn_quantile(GgnParams(*self.fit.estimates), u)
        else:
            y = self._dist().ppf(u)
        return self.transform.inverse(y)

    def to_dict(self):
        return {"fit": self.fit.to_dict(), "transform": self.transform.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(FitResult.from_dict(d["fit"]), SupportMap(**d.get("transform", {})))


def fit_model(model: str, data, *, support="none", options: FitOptions = FitOptions()) -> FittedModel:
    """Fit ``model`` (``"ggn"``, ``"gamma"`` or ``"beta"``) to ``data``."""
    x = as_values(data)
    tmap = support_map(model, x, support)
    y = tmap.forward(x)
    if model == "ggn":
        fit = fit_ggn(y, options)
    elif model == "gamma":
        fit = fit_gamma(y, options)
    elif model == "beta":
        fit = fit_beta(y, options)
    else:
        raise DomainError(f"unknown model {model!r}; choose from {MODEL_NAMES}")
    return FittedModel(fit, tmap)


@dataclass(frozen=True)
class _EcdfModel:
    """Self-comparison model built from a sample's own histogram and ecdf."""

    hist: BinnedDensity
    sorted_values: np.ndarray
    loglik: float = 0.0
    k_params: int = 1
    name: str = "ECDF"

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.hist.edges, x, side="right") - 1, 0, self.hist.bins - 1)
        return self.hist.density[idx]

    def cdf(self, x):
        # Mid-step ecdf (i - 1/2) / n so the Anderson-Darling logs stay finite.
        x = np.asarray(x, dtype=float)
        n = self.sorted_values.size
        lo = np.searchsorted(self.sorted_values, x, side="left")
        hi = np.searchsorted(self.sorted_values, x, side="right")
        return (lo + hi) / (2.0 * n)


def ecdf_model(data, bins="auto"):
    """Model whose density is the sample histogram and cdf the mid-ecdf."""
    x = as_values(data)
    return _EcdfModel(empirical_density(x, bins), np.sort(x))
