"""Goodness-of-fit statistics for a fitted model against a sample.

Two families are provided.  Histogram-based divergences compare the model
density at bin centers with the empirical (binned) density.  Ecdf-based
statistics (Kolmogorov-Smirnov, Cramer-von Mises, Anderson-Darling) use the
model cdf at the order statistics.  Information criteria complete the
report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError
from .sample import as_values

__all__ = [
    "BinnedDensity",
    "InfoCriteria",
    "GofReport",
    "empirical_density",
    "sym_kl",
    "sym_chi2",
    "ks_stat",
    "cvm_stat",
    "ad_stat",
    "info_criteria",
    "gof_report",
    "CVM_FACTOR",
    "AD_FACTOR",
    "MIN_BINNED_SIZE",
]

MIN_BINNED_SIZE = 20
CVM_FACTOR = "W2 * (1 + 0.5/n)"
AD_FACTOR = "A2 * (1 + 0.75/n + 2.25/n**2)"
_TINY = np.finfo(float).tiny
_ONE_MINUS = np.nextafter(1.0, 0.0)


@dataclass(frozen=True, eq=False)
class BinnedDensity:
    """Histogram normalized to unit area."""

    edges: np.ndarray
    counts: np.ndarray
    method: str

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def density(self):
        return self.counts / (self.counts.sum() * self.widths)

    @property
    def bins(self):
        return self.counts.size

    def descriptor(self):
        return {"method": self.method, "bins": int(self.bins), "edges": [float(e) for e in self.edges]}


def _fd_bins(x):
    q75, q25 = np.percentile(x, [75, 25])
    iqr = q75 - q25
    span = x.max() - x.min()
    if iqr > 0:
        width = 2.0 * iqr / x.size ** (1.0 / 3.0)
        return max(1, int(math.ceil(span / width))), "freedman-diaconis"
    return int(math.ceil(math.sqrt(x.size))), "sqrt-n (zero IQR)"


def empirical_density(data, bins="auto") -> BinnedDensity:
    """Histogram density of ``data``.

    Parameters
    ----------
    data : Sample or array_like
        At least 20 observations, not all equal.
    bins : int or "auto"
        Bin count; ``"auto"`` applies the Freedman-Diaconis width
        ``2 IQR / n^(1/3)``, or ``ceil(sqrt(n))`` bins when the IQR is zero.
    """
    x = as_values(data)
    if x.size < MIN_BINNED_SIZE:
        raise DomainError(f"empirical density needs at least {MIN_BINNED_SIZE} observations")
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        raise DomainError("empirical density of a constant sample is degenerate")
    if bins == "auto":
        k, method = _fd_bins(x)
    else:
        k, method = int(bins), "fixed"
        if k < 1:
            raise DomainError("bins must be positive")
    edges = np.linspace(lo, hi, k + 1)
    counts, _ = np.histogram(x, bins=edges)
    return BinnedDensity(edges, counts.astype(float), method)


def _pair(f, p):
    f = np.asarray(f, dtype=float)
    p = np.asarray(p, dtype=float)
    if f.shape != p.shape:
        raise DomainError("model and empirical values must have the same length")
    if np.any(~(f > 0)) or np.any(~(p > 0)):
        raise DomainError("divergences need strictly positive model and empirical values")
    return f, p


def sym_kl(f, p) -> float:
    """``sum_i [f_i log(f_i / p_i) + p_i log(p_i / f_i)]``."""
    f, p = _pair(f, p)
    return math.fsum((f - p) * (np.log(f) - np.log(p)))


def sym_chi2(f, p) -> float:
    """``sum_i [(f_i - p_i)^2 / f_i + (f_i - p_i)^2 / p_i]``."""
    f, p = _pair(f, p)
    d2 = (f - p) ** 2
    return math.fsum(d2 / f + d2 / p)


def _sorted_cdf(data, cdf, clamp):
    x = np.sort(as_values(data))
    if x.size < 1:
        raise DomainError("need at least one observation")
    u = np.asarray(cdf(x), dtype=float)
    clamped = 0
    if clamp:
        outside = (u < _TINY) | (u > _ONE_MINUS)
        clamped = int(np.count_nonzero(outside))
        u = np.clip(u, _TINY, _ONE_MINUS)
    return u, clamped


def ks_stat(data, cdf: Callable) -> float:
    """``max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)``."""
    u, _ = _sorted_cdf(data, cdf, clamp=False)
    n = u.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def cvm_stat(data, cdf: Callable, *, modified=True) -> float:
    """Cramer-von Mises ``W^2 = sum (F_i - (2i-1)/(2n))^2 + 1/(12n)``.

    With ``modified=True`` the small-sample factor ``(1 + 0.5/n)`` is applied.
    """
    u, _ = _sorted_cdf(data, cdf, clamp=False)
    n = u.size
    i = np.arange(1, n + 1)
    w2 = math.fsum((u - (2 * i - 1) / (2.0 * n)) ** 2) + 1.0 / (12.0 * n)
    return w2 * (1.0 + 0.5 / n) if modified else w2


def ad_stat(data, cdf: Callable, *, modified=True, clamp=True) -> float:
    """Anderson-Darling ``A^2 = -n - (1/n) sum (2i-1)[log F_i + log(1 - F_{n+1-i})]``.

    ``clamp`` keeps cdf values that round to exactly 0 or 1 inside the open
    interval so the logs stay finite; without it such values raise.  With
    ``modified=True`` the factor ``(1 + 0.75/n + 2.25/n^2)`` is applied.
    """
    u, _ = _sorted_cdf(data, cdf, clamp=clamp)
    if np.any((u <= 0) | (u >= 1)):
        raise DomainError("Anderson-Darling needs cdf values strictly inside (0, 1)")
    n = u.size
    i = np.arange(1, n + 1)
    a2 = -n - math.fsum((2 * i - 1) * (np.log(u) + np.log1p(-u[::-1]))) / n
    return a2 * (1.0 + 0.75 / n + 2.25 / n**2) if modified else a2


class InfoCriteria(NamedTuple):
    aic: float
    aicc: float
    bic: float


def info_criteria(loglik: float, k: int, n: int) -> InfoCriteria:
    """AIC, corrected AIC and BIC.  ``aicc`` is ``nan`` when ``n <= k + 1``."""
    if k < 1 or n < 1:
        raise DomainError("k and n must be positive")
    aic = -2.0 * loglik + 2.0 * k
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1) if n > k + 1 else float("nan")
    bic = -2.0 * loglik + k * math.log(n)
    return InfoCriteria(aic, aicc, bic)


@dataclass(frozen=True)
class GofReport:
    """The eight statistics for one (model, sample) pair plus provenance."""

    d_kl: float
    d_chi2: float
    d_ks: float
    w_star: float
    a_star: float
    aic: float
    aicc: float
    bic: float
    n_obs: int
    k_params: int
    binning: dict = field(default_factory=dict)
    model: str = ""

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def gof_report(data, model, bins="auto", *, clamp=True) -> GofReport:
    """Evaluate all statistics for ``model`` on ``data``.

    ``model`` must provide ``pdf(x)``, ``cdf(x)``, ``loglik``, ``k_params``
    and ``name`` (see :mod:`ggnlib.models`).  Empty histogram bins are left
    out of the divergences; their number is recorded in ``binning``.
    """
    x = as_values(data)
    hist = empirical_density(x, bins)
    occupied = hist.counts > 0
    f = np.asarray(model.pdf(hist.centers[occupied]), dtype=float)
    p = hist.density[occupied]
    if np.any(~(f > 0)):
        raise DomainError("model density vanishes at an occupied bin center")
    _, clamped = _sorted_cdf(x, model.cdf, clamp=clamp)
    ic = info_criteria(model.loglik, model.k_params, x.size)
    binning = hist.descriptor()
    binning.update(
        empty_bins_excluded=int(np.count_nonzero(~occupied)),
        evaluation="model density at bin centers of occupied bins",
        w_star=CVM_FACTOR,
        a_star=AD_FACTOR,
        cdf_values_clamped=clamped,
    )
    return GofReport(
        d_kl=sym_kl(f, p),
        d_chi2=sym_chi2(f, p),
        d_ks=ks_stat(x, model.cdf),
        w_star=cvm_stat(x, model.cdf),
        a_star=ad_stat(x, model.cdf, clamp=clamp),
        aic=ic.aic,
        aicc=ic.aicc,
        bic=ic.bic,
        n_obs=int(x.size),
        k_params=int(model.k_params),
        binning=binning,
        model=str(model.name),
    )
