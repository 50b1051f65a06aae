"""The gamma generalized normal (GGN) distribution.

``X ~ GGN(mu, sigma, s, a)`` has density

    f(x) = phi_s(z) / (sigma Gamma(a)) * {-log[1 - Phi_s(z)]}**(a - 1),
    z = (x - mu) / sigma,

and cdf ``gamma_1(a, -log[1 - Phi_s(z)])``.  Equivalently
``X = G^{-1}(1 - exp(-Z))`` with ``Z ~ Gamma(a, 1)`` and ``G`` the GN cdf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .errors import DomainError
from .gn import GnParams, std_gn_logpdf, upper_ratio_terms
from .specfun import gamma_quantile, gamma_quantile_root, gamma_quantile_upper

__all__ = [
    "GgnParams",
    "ggn_logpdf",
    "ggn_pdf",
    "ggn_cdf",
    "ggn_sf",
    "ggn_quantile",
    "ggn_limit_pdf",
    "gn_from_gamma",
    "neglog_sf_terms",
]

_LOG2 = math.log(2.0)


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


@dataclass(frozen=True)
class GgnParams:
    mu: float = 0.0
    sigma: float = 1.0
    s: float = 2.0
    a: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")
        for name in ("sigma", "s", "a"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite")

    @property
    def gn(self) -> GnParams:
        return GnParams(self.mu, self.sigma, self.s)

    def as_tuple(self):
        return (self.mu, self.sigma, self.s, self.a)

    def standardize(self, x):
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma


def neglog_sf_terms(s, z):
    """Return ``(log(1 - Phi_s(z)), L, log L)`` with ``L = -log(1 - Phi_s(z))``.

    Each piece comes from the tail form of ``Phi_s`` so that neither tail
    collapses to 0 or 1 before the logs are taken.
    """
    z = np.asarray(z, dtype=float)
    _, logq = upper_ratio_terms(s, z)
    log_tail = logq - _LOG2  # log of the mass beyond |z|
    c = np.exp(log_tail)
    right = z > 0
    logsf = np.where(right, log_tail, np.log1p(-c))
    big_l = -logsf
    # Left tail: L = c + c^2/2 + c^3/3 + ... ; keep log L accurate when c is tiny.
    with np.errstate(divide="ignore"):
        log_l_direct = np.log(big_l)
    log_l_series = log_tail + np.log1p(c / 2.0 + c * c / 3.0)
    log_l = np.where(right | (c > 1e-5), log_l_direct, log_l_series)
    big_l = np.where(right | (c > 1e-5), big_l, np.exp(log_l_series))
    return logsf, big_l, log_l


def ggn_logpdf(p: GgnParams, x):
    z = p.standardize(x)
    _, _, log_l = neglog_sf_terms(p.s, z)
    base = np.asarray(std_gn_logpdf(p.s, z) - math.log(p.sigma) - sc.gammaln(p.a))
    out = base
    if p.a != 1.0:
        with np.errstate(invalid="ignore"):
            out = np.where(np.isneginf(base), -np.inf, base + (p.a - 1.0) * log_l)
    return _out(np.asarray(out, dtype=float))


def ggn_pdf(p: GgnParams, x):
    """GGN density; zero where the log-density underflows."""
    return _out(np.exp(ggn_logpdf(p, x)))


def ggn_cdf(p: GgnParams, x):
    _, big_l, _ = neglog_sf_terms(p.s, p.standardize(x))
    return _out(sc.gammainc(p.a, big_l))


def ggn_sf(p: GgnParams, x):
    """``1 - F(x)`` computed from the upper gamma ratio."""
    _, big_l, _ = neglog_sf_terms(p.s, p.standardize(x))
    return _out(sc.gammaincc(p.a, big_l))


def gn_from_gamma(p: GgnParams, z):
    """Map gamma variates ``Z ~ Gamma(a, 1)`` to GGN values.

    For ``Z <= log 2`` the value lies at or below ``mu``:
    ``mu - sigma * [F_Gamma^{-1}(2 e^{-Z} - 1)]^(1/s)``; otherwise
    ``mu + sigma * [F_Gamma^{-1}(1 - 2 e^{-Z})]^(1/s)`` with ``F_Gamma`` the
    unit-scale gamma cdf of shape ``1/s``.  Both inverses are taken through
    the upper ratio with the complementary probabilities ``-2 expm1(-Z)`` and
    ``2 e^{-Z}`` so no digits are lost near the branch point or in the tails.
    """
    z = np.asarray(z, dtype=float)
    left = z <= _LOG2
    tail = np.clip(np.where(left, -2.0 * np.expm1(-z), 2.0 * np.exp(-z)), 0.0, 1.0)
    inner = np.clip(np.abs(np.expm1(_LOG2 - z)), 0.0, 1.0)  # 1 - tail
    r = np.asarray(gamma_quantile_root(1.0 / p.s, inner, tail), dtype=float)
    return _out(np.where(left, p.mu - p.sigma * r, p.mu + p.sigma * r))


def ggn_quantile(p: GgnParams, u):
    """Quantile function, composed from the gamma and GN inverses."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise DomainError("ggn_quantile requires 0 < u < 1")
    z = np.where(
        u <= 0.5,
        gamma_quantile(p.a, np.minimum(u, 0.5)),
        gamma_quantile_upper(p.a, np.minimum(1.0 - u, 0.5)),
    )
    return gn_from_gamma(p, z)


def ggn_limit_pdf(p: GgnParams, x):
    """Limit of the GGN density as ``s -> infinity`` (``s`` itself is ignored).

    Supported on ``[mu - sigma, mu + sigma]`` and zero elsewhere.
    """
    z = p.standardize(x)
    inside = (z >= -1.0) & (z <= 1.0)
    zc = np.clip(z, -1.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        big_l = -np.log(0.5 - 0.5 * zc)
        val = big_l ** (p.a - 1.0) / (2.0 * p.sigma * sc.gamma(p.a))
    return _out(np.where(inside, val, 0.0))
