"""Series representations of the GGN law and its moments.

The GGN density is a mixture of exponentiated-GN (EGN) densities,

    f(x) = sum_k b_k h_{a+k}(x),    h_c(x) = c g(x) G(x)**(c - 1),

where ``G``/``g`` are the GN cdf/pdf.  The mixture weights ``b_k`` come
from the coefficients ``p_{j,k}`` of powers of ``log(1 + x) / x``.  Both
are computed here in exact rational arithmetic (``gmpy2.mpq``) because the
alternating sum that defines ``b_k`` cancels catastrophically in floating
point beyond ``k ~ 25``.  An independent float recursion for the same
weights (:func:`b_coeffs_power`) is kept for cross-checking.

Moments combine the weights with the integrals
``I_i(alpha) = int z**i phi_s(z) Phi_s(z)**alpha dz``.  These can be taken
by quadrature (default) or through the probability-weighted-moment double
series (``inner="pwm"``); the latter diverges for non-integer ``alpha`` and
reports so through the ``converged`` flag rather than returning garbage.

Every truncated sum stops once ``|term| < tolerance * |partial|`` holds for
three consecutive terms, or at ``max_terms``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from scipy import integrate
from scipy import special as sc

from .errors import DomainError, PoleError, SeriesConvergenceError
from .gn import GnParams, gn_logpdf, std_gn_logcdf
from .ggn import GgnParams, ggn_pdf, ggn_quantile

__all__ = [
    "SeriesConfig",
    "SeriesResult",
    "ExpansionCoefficients",
    "p_coeff",
    "b_coeff",
    "b_coeffs",
    "b_coeffs_power",
    "expansion_coefficients",
    "egn_pdf",
    "egn_cdf",
    "ggn_pdf_expansion",
    "ggn_cdf_expansion",
    "v_coeff",
    "c_mr_coeff",
    "pwm_J",
    "pwm_J_quadrature",
    "power_weighted_integral",
    "ggn_moment",
    "ggn_moment_quadrature",
    "clear_caches",
]

_STREAK = 3


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation controls shared by every series in this module."""

    tolerance: float = 1e-8
    max_terms: int = 200

    def __post_init__(self):
        if not (0 < self.tolerance <= 1e-3):
            raise DomainError("tolerance must lie in (0, 1e-3]")
        if int(self.max_terms) != self.max_terms or self.max_terms < 10:
            raise DomainError("max_terms must be an integer >= 10")


@dataclass(frozen=True)
class SeriesResult:
    """Value of a truncated sum together with its stopping diagnostics.

    ``residual`` is the last relative term size ``|term| / |partial|``
    (largest over evaluation points for array results).
    """

    value: object
    terms: int
    converged: bool
    residual: float
    diagnostics: dict = field(default_factory=dict)

    def require(self):
        """Return ``value`` or raise :class:`SeriesConvergenceError`."""
        if not self.converged:
            raise SeriesConvergenceError(
                f"series did not meet its tolerance after {self.terms} terms "
                f"(relative residual {self.residual:.3g})",
                partial=self.value,
                terms=self.terms,
            )
        return self.value


class _Stopper:
    """Tracks the consecutive-small-term rule elementwise."""

    def __init__(self, shape, tol):
        self.tol = tol
        self.streak = np.zeros(shape, dtype=int)
        self.done = np.zeros(shape, dtype=bool)
        self.residual = np.full(shape, np.inf)

    def update(self, term, partial):
        term = np.abs(term)
        partial = np.abs(partial)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(term == 0, 0.0, term / partial)
        self.residual = rel
        small = (term == 0) | (term < self.tol * partial)
        self.streak = np.where(small, self.streak + 1, 0)
        self.done |= self.streak >= _STREAK
        return bool(np.all(self.done))

    @property
    def worst(self):
        r = np.max(self.residual) if np.size(self.residual) else 0.0
        return float(r)


# --------------------------------------------------------------------------
# Exact coefficient tables


_lock = threading.RLock()
_p_rows: dict[int, tuple] = {}  # j -> (scale, capacity, integer numerators)
_b_cache: dict[float, list] = {}


def _p_row(j, k):
    """Exact ``p_{j,0..k}`` as ``(scale, numerators)``, memoized per row.

    ``p_{j,k} * (k + j)!`` is an integer, so with
    ``scale = (cap + j + 1)! * lcm(2, ..., cap + 1)`` every division in the
    recursion is exact and the row can be carried in integers.
    """
    with _lock:
        entry = _p_rows.get(j)
        if entry is not None and entry[1] >= k:
            return entry[0], entry[2]
        cap = max(k, 2 * entry[1] if entry else 32)
        scale = gmpy2.fac(cap + j + 1) * gmpy2.lcm(*range(1, cap + 2)) if cap else gmpy2.mpz(1)
        num = [scale]
        jp1 = j + 1
        for kk in range(1, cap + 1):
            acc = gmpy2.mpz(0)
            for m in range(1, kk + 1):
                t = (m * jp1 - kk) * (num[kk - m] // (m + 1))
                acc = acc - t if m % 2 else acc + t
            num.append(acc // kk)
        _p_rows[j] = (scale, cap, num)
        return scale, num


def _p_exact(j, k):
    scale, num = _p_row(j, k)
    return gmpy2.mpq(num[k], scale)


def p_coeff(j, k, *, exact=False):
    """Coefficient of ``x**k`` in ``(log(1 + x) / x)**j``.

    Built from the recursion
    ``p_{j,k} = k^-1 sum_{m=1}^k (-1)^m [m(j+1) - k] / (m+1) p_{j,k-m}``
    with ``p_{j,0} = 1``.  Values are exact rationals internally; pass
    ``exact=True`` to receive a :class:`fractions.Fraction`.
    """
    if j < 0 or k < 0 or int(j) != j or int(k) != k:
        raise DomainError("p_coeff requires integer j, k >= 0")
    v = _p_exact(int(j), int(k))
    return Fraction(int(v.numerator), int(v.denominator)) if exact else float(v)


def _check_pole(k, a):
    if a == int(a) and a >= 1 and k >= a - 1:
        raise PoleError(
            f"b_k formula has a pole at a={a:g}, k={k}: "
            "(a - 1 - j) vanishes for j = a - 1"
        )


def _b_exact(k, a_q):
    # C(k+1-a, k) * sum_j (-1)^(j+k) C(k, j) p_{j,k} / (a-1-j) * (a-1) / (a+k)
    total = gmpy2.mpq(0)
    for j in range(k + 1):
        t = gmpy2.comb(k, j) * _p_exact(j, k) / (a_q - 1 - j)
        total = total + t if (j + k) % 2 == 0 else total - t
    binom = gmpy2.mpq(1)
    for i in range(k):
        binom = binom * (k + 1 - a_q - i) / (i + 1)
    return binom * total * (a_q - 1) / (a_q + k)


def b_coeff(k, a):
    """Mixture weight ``b_k`` of the EGN expansion for shape ``a``.

    Evaluated exactly in rational arithmetic (``a`` is taken as the exact
    binary value of the float) and divided by ``Gamma(a)`` at the end, using
    ``1 / Gamma(a - 1) = (a - 1) / Gamma(a)``.

    Raises
    ------
    PoleError
        If ``a`` is a positive integer and ``k >= a - 1``, where a
        denominator ``a - 1 - j`` vanishes.
    """
    if k < 0 or int(k) != k:
        raise DomainError("b_coeff requires an integer k >= 0")
    if not (a > 0 and math.isfinite(a)):
        raise DomainError("b_coeff requires a > 0")
    k = int(k)
    a = float(a)
    _check_pole(k, a)
    with _lock:
        seq = _b_cache.setdefault(a, [])
        if len(seq) <= k:
            a_q = gmpy2.mpq(a)
            # Build whole p-rows in blocks of 100 so they are not regrown term by term.
            block = (k // 100 + 1) * 100
            for j in range(k + 1):
                _p_row(j, block)
            inv_gamma = 1.0 / math.gamma(a) if a < 171 else math.exp(-math.lgamma(a))
            for kk in range(len(seq), k + 1):
                seq.append(float(_b_exact(kk, a_q)) * inv_gamma)
        return seq[k]


def b_coeffs(a, count):
    """The first ``count`` weights ``b_0 .. b_{count-1}`` as an array."""
    if count < 1:
        return np.empty(0)
    b_coeff(count - 1, a)
    with _lock:
        return np.array(_b_cache[float(a)][:count])


def b_coeffs_power(a, count):
    """Same weights through a float power-series recursion.

    ``(-log(1 - G) / G)**(a - 1) = sum_k d_k G**k`` is expanded with the
    standard recursion for powers of a series with coefficients
    ``1 / (m + 1)``; then ``b_k = d_k / ((a + k) Gamma(a))``.  Every step
    adds terms of one sign for ``a > 1``, so no cancellation occurs, and
    integer ``a`` is handled without poles.
    """
    if not (a > 0):
        raise DomainError("b_coeffs_power requires a > 0")
    c = 1.0 / (np.arange(count) + 1.0)
    d = np.zeros(count)
    if count:
        d[0] = 1.0
    e = a - 1.0
    for n in range(1, count):
        m = np.arange(1, n + 1)
        d[n] = np.sum((e * m - (n - m)) * c[m] * d[n - m]) / n
    k = np.arange(count)
    return d / (a + k) * np.exp(-sc.gammaln(a))


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Tabulated ``p_{j,k}`` (rows ``j``, columns ``k``) and ``b_k``."""

    p_table: np.ndarray
    b_seq: np.ndarray
    a_param: float


def expansion_coefficients(a, count):
    """Tables of ``p_{j,k}`` for ``j, k < count`` and ``b_0 .. b_{count-1}``."""
    p = np.array([[p_coeff(j, k) for k in range(count)] for j in range(count)])
    b = b_coeffs(a, count)
    if not np.all(np.isfinite(b)):
        raise ArithmeticError("non-finite expansion weight")
    return ExpansionCoefficients(p_table=p, b_seq=b, a_param=float(a))


def clear_caches():
    """Drop every memoized coefficient table."""
    with _lock:
        _p_rows.clear()
        _b_cache.clear()
        _c_tables.clear()
    _pwi_cached.cache_clear()
    _weight_table.cache_clear()


# --------------------------------------------------------------------------
# EGN building blocks and the truncated density / cdf expansions


def egn_pdf(c, p: GnParams, x):
    """Density ``c g(x) G(x)**(c - 1)`` of the GN cdf raised to power ``c``."""
    if not (c > 0):
        raise DomainError("EGN power c must be positive")
    z = p.standardize(x)
    out = math.log(c) + gn_logpdf(p, x) + (c - 1.0) * std_gn_logcdf(p.s, z)
    return np.exp(out)[()] if np.ndim(out) == 0 else np.exp(out)


def egn_cdf(c, p: GnParams, x):
    """``G(x)**c``."""
    if not (c > 0):
        raise DomainError("EGN power c must be positive")
    out = np.exp(c * std_gn_logcdf(p.s, p.standardize(x)))
    return out[()] if np.ndim(out) == 0 else out


@lru_cache(maxsize=32)
def _weight_table(a, count):
    # Float recursion: exact-rational b_k cost grows too fast for long truncations.
    b = b_coeffs_power(a, count)
    b.setflags(write=False)
    return b


def _expansion(p: GgnParams, x, cfg, density):
    _check_pole(cfg.max_terms - 1, p.a)
    weights = _weight_table(float(p.a), int(cfg.max_terms))
    x = np.asarray(x, dtype=float)
    z = p.standardize(x)
    log_cdf = np.asarray(std_gn_logcdf(p.s, z), dtype=float)
    base = np.asarray(gn_logpdf(p.gn, x), dtype=float) if density else 0.0
    partial = np.zeros(x.shape)
    stop = _Stopper(x.shape, cfg.tolerance)
    terms = 0
    finished = False
    for k in range(cfg.max_terms):
        c = p.a + k
        if density:
            term = weights[k] * c * np.exp(base + (c - 1.0) * log_cdf)
        else:
            term = weights[k] * np.exp(c * log_cdf)
        partial = partial + term
        terms = k + 1
        if stop.update(term, partial):
            finished = True
            break
    value = partial[()] if partial.ndim == 0 else partial
    return SeriesResult(value, terms, finished, stop.worst)


def ggn_pdf_expansion(p: GgnParams, x, cfg: SeriesConfig = SeriesConfig()):
    """GGN density as the truncated mixture ``sum_k b_k h_{a+k}(x)``.

    Weights come from :func:`b_coeffs_power`.  For ``a > 1`` the terms decay
    slowly in the upper tail, so accuracy there needs a ``max_terms`` in the
    thousands rather than the default 200.
    """
    return _expansion(p, x, cfg, density=True)


def ggn_cdf_expansion(p: GgnParams, x, cfg: SeriesConfig = SeriesConfig()):
    """GGN cdf as the truncated mixture ``sum_k b_k H_{a+k}(x)``."""
    return _expansion(p, x, cfg, density=False)


# --------------------------------------------------------------------------
# Power-series pieces of the moment formula


def _gen_binom(alpha, m):
    # Generalized binomial C(alpha, m); exactly zero once alpha - i hits 0.
    out = 1.0
    for i in range(m):
        out *= (alpha - i) / (i + 1)
        if out == 0.0:
            break
    return out


def v_coeff(j, alpha, cfg: SeriesConfig = SeriesConfig()):
    """``v_j(alpha) = sum_{m>=j} (-1)^(j+m) C(alpha, m) C(m, j)``.

    These re-expand ``x**alpha`` as a power series in ``x``.  For integer
    ``alpha`` the sum is finite; otherwise it converges only for
    ``j < alpha`` (slowly) and diverges for ``j > alpha``.  The result
    carries the achieved residual and the ``converged`` flag.
    """
    if j < 0 or int(j) != j:
        raise DomainError("v_coeff requires an integer j >= 0")
    if not (alpha > 0):
        raise DomainError("v_coeff requires alpha > 0")
    j = int(j)
    stop = _Stopper((), cfg.tolerance)
    total = 0.0
    cab = _gen_binom(alpha, j)
    cmj = 1.0
    finished = False
    terms = 0
    for m in range(j, j + cfg.max_terms):
        if m > j:
            cab *= (alpha - (m - 1)) / m
            cmj *= m / (m - j)
        term = cab * cmj if (j + m) % 2 == 0 else -cab * cmj
        total += term
        terms += 1
        if cab == 0.0 or stop.update(term, total):
            finished = True
            break
        if not math.isfinite(total):
            break
    return SeriesResult(total, terms, finished, stop.worst)


_c_tables: dict[float, np.ndarray] = {}


def _c_table(s, m_max, r_max):
    with _lock:
        tab = _c_tables.get(s)
        if tab is not None and tab.shape[0] > m_max and tab.shape[1] > r_max:
            return tab
        mm = max(m_max + 1, 0 if tab is None else tab.shape[0])
        rr = max(r_max + 1, 0 if tab is None else tab.shape[1])
        r = np.arange(rr, dtype=float)
        tab = np.zeros((mm, rr))
        tab[0] = s**r
        ell = np.arange(1, mm, dtype=float)
        # (-1)^l / ((1/s + l) l!)
        w = (-1.0) ** ell * np.exp(-sc.gammaln(ell + 1.0)) / (1.0 / s + ell)
        for m in range(1, mm):
            ls = np.arange(1, m + 1)
            coef = ((r[None, :] + 1.0) * ls[:, None] - m) * w[ls - 1, None]
            tab[m] = np.sum(coef * tab[m - ls], axis=0) / (m * s)
        _c_tables[s] = tab
        return tab


def c_mr_coeff(m, r, s):
    """Coefficient ``c_{m,r}`` of the probability-weighted-moment series.

    ``c_{0,r} = s**r`` and
    ``c_{m,r} = (m s)^-1 sum_{l=1}^m (-1)^l [(r+1) l - m] / ((1/s + l) l!) c_{m-l,r}``.
    """
    if m < 0 or r < 0 or int(m) != m or int(r) != r:
        raise DomainError("c_mr_coeff requires integers m, r >= 0")
    if not (s > 0):
        raise DomainError("c_mr_coeff requires s > 0")
    return float(_c_table(float(s), int(m), int(r))[int(m), int(r)])


def pwm_J(i, j, s, cfg: SeriesConfig = SeriesConfig()):
    """``J_{i,j} = int_0^inf z**i phi_s(z) Phi_s(z)**j dz`` via its double series.

    ``J = [2 Gamma(1/s)]^-(j+1) sum_r C(j,r) Gamma(1/s)^(j-r)
    sum_m c_{m,r} Gamma(m + (i+r+1)/s)``.  The inner sums are truncated by
    the module rule; ``converged`` is false when any inner sum fails it.
    For ``j >= 1`` the terms grow geometrically and the flag is raised.
    """
    if i < 0 or j < 0 or int(i) != i or int(j) != j:
        raise DomainError("pwm_J requires integers i, j >= 0")
    if not (s > 0):
        raise DomainError("pwm_J requires s > 0")
    i, j = int(i), int(j)
    tab = _c_table(float(s), cfg.max_terms, j)
    lg = math.lgamma(1.0 / s)
    total = 0.0
    ok = True
    worst = 0.0
    used = 0
    m = np.arange(cfg.max_terms)
    for r in range(j + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            terms = tab[: cfg.max_terms, r] * np.exp(sc.gammaln(m + (i + r + 1.0) / s))
        stop = _Stopper((), cfg.tolerance)
        inner = 0.0
        done = False
        for idx, t in enumerate(terms):
            if not math.isfinite(t):
                break
            inner += t
            used = max(used, idx + 1)
            if stop.update(t, inner):
                done = True
                break
        ok = ok and done
        worst = max(worst, stop.worst)
        scale = math.exp(math.lgamma(j + 1) - math.lgamma(r + 1) - math.lgamma(j - r + 1)
                         + (j - r) * lg - (j + 1) * (math.log(2.0) + lg))
        total += scale * inner
    return SeriesResult(total, used, ok, worst)


def _quad(f, lo, hi, **kw):
    kw.setdefault("limit", 200)
    # With full_output the 4th element only appears when quad gives up.
    res = integrate.quad(f, lo, hi, full_output=1, **kw)
    return res[0], res[1], len(res) == 3, res[2]["neval"]


def pwm_J_quadrature(i, j, s):
    """Quadrature value of ``J_{i,j}`` after the substitution ``t = z**s``."""
    if i < 0 or j < 0:
        raise DomainError("pwm_J_quadrature requires i, j >= 0")
    return power_weighted_integral(i, float(j), s, half=True).value


@lru_cache(maxsize=65536)
def _pwi_cached(i, alpha, s, half):
    # With t = z**s: dz phi_s(z) = e^{-t} t^{1/s - 1} dt / (2 Gamma(1/s)).
    beta = (i + 1.0) / s - 1.0
    a_inc = 1.0 / s
    norm = 0.5 / math.gamma(a_inc) if a_inc < 171 else 0.5 * math.exp(-math.lgamma(a_inc))
    sign = -1.0 if i % 2 else 1.0

    def g(t):
        q = sc.gammaincc(a_inc, t)  # 2 (1 - Phi_s(t^(1/s)))
        upper = math.exp(alpha * math.log1p(-0.5 * q)) if alpha else 1.0
        if half:
            return math.exp(-t) * upper
        # For alpha < 0 the factor e^{-t} still dominates once q underflows.
        lower = math.exp(alpha * math.log(0.5 * q)) if q > 0 else 0.0
        return math.exp(-t) * (upper + sign * lower)

    # Algebraic weight t^beta handled exactly on [0, 1].
    v1, e1, ok1, n1 = _quad(g, 0.0, 1.0, weight="alg", wvar=(beta, 0.0),
                            epsabs=1e-14, epsrel=1e-12)
    v2, e2, ok2, n2 = _quad(lambda t: t**beta * g(t), 1.0, np.inf,
                            epsabs=1e-14, epsrel=1e-12)
    return norm * (v1 + v2), norm * (e1 + e2), ok1 and ok2, n1 + n2


def power_weighted_integral(i, alpha, s, *, half=False):
    """``int z**i phi_s(z) Phi_s(z)**alpha dz`` by adaptive quadrature.

    Over the whole line by default; ``half=True`` restricts to ``z > 0``.
    ``(a + k) * power_weighted_integral(i, a + k - 1, s)`` is the ``i``-th
    raw moment of the standardized EGN law with power ``a + k``.
    """
    if not (s > 0) or not (alpha > -1) or i < 0:
        raise DomainError("power_weighted_integral requires s > 0, alpha > -1, i >= 0")
    v, err, ok, n = _pwi_cached(int(i), float(alpha), float(s), bool(half))
    return SeriesResult(v, n, ok, err / abs(v) if v else err)


def _inner_pwm(i, alpha, s, cfg):
    # sum_j [v_j(alpha) + (-1)^(i+j) C(alpha, j)] J_{i,j}
    if alpha <= 0:
        return SeriesResult(0.0, 0, False, math.inf,
                            {"reason": f"power {alpha:g} <= 0 has no v_j expansion"})
    stop = _Stopper((), cfg.tolerance)
    total = 0.0
    for j in range(cfg.max_terms):
        v = v_coeff(j, alpha, cfg)
        J = pwm_J(i, j, s, cfg)
        if not (v.converged and J.converged):
            which = "v_j" if not v.converged else "J_{i,j}"
            return SeriesResult(total, j, False, stop.worst,
                                {"reason": f"{which} series diverged at j={j}"})
        sign = -1.0 if (i + j) % 2 else 1.0
        term = (v.value + sign * _gen_binom(alpha, j)) * J.value
        total += term
        if stop.update(term, total):
            return SeriesResult(total, j + 1, True, stop.worst)
    return SeriesResult(total, cfg.max_terms, False, stop.worst,
                        {"reason": "j-series hit max_terms"})


def ggn_moment(n, p: GgnParams, cfg: SeriesConfig = SeriesConfig(), *, inner="quadrature"):
    """Raw moment ``E(X**n)`` from the mixture-weight series.

    ``E(X^n) = sum_k (a+k) b_k sum_i C(n,i) sigma^i mu^(n-i) I_i(a+k-1)``
    with ``I_i(alpha) = int z^i phi_s(z) Phi_s(z)^alpha dz``.  The binomial
    form has no division by ``mu``.  ``inner`` selects how ``I_i`` is
    obtained: ``"quadrature"`` or ``"pwm"`` (the probability-weighted-moment
    double series, which fails its convergence test for non-integer ``a``).

    The outer sum over ``k`` decays roughly like ``1 / k**2``, so the result
    frequently stops at ``max_terms`` unconverged; ``diagnostics`` carries
    the unassigned mixture mass ``1 - sum b_k`` as a size indicator.

    Raises
    ------
    PoleError
        For integer ``a``, where the weights ``b_k`` are undefined.
    """
    if n < 1 or int(n) != n:
        raise DomainError("moment order must be a positive integer")
    if inner not in ("quadrature", "pwm"):
        raise DomainError("inner must be 'quadrature' or 'pwm'")
    n = int(n)
    coef = [math.comb(n, i) * p.sigma**i * p.mu ** (n - i) for i in range(n + 1)]
    stop = _Stopper((), cfg.tolerance)
    total = 0.0
    mass = 0.0
    diag = {"inner": inner}
    for k in range(cfg.max_terms):
        b = b_coeff(k, p.a)
        alpha = p.a + k - 1.0
        acc = 0.0
        for i, c in enumerate(coef):
            if c == 0.0:
                continue
            if inner == "quadrature":
                r = power_weighted_integral(i, alpha, p.s)
            else:
                r = _inner_pwm(i, alpha, p.s, cfg)
            if not r.converged:
                diag.update(r.diagnostics, failed_at_k=k, residual_mass=1.0 - mass)
                return SeriesResult(total, k, False, stop.worst, diag)
            acc += c * r.value
        term = (p.a + k) * b * acc
        total += term
        mass += b
        if stop.update(term, total):
            diag["residual_mass"] = 1.0 - mass
            return SeriesResult(total, k + 1, True, stop.worst, diag)
    diag["residual_mass"] = 1.0 - mass
    return SeriesResult(total, cfg.max_terms, False, stop.worst, diag)


def ggn_moment_quadrature(n, p: GgnParams):
    """``E(X**n)`` by adaptive quadrature of ``x**n f(x)``.

    The core range ``[Q(1e-10), Q(1 - 1e-10)]`` is split at ``mu``; both
    tails beyond it are integrated separately so nothing is dropped.
    """
    if n < 1 or int(n) != n:
        raise DomainError("moment order must be a positive integer")
    lo, hi = (float(v) for v in ggn_quantile(p, np.array([1e-10, 1.0 - 1e-10])))

    def f(x):
        return x**n * float(ggn_pdf(p, x))

    pieces = [(-np.inf, lo), (lo, p.mu), (p.mu, hi), (hi, np.inf)]
    total = err = 0.0
    ok = True
    evals = 0
    for a, b in pieces:
        if a >= b:
            continue
        v, e, good, ne = _quad(f, a, b, epsabs=1e-11, epsrel=1e-12, limit=400)
        total += v
        err += e
        ok = ok and good
        evals += ne
    return SeriesResult(total, evals, ok and err <= 1e-9, err, {"abs_error": err})
