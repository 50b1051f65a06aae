"""Scalar special functions used throughout the package.

The gamma family, the regularized incomplete gamma pair and digamma come
from :mod:`scipy.special` (Cephes series / continued-fraction split).  The
pieces scipy does not provide are implemented here: a log-space upper
tail, a safeguarded Newton inverse of the incomplete gamma ratio, and the
s-derivative of ``Gamma(1/s, x**s)``.

All functions accept scalars or arrays and broadcast like numpy ufuncs.
Scalar inputs give numpy float scalars back.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sc

from .errors import DomainError

__all__ = [
    "ln_gamma",
    "digamma",
    "reg_lower_inc_gamma",
    "reg_upper_inc_gamma",
    "log_reg_upper_inc_gamma",
    "upper_inc_gamma",
    "gamma_quantile",
    "gamma_quantile_upper",
    "reg_lower_inc_gamma_root",
    "gamma_quantile_root",
    "upper_inc_gamma_s_derivative",
    "log_upper_inc_gamma_s_derivative",
]

_TINY = 1e-300
_EPS = np.finfo(float).eps


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _check(cond, msg):
    if np.any(cond):
        raise DomainError(msg)


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    _check(~(x > 0), "ln_gamma requires x > 0")
    return _out(sc.gammaln(x))


def digamma(x):
    """Derivative of :func:`ln_gamma`, for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    _check(~(x > 0), "digamma requires x > 0")
    return _out(sc.digamma(x))


def _check_inc(a, x):
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    _check(~(a > 0), "incomplete gamma requires a > 0")
    _check(~(x >= 0), "incomplete gamma requires x >= 0")
    return a, x


def reg_lower_inc_gamma(a, x):
    """Regularized lower incomplete gamma ratio ``gamma(a, x) / Gamma(a)``."""
    a, x = _check_inc(a, x)
    return _out(sc.gammainc(a, x))


def reg_upper_inc_gamma(a, x):
    """Regularized upper incomplete gamma ratio ``Gamma(a, x) / Gamma(a)``."""
    a, x = _check_inc(a, x)
    return _out(sc.gammaincc(a, x))


def upper_inc_gamma(a, x):
    """Unregularized upper incomplete gamma ``Gamma(a, x)``."""
    a, x = _check_inc(a, x)
    return _out(sc.gammaincc(a, x) * sc.gamma(a))


def _log_upper_cf(a, x, max_iter=500):
    # Modified Lentz evaluation of the continued fraction for Gamma(a, x);
    # only used where the ratio itself underflows, so x >> a there.
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / np.where(np.abs(b) < _TINY, _TINY, b)
    h = d.copy()
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-15):
            break
    return -x + a * np.log(x) - sc.gammaln(a) + np.log(h)


def log_reg_upper_inc_gamma(a, x):
    """``log(Gamma(a, x) / Gamma(a))`` that stays finite deep in the tail."""
    a, x = _check_inc(a, x)
    return _out(log_q_unchecked(a, x))


def log_q_unchecked(a, x):
    """:func:`log_reg_upper_inc_gamma` without argument validation (hot loops)."""
    q = sc.gammaincc(a, x)
    with np.errstate(divide="ignore"):
        out = np.log(q)
    deep = (q < 1e-280) & np.isfinite(x)
    if np.any(deep):
        a, x = np.broadcast_arrays(a, x)
        out = np.array(out, dtype=float)
        out[deep] = _log_upper_cf(a[deep], x[deep])
    return out


def _log_lower(a, x):
    with np.errstate(divide="ignore"):
        return np.log(sc.gammainc(a, x))


def _wilson_hilferty(a, p):
    z = sc.ndtri(p)
    guess = a * (1.0 - 1.0 / (9.0 * a) + z / (3.0 * np.sqrt(a))) ** 3
    small = np.exp((np.log(p) + sc.gammaln(a + 1.0)) / a)
    return np.where((guess > 0) & (a >= 1.0), guess, small)


def _solve_lower(a, t, max_iter=200):
    """x with P(a, x) = t for 0 < t <= 1/2; Newton in log x on log P."""
    log_t = np.log(t)
    lga = sc.gammaln(a)
    # P(a, x) <= x**a / Gamma(a + 1), so this x never overshoots.
    y_lo = (log_t + sc.gammaln(a + 1.0)) / a
    with np.errstate(divide="ignore"):
        y = np.log(_wilson_hilferty(a, t))
    y = np.maximum(y, y_lo)
    y_hi = y + 1.0
    for _ in range(200):
        bad = _log_lower(a, np.exp(y_hi)) < log_t
        if not np.any(bad):
            break
        y_hi = np.where(bad, y_hi + 1.0, y_hi)
    y = np.clip(y, y_lo, y_hi)
    for _ in range(max_iter):
        x = np.exp(y)
        lp = _log_lower(a, x)
        g = lp - log_t
        y_lo = np.where(g <= 0, y, y_lo)
        y_hi = np.where(g >= 0, y, y_hi)
        slope = np.exp(a * y - x - lga - lp)
        with np.errstate(divide="ignore", invalid="ignore"):
            y_new = y - g / slope
        outside = ~np.isfinite(y_new) | (y_new <= y_lo) | (y_new >= y_hi)
        y_new = np.where(outside, 0.5 * (y_lo + y_hi), y_new)
        step = np.abs(y_new - y)
        y = y_new
        if np.all((step <= 4 * _EPS * np.maximum(1.0, np.abs(y))) | (g == 0)):
            break
    return np.exp(y)


def _solve_upper(a, t, max_iter=200):
    """x with Q(a, x) = t for 0 < t < 1/2; Newton in x on log Q."""
    log_t = np.log(t)
    lga = sc.gammaln(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = _wilson_hilferty(a, 1.0 - t)
        # Q(a, x) ~ x**(a-1) e^{-x} / Gamma(a) deep in the tail.
        asym = -log_t + (a - 1.0) * np.log(-log_t) - lga
    x = np.where((t < 1e-3) | ~np.isfinite(x), np.maximum(asym, 1.0), x)
    x_lo = np.zeros_like(x)
    x_hi = np.maximum(x, 1.0) * 2.0
    for _ in range(200):
        bad = log_reg_upper_inc_gamma(a, x_hi) > log_t
        if not np.any(bad):
            break
        x_hi = np.where(bad, 2.0 * x_hi, x_hi)
    x = np.where((x <= 0) | (x >= x_hi), 0.5 * x_hi, x)
    for _ in range(max_iter):
        lq = log_reg_upper_inc_gamma(a, x)
        h = lq - log_t
        x_lo = np.where(h >= 0, x, x_lo)
        x_hi = np.where(h <= 0, x, x_hi)
        slope = -np.exp((a - 1.0) * np.log(x) - x - lga - lq)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_new = x - h / slope
        outside = ~np.isfinite(x_new) | (x_new <= x_lo) | (x_new >= x_hi)
        x_new = np.where(outside, 0.5 * (x_lo + x_hi), x_new)
        step = np.abs(x_new - x)
        x = x_new
        if np.all((step <= 4 * _EPS * np.maximum(x, _TINY)) | (h == 0)):
            break
    return x


def _inverse(shape, p, q):
    # Solve on whichever tail probability is <= 1/2 for full relative accuracy.
    shape, p, q = np.broadcast_arrays(shape, p, q)
    out = np.empty(shape.shape, dtype=float)
    zero = p <= 0.0
    inf = q <= 0.0
    out[zero] = 0.0
    out[inf] = np.inf
    rest = ~(zero | inf)
    lower = rest & (p <= 0.5)
    upper = rest & ~lower
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        if np.any(lower):
            out[lower] = _solve_lower(shape[lower], p[lower])
        if np.any(upper):
            out[upper] = _solve_upper(shape[upper], q[upper])
    return _out(out)


def gamma_quantile(shape, p):
    """Quantile of the unit-scale gamma distribution.

    Parameters
    ----------
    shape : array_like
        Shape parameter, ``> 0``.
    p : array_like
        Lower-tail probability in ``[0, 1]``.  ``p = 1`` gives ``inf``.

    Returns
    -------
    x : ndarray or float
        Value with ``reg_lower_inc_gamma(shape, x) == p``.

    Notes
    -----
    Newton iteration on the log of the smaller tail probability, started
    from the Wilson-Hilferty approximation and kept inside a shrinking
    bracket by bisection.
    """
    shape = np.asarray(shape, dtype=float)
    p = np.asarray(p, dtype=float)
    _check(~(shape > 0), "gamma_quantile requires shape > 0")
    _check(~((p >= 0) & (p <= 1)), "gamma_quantile requires 0 <= p <= 1")
    return _inverse(shape, p, 1.0 - p)


def gamma_quantile_upper(shape, q):
    """Inverse of the upper ratio: x with ``reg_upper_inc_gamma(shape, x) == q``.

    Accurate for tiny ``q`` where ``gamma_quantile(shape, 1 - q)`` would lose
    all digits in forming ``1 - q``.
    """
    shape = np.asarray(shape, dtype=float)
    q = np.asarray(q, dtype=float)
    _check(~(shape > 0), "gamma_quantile_upper requires shape > 0")
    _check(~((q >= 0) & (q <= 1)), "gamma_quantile_upper requires 0 <= q <= 1")
    return _inverse(shape, 1.0 - q, q)


# Below this argument the lower ratio is summed from ``r = x**shape`` directly.
_ROOT_T = 0.01


def _lower_root_series(a, r, t):
    # P(a, t) = r e^{-t} / Gamma(a+1) * sum_n t^n / ((a+1)...(a+n)),  r = t**a
    term = np.ones_like(t)
    total = np.ones_like(t)
    for n in range(1, 12):
        term = term * t / (a + n)
        total = total + term
    return r * np.exp(-t - sc.gammaln(a + 1.0)) * total


def reg_lower_inc_gamma_root(shape, r):
    """``P(shape, r**(1/shape))`` given the root ``r = x**shape``.

    When ``x`` is tiny (for instance ``|z|**s`` with large ``s``) it can
    underflow while ``r`` is an ordinary number; the series in ``r`` keeps
    full relative accuracy there.
    """
    a, r = np.broadcast_arrays(np.asarray(shape, dtype=float), np.asarray(r, dtype=float))
    _check(~(a > 0), "reg_lower_inc_gamma_root requires shape > 0")
    _check(~(r >= 0), "reg_lower_inc_gamma_root requires r >= 0")
    with np.errstate(under="ignore"):
        t = r ** (1.0 / a)
    small = t < _ROOT_T
    out = np.where(small, _lower_root_series(a, r, np.where(small, t, 0.0)), sc.gammainc(a, t))
    return _out(out)


def gamma_quantile_root(shape, p, q=None):
    """Root ``r = x**shape`` of the gamma quantile ``x`` with ``P(shape, x) = p``.

    ``q = 1 - p`` may be passed when it is known more accurately than ``p``.
    Small ``p`` is inverted through the series in ``r`` so the result stays
    accurate where ``x`` itself would underflow.
    """
    a = np.asarray(shape, dtype=float)
    p = np.asarray(p, dtype=float)
    q = 1.0 - p if q is None else np.asarray(q, dtype=float)
    a, p, q = np.broadcast_arrays(a, p, q)
    _check(~(a > 0), "gamma_quantile_root requires shape > 0")
    _check(~((p >= 0) & (p <= 1)), "gamma_quantile_root requires 0 <= p <= 1")
    r0 = p * np.exp(sc.gammaln(a + 1.0))
    with np.errstate(under="ignore", divide="ignore"):
        t0 = r0 ** (1.0 / a)
    small = t0 < _ROOT_T
    out = np.empty(a.shape)
    if np.any(small):
        aa, pp, r = a[small], p[small], r0[small]
        for _ in range(60):
            with np.errstate(under="ignore"):
                t = r ** (1.0 / aa)
            g = _lower_root_series(aa, np.ones_like(r), t)  # P / r
            nxt = np.where(g > 0, pp / np.where(g > 0, g, 1.0), 0.0)
            done = np.abs(nxt - r) <= 4 * _EPS * np.abs(nxt)
            r = nxt
            if np.all(done):
                break
        out[small] = r
    big = ~small
    if np.any(big):
        out[big] = np.asarray(_inverse(a[big], p[big], q[big]), dtype=float) ** a[big]
    return _out(out)


def _upper_comp(s, x):
    return sc.gammaincc(1.0 / s, x**s) * sc.gamma(1.0 / s)


def _log_upper_comp(s, x):
    a = 1.0 / s
    return log_reg_upper_inc_gamma(a, x**s) + sc.gammaln(a)


def upper_inc_gamma_s_derivative(s, x, *, rel_step=0.1, ntab=12):
    """``d/ds Gamma(1/s, x**s)`` by Richardson-extrapolated central differences.

    Ridders' scheme: the step starts at ``rel_step * s`` (smaller far in the
    tail, where the function changes faster) and shrinks by 1.4 per stage;
    the tableau entry with the smallest error estimate wins.
    """
    s, x = _check_sx(s, x, "upper_inc_gamma_s_derivative")
    return _out(_ridders(_upper_comp, s, x, rel_step, ntab))


def log_upper_inc_gamma_s_derivative(s, x, *, rel_step=0.1, ntab=12):
    """``d/ds log Gamma(1/s, x**s)``, usable where the function underflows."""
    s, x = _check_sx(s, x, "log_upper_inc_gamma_s_derivative")
    return _out(_ridders(_log_upper_comp, s, x, rel_step, ntab))


def _check_sx(s, x, name):
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    _check(~(s > 0), f"{name} requires s > 0")
    _check(~(x > 0), f"{name} requires x > 0")
    return np.broadcast_arrays(s, x)


def _ridders(fun, s, x, rel_step, ntab):
    con, con2 = 1.4, 1.96
    # Gamma(1/s, x^s) varies like exp(-x^s); cap the first step so the
    # exponent moves by O(1) at most across it.
    rate = 1.0 + x**s * np.abs(np.log(x))
    h = np.minimum(rel_step * s, 0.5 / rate)
    tab = [[(fun(s + h, x) - fun(s - h, x)) / (2.0 * h)]]
    best = tab[0][0]
    err = np.full(s.shape, np.inf)
    for i in range(1, ntab):
        h = h / con
        row = [(fun(s + h, x) - fun(s - h, x)) / (2.0 * h)]
        fac = con2
        for j in range(1, i + 1):
            row.append((row[j - 1] * fac - tab[i - 1][j - 1]) / (fac - 1.0))
            fac *= con2
            e = np.maximum(np.abs(row[j] - row[j - 1]), np.abs(row[j] - tab[i - 1][j - 1]))
            better = e <= err
            err = np.where(better, e, err)
            best = np.where(better, row[j], best)
        tab.append(row)
        if np.all(np.abs(row[i] - tab[i - 1][i - 1]) >= 2.0 * err):
            break
    return best
