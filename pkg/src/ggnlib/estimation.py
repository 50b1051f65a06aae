"""Maximum-likelihood fitting for the GGN law and the gamma/beta baselines.

All three fits share one optimizer contract: the parameters are mapped to
unconstrained coordinates (logs of the positive ones), a Nelder-Mead phase
locates the basin and a BFGS phase driven by the analytic score polishes
the optimum.  Standard errors come from the observed information, i.e. the
inverse of minus a central-difference Hessian of the analytic score, mapped
back to the natural parameters by the delta method.

GGN fits run on data standardized by the sample median and scaled MAD,
which makes the estimates exactly equivariant under affine changes of the
data.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize
from scipy import special as sc

from .errors import DomainError, FitError, SingularScoreError
from .ggn import GgnParams, neglog_sf_terms
from .gn import abs_pow, std_gn_logpdf
from .sample import as_values
from .specfun import log_upper_inc_gamma_s_derivative, upper_inc_gamma_s_derivative

__all__ = [
    "ModelTag",
    "FitOptions",
    "FitResult",
    "ggn_loglik",
    "ggn_score",
    "gamma_loglik",
    "gamma_score",
    "beta_loglik",
    "beta_score",
    "fit_ggn",
    "fit_gamma",
    "fit_beta",
    "MIN_FIT_SIZE",
]

MIN_FIT_SIZE = 5
_MAD_SCALE = 1.4826


class ModelTag(str, Enum):
    GGN = "GGN"
    GAMMA = "GAMMA"
    BETA = "BETA"


PARAM_NAMES = {
    ModelTag.GGN: ("mu", "sigma", "s", "a"),
    ModelTag.GAMMA: ("shape", "rate"),
    ModelTag.BETA: ("alpha", "beta"),
}


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings.

    Attributes
    ----------
    fix_a : float or None
        Hold ``a`` at this value (``1.0`` fits the nested GN model).
    starts : int
        Number of deterministic starting points tried; the best
        log-likelihood wins, ties going to the earliest start.
    max_iter : int
        Iteration cap for each optimizer phase.
    gtol : float
        Gradient tolerance on the mean log-likelihood in the BFGS phase.
    hessian_step : float
        Relative step of the central-difference Hessian.
    """

    fix_a: float | None = None
    starts: int = 1
    max_iter: int = 4000
    gtol: float = 1e-9
    hessian_step: float = 1e-4

    def __post_init__(self):
        if self.fix_a is not None and not (self.fix_a > 0):
            raise DomainError("fix_a must be positive")
        if self.starts < 1:
            raise DomainError("starts must be >= 1")


@dataclass(frozen=True)
class FitResult:
    """Estimates and diagnostics of one fitted model.

    ``std_errors`` entries are ``nan`` when unavailable (non-positive-definite
    information matrix, or a parameter held fixed).
    """

    model_tag: ModelTag
    estimates: tuple
    std_errors: tuple
    loglik: float
    converged: bool
    iterations: int
    n_obs: int
    param_names: tuple = ()
    message: str = ""
    gradient_norm: float = float("nan")
    fixed: tuple = ()
    notes: dict = field(default_factory=dict)

    @property
    def k_params(self):
        return len(self.estimates) - len(self.fixed)

    @property
    def std_errors_available(self):
        free = [se for name, se in zip(self.param_names, self.std_errors) if name not in self.fixed]
        return all(math.isfinite(se) for se in free)

    def params(self):
        """Estimates as a ``{name: value}`` dict."""
        return dict(zip(self.param_names, self.estimates))

    def ggn_params(self) -> GgnParams:
        if self.model_tag is not ModelTag.GGN:
            raise FitError("not a GGN fit")
        return GgnParams(*self.estimates)

    def to_dict(self):
        d = asdict(self)
        d["model_tag"] = self.model_tag.value
        d["estimates"] = list(self.estimates)
        d["std_errors"] = list(self.std_errors)
        d["param_names"] = list(self.param_names)
        d["fixed"] = list(self.fixed)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["model_tag"] = ModelTag(d["model_tag"])
        for key in ("estimates", "std_errors", "param_names", "fixed"):
            d[key] = tuple(d.get(key, ()))
        return cls(**d)


# --------------------------------------------------------------------------
# GGN likelihood and score


def _ggn_terms(s, a, z):
    log_phi = std_gn_logpdf(s, z)
    logsf, big_l, log_l = neglog_sf_terms(s, z)
    return np.asarray(log_phi), np.asarray(logsf), np.asarray(big_l), np.asarray(log_l)


def _ggn_loglik_values(p: GgnParams, x):
    z = (x - p.mu) / p.sigma
    log_phi, _, _, log_l = _ggn_terms(p.s, p.a, z)
    out = log_phi - math.log(p.sigma) - math.lgamma(p.a)
    if p.a != 1.0:
        with np.errstate(invalid="ignore"):
            out = out + (p.a - 1.0) * log_l
        out = np.where(np.isneginf(log_phi), -np.inf, out)
    return out


def ggn_loglik(p: GgnParams, data) -> float:
    """Total GGN log-likelihood; ``-inf`` when any term is not finite."""
    total = math.fsum(_ggn_loglik_values(p, as_values(data)))
    return total if math.isfinite(total) else -math.inf


def _dlog_upper_ds(s, w):
    # d/ds log Gamma(1/s, w^s) for w > 0, through psi-tilde where the
    # function is representable and its log-derivative deep in the tail.
    a_inc = 1.0 / s
    upper = sc.gammaincc(a_inc, w**s) * sc.gamma(a_inc)
    out = np.empty_like(w)
    ok = upper > 1e-250
    if np.any(ok):
        out[ok] = upper_inc_gamma_s_derivative(s, w[ok]) / upper[ok]
    if np.any(~ok):
        out[~ok] = log_upper_inc_gamma_s_derivative(s, w[~ok])
    return out


def _ggn_score_values(p: GgnParams, x):
    """Per-observation score columns ``(U_mu, U_sigma, U_s, U_a)``."""
    mu, sigma, s, a = p.as_tuple()
    z = (x - mu) / sigma
    w = np.abs(z)
    sg = np.sign(z)
    if s < 1 and np.any(w == 0):
        raise SingularScoreError("an observation equals mu while s < 1: score is infinite")
    log_phi, logsf, big_l, log_l = _ggn_terms(s, a, z)
    ws = abs_pow(z, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        wsm1 = np.where(w > 0, ws / np.where(w > 0, w, 1.0), 0.0)  # |z|^(s-1), 0 at ties
        # R = phi / ((1 - Phi) L); at z = 0 all factors are finite.
        ratio = np.exp(log_phi - logsf - log_l)
        wlogw = np.where(w > 0, ws * np.log(np.where(w > 0, w, 1.0)), 0.0)
    am1 = a - 1.0
    u_mu = (s * sg * wsm1 - am1 * ratio) / sigma
    u_sigma = (-1.0 + s * ws - am1 * z * ratio) / sigma

    # d log phi_s / ds and the s-derivative of L = -log(1 - Phi_s).
    dlogphi = 1.0 / s + sc.digamma(1.0 / s) / s**2 - wlogw
    dl_ds = np.zeros_like(z)
    nz = w > 0
    if am1 != 0.0 and np.any(nz):
        # dQ/ds / Q with Q = Gamma(1/s, w^s) / Gamma(1/s).
        dlogq = _dlog_upper_ds(s, w[nz]) + sc.digamma(1.0 / s) / s**2
        q_half = 0.5 * sc.gammaincc(1.0 / s, ws[nz])
        right = z[nz] > 0
        # z > 0: 1 - Phi = Q/2, so dL/ds = -dlogQ/ds.
        # z < 0: Phi = Q/2, so dL/ds = (Q'/2) / (1 - Q/2).
        left_val = q_half * dlogq / (1.0 - q_half)
        dl_ds[nz] = np.where(right, -dlogq, left_val)
    with np.errstate(invalid="ignore"):
        u_s = dlogphi + (am1 * dl_ds / big_l if am1 != 0.0 else 0.0)
    u_a = log_l - sc.digamma(a)
    return np.column_stack(np.broadcast_arrays(u_mu, u_sigma, u_s, u_a))


def ggn_score(p: GgnParams, data) -> np.ndarray:
    """Analytic gradient of :func:`ggn_loglik` in ``(mu, sigma, s, a)``.

    Raises
    ------
    SingularScoreError
        If an observation equals ``mu`` exactly while ``s < 1``.
    """
    cols = _ggn_score_values(p, as_values(data))
    return np.array([math.fsum(cols[:, j]) for j in range(4)])


# --------------------------------------------------------------------------
# Baseline likelihoods


def _check_positive(x):
    bad = np.flatnonzero(~(x > 0))
    if bad.size:
        raise DomainError(f"gamma model needs positive data; value {x[bad[0]]!r} at index {bad[0]}")


def _check_unit(x):
    bad = np.flatnonzero(~((x > 0) & (x < 1)))
    if bad.size:
        raise DomainError(f"beta model needs data in (0, 1); value {x[bad[0]]!r} at index {bad[0]}")


def gamma_loglik(shape, rate, data):
    x = as_values(data)
    _check_positive(x)
    n = x.size
    return n * (shape * math.log(rate) - math.lgamma(shape)) + (shape - 1.0) * math.fsum(np.log(x)) - rate * math.fsum(x)


def gamma_score(shape, rate, data):
    x = as_values(data)
    n = x.size
    return np.array([
        n * (math.log(rate) - float(sc.digamma(shape))) + math.fsum(np.log(x)),
        n * shape / rate - math.fsum(x),
    ])


def beta_loglik(alpha, beta, data):
    x = as_values(data)
    _check_unit(x)
    n = x.size
    return (
        n * (math.lgamma(alpha + beta) - math.lgamma(alpha) - math.lgamma(beta))
        + (alpha - 1.0) * math.fsum(np.log(x))
        + (beta - 1.0) * math.fsum(np.log1p(-x))
    )


def beta_score(alpha, beta, data):
    x = as_values(data)
    n = x.size
    common = float(sc.digamma(alpha + beta))
    return np.array([
        n * (common - float(sc.digamma(alpha))) + math.fsum(np.log(x)),
        n * (common - float(sc.digamma(beta))) + math.fsum(np.log1p(-x)),
    ])


# --------------------------------------------------------------------------
# Shared optimizer


@dataclass
class _Problem:
    """Negative mean log-likelihood in unconstrained coordinates ``eta``."""

    loglik: callable  # eta -> total loglik
    grad: callable  # eta -> total gradient in eta (may raise SingularScoreError)
    n: int

    # Overflow far out in eta (huge s or a) counts as an infeasible point.
    _BLOWUPS = (OverflowError, ZeroDivisionError, FloatingPointError, DomainError)

    def f(self, eta):
        try:
            v = self.loglik(eta)
        except self._BLOWUPS:
            return 1e300
        return -v / self.n if math.isfinite(v) else 1e300

    def fg(self, eta):
        try:
            v = self.loglik(eta)
            if not math.isfinite(v):
                return 1e300, np.zeros_like(eta)
            g = self.grad(eta)
        except self._BLOWUPS:
            return 1e300, np.zeros_like(eta)
        if not np.all(np.isfinite(g)):
            return 1e300, np.zeros_like(eta)
        return -v / self.n, -g / self.n


def _simplex(problem, eta0, opts, xatol, fatol):
    return optimize.minimize(
        problem.f, eta0, method="Nelder-Mead",
        options={"maxiter": opts.max_iter, "xatol": xatol, "fatol": fatol,
                 "adaptive": len(eta0) > 2},
    )


def _run(problem: _Problem, eta0, opts: FitOptions):
    """Nelder-Mead then BFGS from ``eta0``; returns (eta, iterations, ok, note).

    For ``s <= 1`` the GGN likelihood has cusps at the observations, where
    BFGS line searches stall; the simplex result then stands on its own
    step-size criterion.  ``ok`` is true when either phase met its test.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        nm = _simplex(problem, eta0, opts, 1e-6, 1e-10)
        its = int(nm.nit)
        try:
            bf = optimize.minimize(
                problem.fg, nm.x, jac=True, method="BFGS",
                options={"maxiter": opts.max_iter, "gtol": opts.gtol},
            )
        except SingularScoreError:
            return nm.x, its, bool(nm.success), "singular score; simplex result kept"
    its += int(bf.nit)
    use_bfgs = bf.fun <= nm.fun and np.all(np.isfinite(bf.x))
    eta = bf.x if use_bfgs else nm.x
    ok = bool(bf.success) or bool(nm.success)
    note = "" if bf.success else f"simplex converged; BFGS: {bf.message}"
    return eta, its, ok, note


def _hessian(grad, eta, rel):
    k = eta.size
    h = np.empty((k, k))
    for j in range(k):
        step = rel * max(1.0, abs(eta[j]))
        e = np.zeros(k)
        e[j] = step
        h[:, j] = (grad(eta + e) - grad(eta - e)) / (2.0 * step)
    return 0.5 * (h + h.T)


def _std_errors(grad, eta, rel):
    """Standard errors in ``eta`` from the observed information, or nans."""
    try:
        info = -_hessian(grad, eta, rel)
    except (SingularScoreError, FloatingPointError, ValueError, OverflowError, ZeroDivisionError):
        return np.full(eta.size, np.nan)
    if not np.all(np.isfinite(info)):
        return np.full(eta.size, np.nan)
    try:
        chol = np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return np.full(eta.size, np.nan)
    inv_chol = np.linalg.solve(chol, np.eye(eta.size))
    return np.sqrt(np.sum(inv_chol**2, axis=0))


def _best(candidates):
    # Highest log-likelihood; ties go to the earliest start.
    best = None
    for cand in candidates:
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def _failed(tag, n, msg, fixed=()):
    names = PARAM_NAMES[tag]
    nan = (float("nan"),) * len(names)
    return FitResult(tag, nan, nan, float("nan"), False, 0, n, names, msg, float("nan"), fixed)


# --------------------------------------------------------------------------
# GGN fit

# Candidate (s, a) starting shapes; the first is the documented default.
_GGN_STARTS = [
    (2.0, 1.0), (1.0, 1.0), (0.5, 1.0), (0.3, 1.0), (4.0, 1.0),
    (2.0, 2.0), (1.0, 2.0), (0.5, 2.0), (2.0, 0.5), (1.0, 0.5),
]


def _mad_to_sigma(s):
    # MAD of GN(0, sigma, s) is sigma times the median of |Z|, where
    # |Z|^s ~ Gamma(1/s); for s = 2 this gives the familiar 1.4826.
    return 1.0 / float(sc.gammaincinv(1.0 / s, 0.5)) ** (1.0 / s)


_S_MAX = 1e3
_A_MAX = 1e4


def fit_ggn(data, options: FitOptions = FitOptions()) -> FitResult:
    """Maximum-likelihood GGN fit.

    Parameters
    ----------
    data : Sample or array_like
        At least five finite observations.
    options : FitOptions
        Optimizer settings; ``fix_a=1`` fits the nested GN model.

    Returns
    -------
    FitResult
        ``converged`` is false when the optimizer stalled or the shape
        estimates ran off towards a boundary (``s > 1e3`` or ``a > 1e4``).
    """
    x = as_values(data)
    n = x.size
    fixed = ("a",) if options.fix_a is not None else ()
    if n < MIN_FIT_SIZE:
        raise DomainError(f"need at least {MIN_FIT_SIZE} observations, got {n}")
    loc = float(np.median(x))
    scale = _MAD_SCALE * float(np.median(np.abs(x - loc)))
    if not scale > 0:
        scale = float(np.std(x))
    if not scale > 0:
        return _failed(ModelTag.GGN, n, "degenerate sample: all values equal", fixed)
    y = (x - loc) / scale
    fix_a = options.fix_a

    def unpack(eta):
        a = fix_a if fix_a is not None else math.exp(eta[3])
        return GgnParams(eta[0], math.exp(eta[1]), math.exp(eta[2]), a)

    def loglik(eta):
        try:
            p = unpack(eta)
        except (DomainError, OverflowError):
            return -math.inf
        with np.errstate(all="ignore"):
            return ggn_loglik(p, y)

    def grad(eta):
        p = unpack(eta)
        with np.errstate(all="ignore"):
            g = ggn_score(p, y)
        g = g * np.array([1.0, p.sigma, p.s, p.a])
        return g if fix_a is None else g[:3]

    problem = _Problem(loglik, grad, n)
    # Screen every candidate start by its log-likelihood and optimize from
    # the best ``options.starts`` of them (stable sort: ties keep list order).
    screened = []
    for s0, a0 in _GGN_STARTS:
        if fix_a is not None and a0 != 1.0:
            continue
        eta0 = [0.0, math.log(_mad_to_sigma(s0) / _MAD_SCALE), math.log(s0)]
        if fix_a is None:
            eta0.append(math.log(a0))
        eta0 = np.array(eta0)
        screened.append((loglik(eta0), eta0))
    order = sorted(range(len(screened)), key=lambda i: -screened[i][0])
    cands = []
    for idx in order[: options.starts]:
        eta, its, ok, note = _run(problem, screened[idx][1], options)
        cands.append((loglik(eta), eta, its, ok, note))
    ll_y, eta, its, ok, note = _best(cands)

    p_y = unpack(eta)
    try:
        g = grad(eta)
        gnorm = float(np.max(np.abs(g))) / n
    except (SingularScoreError, OverflowError, ZeroDivisionError):
        gnorm = float("nan")
    se_eta = _std_errors(grad, eta, options.hessian_step)
    # Back to the data scale: mu = loc + scale mu_y, sigma = scale sigma_y.
    mu = loc + scale * p_y.mu
    sigma = scale * p_y.sigma
    jac = np.array([scale, sigma, p_y.s, p_y.a])[: eta.size]
    se = tuple(float(v) for v in se_eta * jac) + ((float("nan"),) if fix_a is not None else ())
    loglik_x = ll_y - n * math.log(scale)
    inside = p_y.s <= _S_MAX and p_y.a <= _A_MAX
    small_grad = math.isfinite(gnorm) and gnorm < 1e-5
    converged = bool((ok or small_grad) and inside and math.isfinite(loglik_x))
    if not inside:
        note = "shape estimate ran to the boundary of the search region"
    return FitResult(
        ModelTag.GGN,
        (mu, sigma, p_y.s, p_y.a),
        se,
        loglik_x,
        converged,
        its,
        n,
        PARAM_NAMES[ModelTag.GGN],
        str(note),
        gnorm,
        fixed,
        {"standardization": {"loc": loc, "scale": scale}},
    )


# --------------------------------------------------------------------------
# Baseline fits


def _fit_two(tag, x, loglik_fn, score_fn, eta0, options, scale=1.0):
    n = x.size

    def loglik(eta):
        a, b = np.exp(eta)
        if not (np.all(np.isfinite((a, b))) and a > 0 and b > 0):
            return -math.inf
        with np.errstate(all="ignore"):
            v = loglik_fn(a, b, x)
        return v if math.isfinite(v) else -math.inf

    def grad(eta):
        a, b = np.exp(eta)
        return score_fn(a, b, x) * np.array([a, b])

    problem = _Problem(loglik, grad, n)
    eta, its, ok, note = _run(problem, np.asarray(eta0, dtype=float), options)
    ll = loglik(eta)
    g = grad(eta)
    gnorm = float(np.max(np.abs(g))) / n
    se = _std_errors(grad, eta, options.hessian_step) * np.exp(eta)
    est = np.exp(eta)
    inside = bool(np.all(est < 1e8) and np.all(est > 1e-8))
    converged = bool((ok or gnorm < 1e-5) and inside and math.isfinite(ll))
    return est, se, ll, converged, its, gnorm, str(note)


def fit_gamma(data, options: FitOptions = FitOptions()) -> FitResult:
    """Two-parameter gamma fit (shape, rate) by maximum likelihood.

    Raises
    ------
    DomainError
        If any observation is not strictly positive.
    """
    x = as_values(data)
    _check_positive(x)
    n = x.size
    if n < MIN_FIT_SIZE:
        raise DomainError(f"need at least {MIN_FIT_SIZE} observations, got {n}")
    m = float(np.mean(x))
    v = float(np.var(x))
    if not v > 0:
        return _failed(ModelTag.GAMMA, n, "degenerate sample: zero variance")
    # Fit on x / mean so the rate starts near 1; rate_x = rate_y / mean.
    y = x / m
    vy = v / m**2
    est, se, ll, conv, its, gnorm, note = _fit_two(
        ModelTag.GAMMA, y, gamma_loglik, gamma_score,
        [math.log(1.0 / vy), math.log(1.0 / vy)], options,
    )
    est = est / np.array([1.0, m])
    se = se / np.array([1.0, m])
    ll = ll - n * math.log(m)
    return FitResult(ModelTag.GAMMA, tuple(map(float, est)), tuple(map(float, se)), float(ll),
                     conv, its, n, PARAM_NAMES[ModelTag.GAMMA], note, gnorm)


def fit_beta(data, options: FitOptions = FitOptions()) -> FitResult:
    """Two-parameter beta fit by maximum likelihood.

    Raises
    ------
    DomainError
        If any observation lies outside the open unit interval.
    """
    x = as_values(data)
    _check_unit(x)
    n = x.size
    if n < MIN_FIT_SIZE:
        raise DomainError(f"need at least {MIN_FIT_SIZE} observations, got {n}")
    m = float(np.mean(x))
    v = float(np.var(x))
    if not v > 0:
        return _failed(ModelTag.BETA, n, "degenerate sample: zero variance")
    common = m * (1.0 - m) / v - 1.0
    start = [math.log(m * common), math.log((1.0 - m) * common)] if common > 0 else [0.0, 0.0]
    est, se, ll, conv, its, gnorm, note = _fit_two(
        ModelTag.BETA, x, beta_loglik, beta_score, start, options,
    )
    return FitResult(ModelTag.BETA, tuple(map(float, est)), tuple(map(float, se)), float(ll),
                     conv, its, n, PARAM_NAMES[ModelTag.BETA], note, gnorm)
