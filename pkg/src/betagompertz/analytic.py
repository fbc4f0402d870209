"""Series representations, moments, order statistics, entropies and
quantile-based shape measures of the BG distribution.

Integrals over the support are taken after the substitution ``y = G(x)``,
which turns ``E[h(X)]`` into a Beta(alpha, beta) expectation on ``[0, 1]``::

    E[h(X)] = (1/B) int_0^1 h(G^{-1}(y)) y^(alpha-1) (1-y)^(beta-1) dy,
    G^{-1}(y) = log1p((gamma/theta) L) / gamma,   L = -log1p(-y).

The endpoint powers are handed to QUADPACK's algebraic-weight rule (QAWS),
so the integrand itself stays smooth even when alpha or beta is below one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from . import core, specfun
from .core import BGParams
from .errors import ConvergenceError, DomainError, SeriesDivergenceError
from .specfun import DEFAULT_SERIES, SeriesControl

__all__ = [
    "MixtureCoefficients", "mixture_weights", "cdf_series", "pdf_series",
    "cdf_hypergeometric", "moment", "mgf", "mgf_at_gamma", "PowerSeriesPow",
    "power_series_pow", "order_stat_pdf", "order_stat_cdf",
    "order_stat_moment", "bowley_skewness", "moors_kurtosis",
    "shannon_entropy", "renyi_entropy", "beta_expectation",
]

_QUAD = dict(epsabs=1e-13, epsrel=1e-11, limit=200)


# ---------------------------------------------------------------------------
# mixture representation


@dataclass(frozen=True)
class MixtureCoefficients:
    """Weights of ``F = sum_j p_j G^(alpha+j)`` and ``F = sum_r b_r G^r``.

    ``w`` are the binomial weights of ``(1-z)^(beta-1) = sum_j w_j z^j``.
    ``converged`` says whether the ``p_j`` had decayed below the tolerance
    within the budget; ``b_converged`` does the same for the inner sums of
    ``b_r``, which only settle when ``alpha`` is an integer.
    """

    p: np.ndarray
    w: np.ndarray
    b: np.ndarray
    converged: bool
    b_converged: bool


def _binomial_weights(beta, count):
    j = np.arange(1, count)
    ratios = (j - beta) / j
    return np.concatenate(([1.0], np.cumprod(ratios)))


def _p_weights(alpha, beta, count):
    w = _binomial_weights(beta, count)
    return w / ((alpha + np.arange(count)) * math.exp(special.betaln(alpha, beta))), w


def _check_shape(alpha, beta):
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not (np.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be finite and > 0")


def mixture_weights(alpha, beta, K, ctl: SeriesControl = DEFAULT_SERIES, b_terms=None):
    """First ``K`` mixture weights ``p_j`` and power coefficients ``b_r``.

    ``b_r = sum_j sum_{k>=r} p_j (-1)^(k+r) C(alpha+j, k) C(k, r)`` is
    evaluated with both sums truncated at ``b_terms`` (default
    ``min(K, 64)``). Issues a ``RuntimeWarning`` when the ``p_j`` have not
    decayed by ``K``.
    """
    _check_shape(alpha, beta)
    if int(K) != K or K < 1:
        raise DomainError("K must be a positive integer")
    K = int(K)
    p, w = _p_weights(alpha, beta, K)
    integer_beta = float(beta).is_integer() and beta <= K
    converged = integer_beta or abs(p[-1]) < ctl.abs_tol * max(abs(p.sum()), 1e-300)
    if not converged:
        warnings.warn(
            f"mixture weights not settled after {K} terms (|p_K-1| = {abs(p[-1]):.3g})",
            RuntimeWarning, stacklevel=2,
        )
    m = min(K, 64) if b_terms is None else int(b_terms)
    k = np.arange(m)
    a_j = alpha + np.arange(m)
    # A[j, k] = (-1)^k C(alpha + j, k);  C[k, r] = (-1)^r C(k, r)
    A = special.binom(a_j[:, None], k[None, :]) * (-1.0) ** k
    C = special.binom(k[:, None], k[None, :]) * (-1.0) ** k[None, :]
    b = p[:m] @ A @ C
    # the inner k-sum has settled only if the first omitted term (k = m) is negligible
    tail = np.abs(p[:m, None] * special.binom(a_j, m)[:, None]
                  * special.binom(m, k)[None, :]).sum(axis=0)
    b_converged = bool(np.all(tail <= 1e-10 * np.maximum(np.abs(b), 1.0)))
    return MixtureCoefficients(p=p, w=w, b=b, converged=bool(converged), b_converged=b_converged)


def _sum_tail_bounded(terms, rho, ctl, what):
    """Sum a series whose term ratio is eventually bounded by ``rho < 1``."""
    partial = np.cumsum(terms)
    bound = np.abs(terms) * (rho / (1.0 - rho) if rho < 1 else np.inf)
    done = bound <= ctl.abs_tol * np.abs(partial) + 1e-300
    # the bound is only valid once the weights are monotone (j > beta)
    if done.any():
        stop = int(np.argmax(done))
        return math.fsum(terms[: stop + 1])
    raise SeriesDivergenceError(
        f"{what} did not settle within {ctl.max_terms} terms",
        partial_sum=math.fsum(terms), terms=len(terms),
    )


def _series_points(x, p):
    arr, scalar = core._support(x)
    g = core.gompertz_cdf(arr, p.theta, p.gamma)
    return arr, np.atleast_1d(g), scalar


def cdf_series(x, p: BGParams, ctl: SeriesControl = DEFAULT_SERIES):
    """``sum_j p_j G(x)^(alpha+j)`` truncated by ``ctl``.

    Raises :class:`SeriesDivergenceError` when the tail bound is not met
    within ``ctl.max_terms`` terms (typically far in the upper tail, where
    ``G(x)`` is close to 1).
    """
    arr, g, scalar = _series_points(x, p)
    pj, _ = _p_weights(p.alpha, p.beta, ctl.max_terms)
    j = np.arange(ctl.max_terms)
    first_monotone = int(math.ceil(p.beta))
    out = np.empty_like(g)
    for idx, gv in enumerate(g):
        if gv == 0.0:
            out[idx] = 0.0
            continue
        if gv >= 1.0:
            raise SeriesDivergenceError("G(x) rounds to 1; mixture series cannot converge")
        terms = pj * np.exp((p.alpha + j) * math.log(gv))
        head = math.fsum(terms[:first_monotone]) if first_monotone else 0.0
        out[idx] = head + _sum_tail_bounded(terms[first_monotone:], gv, ctl, "cdf series") \
            if first_monotone < len(terms) else head
    return core._ret(out.reshape(arr.shape), scalar)


def pdf_series(x, p: BGParams, ctl: SeriesControl = DEFAULT_SERIES):
    """``sum_j p_j (alpha+j) g(x) G(x)^(alpha+j-1)`` truncated by ``ctl``."""
    arr, g, scalar = _series_points(x, p)
    dens = np.atleast_1d(core.gompertz_pdf(arr, p.theta, p.gamma))
    pj, _ = _p_weights(p.alpha, p.beta, ctl.max_terms)
    j = np.arange(ctl.max_terms)
    coef = pj * (p.alpha + j)
    first_monotone = int(math.ceil(p.beta))
    out = np.empty_like(g)
    for idx, (gv, dv) in enumerate(zip(g, dens)):
        if gv == 0.0:
            # only the j = 0 term survives: alpha g(0) 0^(alpha-1) / (alpha B)
            out[idx] = dv / math.exp(special.betaln(p.alpha, p.beta)) * (
                1.0 if p.alpha == 1 else (0.0 if p.alpha > 1 else math.inf))
            continue
        if gv >= 1.0:
            raise SeriesDivergenceError("G(x) rounds to 1; mixture series cannot converge")
        terms = dv * coef * np.exp((p.alpha + j - 1) * math.log(gv))
        head = math.fsum(terms[:first_monotone]) if first_monotone else 0.0
        out[idx] = head + _sum_tail_bounded(terms[first_monotone:], gv, ctl, "pdf series") \
            if first_monotone < len(terms) else head
    return core._ret(out.reshape(arr.shape), scalar)


def cdf_hypergeometric(x, p: BGParams, ctl: SeriesControl = DEFAULT_SERIES):
    """``G^alpha / (alpha B(alpha, beta)) * 2F1(alpha, 1-beta; alpha+1; G)``."""
    arr, g, scalar = _series_points(x, p)
    log_b = special.betaln(p.alpha, p.beta)
    out = np.empty_like(g)
    for idx, gv in enumerate(g):
        if gv == 0.0:
            out[idx] = 0.0
            continue
        if gv >= 1.0:
            raise SeriesDivergenceError("G(x) rounds to 1; 2F1 series cannot converge")
        f21 = specfun.gauss_2f1(p.alpha, 1.0 - p.beta, p.alpha + 1.0, gv, ctl)
        out[idx] = math.exp(p.alpha * math.log(gv) - log_b) / p.alpha * f21
    return core._ret(out.reshape(arr.shape), scalar)


# ---------------------------------------------------------------------------
# expectations


def _checked_quad(*args, what, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(*args, **_QUAD, **kw)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"quadrature for {what} failed: {exc}") from None
        except OverflowError:
            raise ConvergenceError(f"quadrature for {what} overflows") from None
    if not np.isfinite(val):
        raise ConvergenceError(f"quadrature for {what} returned {val}")
    return val


def _beta_integral(func, a_exp, b_exp, what):
    """``int_0^1 func(y, s) y^a_exp (1-y)^b_exp dy`` with ``s = -ln(1-y)``.

    The lower half uses the algebraic weight ``y^a_exp`` directly. The upper
    half is rewritten in ``s``, where ``(1-y)^b_exp dy = e^{-(b_exp+1) s} ds``
    and the integrand is smooth on ``[ln 2, inf)``; this keeps the slow
    ``log(-log(1-y))`` growth of quantile-type integrands away from QAWS.
    """
    def lower(y):
        return func(y, -math.log1p(-y)) * (1.0 - y) ** b_exp

    def upper(s):
        y = -math.expm1(-s)
        return func(y, s) * y ** a_exp * math.exp(-(b_exp + 1.0) * s)

    lo = _checked_quad(lower, 0.0, 0.5, weight="alg", wvar=(a_exp, 0.0), what=what)
    hi = _checked_quad(upper, math.log(2.0), math.inf, what=what)
    return lo + hi


def _x_of_s(s, p):
    return math.log1p(p.gamma / p.theta * s) / p.gamma


def beta_expectation(h, p: BGParams, what="expectation"):
    """``E[h(X)]`` for ``X ~ BG(p)`` by quadrature in ``y = G(x)``."""
    log_b = special.betaln(p.alpha, p.beta)
    val = _beta_integral(lambda y, s: h(_x_of_s(s, p)), p.alpha - 1.0, p.beta - 1.0, what)
    return val * math.exp(-log_b)


def moment(k, p: BGParams, ctl: SeriesControl = DEFAULT_SERIES):
    """Raw moment ``E[X^k]`` by quadrature."""
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    return beta_expectation(lambda x: x ** k, p, f"moment {k}")


def mgf(t, p: BGParams, ctl: SeriesControl = DEFAULT_SERIES):
    """Moment generating function ``E[e^(tX)]`` by quadrature; finite for all real t."""
    t = float(t)
    if not np.isfinite(t):
        raise DomainError("t must be finite")
    if t == 0.0:
        return 1.0
    # e^{t x(y)} = (1 + (gamma/theta) L)^(t/gamma), L = -ln(1 - y)
    r = t / p.gamma
    c = p.gamma / p.theta

    def h(y, s):
        return math.exp(r * math.log1p(c * s))

    log_b = special.betaln(p.alpha, p.beta)
    val = _beta_integral(h, p.alpha - 1.0, p.beta - 1.0, f"mgf at t={t}")
    return val * math.exp(-log_b)


def mgf_at_gamma(p: BGParams):
    """``M_X(gamma) = 1 + (gamma/theta)(psi(alpha+beta) - psi(beta))``.

    Since ``e^(gamma X) - 1 = (gamma/theta) L`` with ``L = -ln(1-Y)`` and
    ``Y ~ Beta(alpha, beta)``, the mgf at ``t = gamma`` is elementary.
    """
    return 1.0 + p.gamma / p.theta * (special.digamma(p.alpha + p.beta) - special.digamma(p.beta))


# ---------------------------------------------------------------------------
# power series raised to an integer power


@dataclass(frozen=True)
class PowerSeriesPow:
    """``c[n, r]``: coefficient of ``u^r`` in ``(sum_r b_r u^r)^n`` for powers
    ``0..n`` (rows) and terms ``0..R`` (columns)."""

    c: np.ndarray

    def row(self, n):
        return self.c[n]


def power_series_pow(b, n, R):
    """Coefficients of the ``n``-th power by the ``c_{n,r}`` recurrence.

    With integer or :class:`fractions.Fraction` input the arithmetic is exact
    (object array of Fractions); otherwise it is done in floating point.
    """
    if int(n) != n or n < 1 or int(R) != R or R < 1:
        raise DomainError("n and R must be positive integers")
    n, R = int(n), int(R)
    b = list(b)
    if len(b) < R + 1:
        b = b + [0] * (R + 1 - len(b))
    exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in b)
    if exact:
        b = [Fraction(v) for v in b]
        zero = Fraction(0)
    else:
        b = [float(v) for v in b]
        zero = 0.0
    if b[0] == 0:
        raise DomainError("b_0 must be non-zero")
    c = np.empty((n + 1, R + 1), dtype=object if exact else float)
    for power in range(n + 1):
        row = [b[0] ** power]
        for r in range(1, R + 1):
            acc = zero
            for m in range(1, r + 1):
                acc += (m * (power + 1) - r) * b[m] * row[r - m]
            row.append(acc / (r * b[0]))
        c[power] = row
    return PowerSeriesPow(c)


# ---------------------------------------------------------------------------
# order statistics


def _order_indices(i, n):
    if int(i) != i or int(n) != n or not (1 <= i <= n):
        raise DomainError("order statistic indices need 1 <= i <= n")
    return int(i), int(n)


def order_stat_pdf(x, i, n, p: BGParams):
    """Density of the ``i``-th of ``n`` order statistics.

    The binomial sum ``sum_m (-1)^m C(n-i, m) f F^(i+m-1) / B(i, n-i+1)``
    collapses to ``f F^(i-1) (1-F)^(n-i) / B(i, n-i+1)``, evaluated in logs
    with ``1 - F`` taken from the survival function.
    """
    i, n = _order_indices(i, n)
    arr, scalar = core._support(x)
    with np.errstate(divide="ignore"):
        logf = core.log_pdf(arr, p)
        logF = np.log(core.cdf(arr, p))
        logS = np.log(core.sf(arr, p))
        out = logf - special.betaln(i, n - i + 1)
        if i > 1:
            out = out + (i - 1) * logF
        if n > i:
            out = out + (n - i) * logS
    with np.errstate(over="ignore"):
        return core._ret(np.exp(out), scalar)


def order_stat_cdf(x, i, n, p: BGParams):
    """``F_{i:n}(x) = I_{F(x)}(i, n-i+1)``, the closed form of the binomial sum."""
    i, n = _order_indices(i, n)
    arr, scalar = core._support(x)
    F = core.cdf(arr, p)
    S = core.sf(arr, p)
    out = np.where(F <= 0.5, special.betainc(i, n - i + 1, F),
                   1.0 - special.betainc(n - i + 1, i, S))
    return core._ret(out, scalar)


def order_stat_moment(s, i, n, p: BGParams):
    """``E[X_{i:n}^s]`` by quadrature in ``y = G(x)``.

    The order-statistic density is ``f F^(i-1) (1-F)^(n-i) / B(i, n-i+1)``.
    Near ``y = 0``, ``F ~ y^alpha / (alpha B)``, so ``y^(alpha i - 1)`` goes
    into the algebraic weight and the smooth ratio ``(F / y^alpha)^(i-1)``
    stays in the integrand.
    """
    i, n = _order_indices(i, n)
    if int(s) != s or s < 1:
        raise DomainError("s must be a positive integer")
    a, b = p.alpha, p.beta
    log_b = special.betaln(a, b)
    at_zero = -math.log(a) - log_b

    def h(y, log_surv):
        x = _x_of_s(log_surv, p)
        val = x ** s
        if i > 1:
            ratio = at_zero if y == 0.0 else math.log(special.betainc(a, b, y)) - a * math.log(y)
            val *= math.exp((i - 1) * ratio)
        if n > i:
            val *= special.betainc(b, a, math.exp(-log_surv)) ** (n - i)
        return val

    val = _beta_integral(h, a * i - 1.0, b - 1.0, f"order statistic moment ({s}, {i}, {n})")
    return val * math.exp(-log_b - special.betaln(i, n - i + 1))


# ---------------------------------------------------------------------------
# quantile shape measures


def bowley_skewness(p: BGParams):
    q1, q2, q3 = core._quantile(np.array([0.25, 0.5, 0.75]), p)
    return float((q3 + q1 - 2 * q2) / (q3 - q1))


def moors_kurtosis(p: BGParams):
    e = core._quantile(np.arange(1, 8) / 8.0, p)
    return float((e[6] - e[4] + e[2] - e[0]) / (e[5] - e[1]))


# ---------------------------------------------------------------------------
# entropies


def shannon_entropy(p: BGParams):
    """Differential entropy from the closed expression

        ln(B/theta) - theta beta/gamma - gamma E[X]
            + (theta beta/gamma) M_X(gamma) + (alpha-1)(psi(alpha+beta) - psi(alpha)).

    The two ``theta beta / gamma`` terms are combined through
    :func:`mgf_at_gamma` to avoid cancelling two large numbers.
    """
    dg_ab = special.digamma(p.alpha + p.beta)
    mean = moment(1, p)
    combined = p.beta * (dg_ab - special.digamma(p.beta))  # (theta beta/gamma)(M(gamma) - 1)
    return float(
        special.betaln(p.alpha, p.beta) - math.log(p.theta) + combined
        - p.gamma * mean + (p.alpha - 1.0) * (dg_ab - special.digamma(p.alpha))
    )


def renyi_entropy(lam, p: BGParams):
    """Renyi entropy of order ``lam`` by quadrature.

    ``int f^lam dx = B^-lam int_0^1 (theta + gamma L)^(lam-1)
    y^(lam(alpha-1)) (1-y)^(lam beta - 1) dy``. When ``lam (alpha-1) <= -1``
    the integral diverges at the origin and the entropy is ``-inf``.
    """
    lam = float(lam)
    if not (lam > 0 and lam != 1.0 and np.isfinite(lam)):
        raise DomainError("lambda must be positive, finite and != 1")
    a_exp = lam * (p.alpha - 1.0)
    if a_exp <= -1.0:
        return -math.inf
    val = _beta_integral(
        lambda y, s: (p.theta + p.gamma * s) ** (lam - 1.0),
        a_exp, lam * p.beta - 1.0, f"Renyi integral (lambda={lam})",
    )
    log_int = math.log(val) - lam * special.betaln(p.alpha, p.beta)
    return log_int / (1.0 - lam)
