"""The beta-Gompertz distribution: density, distribution, hazards, quantiles
and sampling.

Writing ``H(x) = theta * (exp(gamma x) - 1) / gamma`` for the Gompertz
cumulative hazard, the baseline cdf is ``G = 1 - exp(-H)`` and

    F(x) = I_{G(x)}(alpha, beta)
    f(x) = theta exp(gamma x - beta H) (1 - exp(-H))^(alpha - 1) / B(alpha, beta)

Every expression is evaluated through ``expm1``/``log1p`` so that small
``gamma`` degrades gracefully to the exponential limit ``H = theta x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from . import specfun
from .errors import DomainError
from .specfun import SeriesControl  # re-exported

__all__ = [
    "BGParams", "SeriesControl", "gompertz_cdf", "gompertz_pdf",
    "cumulative_hazard", "log_pdf", "pdf", "cdf", "sf", "log_sf", "hrf",
    "reversed_hrf", "quantile", "sample",
]


@dataclass(frozen=True)
class BGParams:
    """Parameters of BG(theta, gamma, alpha, beta); all strictly positive."""

    theta: float
    gamma: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("theta", "gamma", "alpha", "beta"):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self):
        return (self.theta, self.gamma, self.alpha, self.beta)

    @classmethod
    def from_sequence(cls, values):
        """Build from ``(theta, gamma, alpha, beta)``."""
        theta, gamma, alpha, beta = (float(v) for v in values)
        return cls(theta, gamma, alpha, beta)


def _support(x):
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any() or np.any(arr < 0):
        raise DomainError("x must be >= 0 (support is [0, inf))")
    return arr, arr.ndim == 0


def _ret(values, scalar):
    return float(values) if scalar else values


def _expm1_over(x, gamma):
    # (e^{gamma x} - 1) / gamma, exact limit x as gamma -> 0
    return np.expm1(gamma * x) / gamma


def cumulative_hazard(x, theta, gamma):
    """Gompertz cumulative hazard ``theta (e^{gamma x} - 1) / gamma``."""
    arr, scalar = _support(x)
    with np.errstate(over="ignore"):
        return _ret(theta * _expm1_over(arr, gamma), scalar)


def gompertz_cdf(x, theta, gamma):
    """Gompertz cdf ``1 - exp(-(theta/gamma)(e^{gamma x} - 1))``."""
    arr, scalar = _support(x)
    with np.errstate(over="ignore"):
        h = theta * _expm1_over(arr, gamma)
    return _ret(-np.expm1(-h), scalar)


def gompertz_pdf(x, theta, gamma):
    arr, scalar = _support(x)
    with np.errstate(over="ignore"):
        h = theta * _expm1_over(arr, gamma)
        out = np.exp(np.log(theta) + gamma * arr - h)
    return _ret(out, scalar)


def log_pdf(x, p: BGParams):
    """Log density. At ``x = 0`` returns ``ln(theta beta)`` when alpha = 1,
    ``-inf`` when alpha > 1 and ``+inf`` when alpha < 1."""
    arr, scalar = _support(x)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        h = p.theta * _expm1_over(arr, p.gamma)
        out = (np.log(p.theta) + p.gamma * arr - p.beta * h
               - specfun.log_beta(p.alpha, p.beta))
        if p.alpha != 1.0:
            out = out + (p.alpha - 1.0) * np.log(-np.expm1(-h))
        # beyond overflow of e^{gamma x} the density is exactly zero
        out = np.where(np.isnan(out) & np.isinf(h), -np.inf, out)
    return _ret(out, scalar)


def pdf(x, p: BGParams):
    with np.errstate(over="ignore"):
        return _ret(np.exp(log_pdf(x, p)), np.ndim(x) == 0)


def _cdf_from_hazard(h, alpha, beta):
    g = -np.expm1(-h)
    upper = g > 0.5
    lower_part = special.betainc(alpha, beta, np.where(upper, 0.5, g))
    upper_part = 1.0 - special.betainc(beta, alpha, np.where(upper, np.exp(-h), 0.5))
    return np.where(upper, upper_part, lower_part)


def cdf(x, p: BGParams):
    """``F(x) = I_{G(x)}(alpha, beta)``.

    Above ``G = 1/2`` the complement ``1 - I_{1-G}(beta, alpha)`` is used,
    since ``G`` itself rounds to 1 long before ``F`` does when beta is small.
    """
    arr, scalar = _support(x)
    with np.errstate(over="ignore"):
        h = p.theta * _expm1_over(arr, p.gamma)
    return _ret(_cdf_from_hazard(h, p.alpha, p.beta), scalar)


def sf(x, p: BGParams):
    """Survival ``1 - F(x)`` as ``I_{1-G(x)}(beta, alpha)`` (no cancellation)."""
    arr, scalar = _support(x)
    with np.errstate(over="ignore"):
        s = np.exp(-p.theta * _expm1_over(arr, p.gamma))
    return _ret(special.betainc(p.beta, p.alpha, s), scalar)


def log_sf(x, p: BGParams):
    with np.errstate(divide="ignore"):
        return _ret(np.log(sf(x, p)), np.ndim(x) == 0)


def hrf(x, p: BGParams):
    """Hazard rate ``f(x) / (1 - F(x))`` evaluated in log space.

    Raises :class:`DomainError` where the survival function underflows to 0,
    since the ratio is then not representable from its parts.
    """
    arr, scalar = _support(x)
    ls = log_sf(arr, p)
    if np.any(np.isneginf(ls)):
        raise DomainError("survival function underflows to 0; hazard not representable")
    with np.errstate(over="ignore"):
        out = np.exp(log_pdf(arr, p) - ls)
    return _ret(out, scalar)


def reversed_hrf(x, p: BGParams):
    """Reversed hazard ``f(x) / F(x)`` for ``x > 0``."""
    arr, scalar = _support(x)
    if np.any(arr <= 0):
        raise DomainError("reversed hazard requires x > 0")
    c = cdf(arr, p)
    if np.any(c <= 0):
        raise DomainError("cdf underflows to 0; reversed hazard not representable")
    with np.errstate(over="ignore"):
        out = np.exp(log_pdf(arr, p) - np.log(c))
    return _ret(out, scalar)


def _quantile(u, p: BGParams):
    # no domain check; u = 0 -> 0, u = 1 -> inf
    u = np.asarray(u, dtype=float)
    upper = u > 0.5
    # -ln(1 - Y) for Y ~ Beta(alpha, beta) at level u; upper half uses the
    # complementary beta quantile so 1 - Y keeps full precision
    with np.errstate(divide="ignore"):
        lower_y = specfun.inv_reg_inc_beta(np.where(upper, 0.5, u), p.alpha, p.beta)
        upper_w = specfun.inv_reg_inc_beta(np.where(upper, 1 - u, 0.5), p.beta, p.alpha)
        neg_log_surv = np.where(upper, -np.log(upper_w), -np.log1p(-lower_y))
    return np.log1p(p.gamma / p.theta * neg_log_surv) / p.gamma


def quantile(u, p: BGParams):
    """Quantile function ``(1/gamma) ln(1 - (gamma/theta) ln(1 - Q_beta(u)))``."""
    arr = np.asarray(u, dtype=float)
    if np.isnan(arr).any() or np.any((arr <= 0) | (arr >= 1)):
        raise DomainError("u must lie in (0, 1)")
    return _ret(_quantile(arr, p), arr.ndim == 0)


def sample(n, p: BGParams, seed=None):
    """``n`` draws by inversion ``X = G^{-1}(V)``, ``V ~ Beta(alpha, beta)``.

    Uses one uniform per draw from ``numpy.random.default_rng(seed)``, so a
    given ``(n, p, seed)`` always reproduces the same array. ``seed`` may be
    an int, a ``SeedSequence`` or a ``Generator``.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(int(n))
    return _quantile(u, p)
