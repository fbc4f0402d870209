"""Maximum likelihood for the beta-Gompertz family and its sub-models.

All six families share one likelihood kernel. Per observation, with
``H = theta * E(x; gamma)``, ``E = (e^{gamma x} - 1) / gamma`` (or ``E = x``
on the ``gamma -> 0`` boundary),

    l = ln theta + gamma x - beta H - ln B(alpha, beta) + (alpha - 1) ln(1 - e^{-H})

and writing ``W = 1 / (e^H - 1)``, the chain rule through ``H`` gives

    dl/dH   = -beta + (alpha - 1) W
    d2l/dH2 = -(alpha - 1) W (1 + W)

from which the full gradient and Hessian in ``(alpha, beta, theta, gamma)``
follow with ``dH/dtheta = E``, ``dH/dgamma = theta E'``. ``E'`` and ``E''``
are evaluated from their Taylor series when ``gamma x`` is small.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from . import core, specfun
from .core import BGParams
from .errors import DomainError
from .submodels import BG, FAMILIES, PARAM_ORDER, ModelFamily, ModelSpec, get_family

log = logging.getLogger(__name__)

_IDX = {name: k for k, name in enumerate(PARAM_ORDER)}


@dataclass(frozen=True)
class Dataset:
    """Complete (uncensored) lifetimes, kept sorted with the input order."""

    values: np.ndarray
    original: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values):
        arr = np.asarray(values, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DomainError("dataset is empty")
        if not np.all(np.isfinite(arr)):
            raise DomainError("dataset contains non-finite values")
        if np.any(arr <= 0):
            raise DomainError("lifetimes must be strictly positive")
        return cls(np.sort(arr), arr.copy())

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.values.size


def _values(d):
    if isinstance(d, Dataset):
        return d.values
    arr = np.asarray(d, dtype=float).reshape(-1)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("data must be finite and >= 0")
    return arr


# ---------------------------------------------------------------------------
# likelihood kernel

_SMALL_U = 0.25
_NTERMS = 13
_FACTS = [math.factorial(k) for k in range(_NTERMS + 4)]
# Taylor coefficients of e(u) = expm1(u)/u and its first two derivatives
_C0 = [1.0 / _FACTS[k + 1] for k in range(_NTERMS)]
_C1 = [(k + 1) / _FACTS[k + 2] for k in range(_NTERMS)]
_C2 = [(k + 1) * (k + 2) / _FACTS[k + 3] for k in range(_NTERMS)]


def _horner(coefs, u):
    acc = np.full_like(u, coefs[-1])
    for c in coefs[-2::-1]:
        acc = acc * u + c
    return acc


def _expm1_ratio_derivs(u, second=True):
    """``e(u) = expm1(u)/u`` and its first (and optionally second) derivative."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SMALL_U
    ul = np.where(small, 1.0, u)
    with np.errstate(over="ignore", invalid="ignore"):
        ex = np.exp(ul)
        em = np.expm1(ul)
        e0 = em / ul
        e1 = (ul * ex - em) / ul ** 2
        e2 = (ul * ul * ex - 2 * ul * ex + 2 * em) / ul ** 3 if second else None
    if small.any():
        us = u[small]
        e0[small] = _horner(_C0, us)
        e1[small] = _horner(_C1, us)
        if second:
            e2[small] = _horner(_C2, us)
    return e0, e1, e2


def _kernel(x, theta, gamma, alpha, beta, order=1):
    """Log-likelihood and derivatives in ``PARAM_ORDER``.

    ``gamma=None`` selects the exponential-limit families. Returns
    ``(ll, grad)`` for ``order=1`` and ``(ll, grad, hess)`` for ``order=2``;
    the gamma row/column is zero on the limit families.
    """
    n = x.size
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if gamma is None:
            e0, e1, e2 = x, np.zeros_like(x), np.zeros_like(x)
            slope = 0.0
        else:
            u = gamma * x
            r0, r1, r2 = _expm1_ratio_derivs(u, second=order > 1)
            e0, e1 = x * r0, x * x * r1
            e2 = x ** 3 * r2 if order > 1 else None
            slope = gamma * x.sum()
        h = theta * e0
        log_g = np.log(-np.expm1(-h))
        w = 1.0 / np.expm1(h)
        ll = (n * math.log(theta) + slope - beta * h.sum()
              - n * special.betaln(alpha, beta))
        if alpha != 1.0:
            ll += (alpha - 1.0) * log_g.sum()
        dl_dh = -beta + (alpha - 1.0) * w
        psi_ab = special.digamma(alpha + beta)
        grad = np.zeros(4)
        grad[0] = n * (psi_ab - special.digamma(alpha)) + log_g.sum()
        grad[1] = n * (psi_ab - special.digamma(beta)) - h.sum()
        grad[2] = n / theta + np.sum(dl_dh * e0)
        if gamma is not None:
            grad[3] = x.sum() + theta * np.sum(dl_dh * e1)
        if order == 1:
            return ll, grad
        d2l_dh2 = -(alpha - 1.0) * w * (1.0 + w)
        tri_ab = special.polygamma(1, alpha + beta)
        hess = np.zeros((4, 4))
        hess[0, 0] = n * (tri_ab - special.polygamma(1, alpha))
        hess[1, 1] = n * (tri_ab - special.polygamma(1, beta))
        hess[0, 1] = n * tri_ab
        hess[0, 2] = np.sum(w * e0)
        hess[1, 2] = -e0.sum()
        hess[2, 2] = -n / theta ** 2 + np.sum(d2l_dh2 * e0 * e0)
        if gamma is not None:
            hess[0, 3] = theta * np.sum(w * e1)
            hess[1, 3] = -theta * e1.sum()
            hess[2, 3] = np.sum(d2l_dh2 * e0 * theta * e1 + dl_dh * e1)
            hess[3, 3] = np.sum(d2l_dh2 * (theta * e1) ** 2 + dl_dh * theta * e2)
        hess = np.triu(hess) + np.triu(hess, 1).T
    return ll, grad, hess


def log_likelihood(d, p: BGParams):
    """``sum_i ln f(x_i)`` from the density directly.

    Zero observations follow the density's limits at the origin, so the
    result is ``-inf`` if any ``x_i = 0`` while alpha > 1.
    """
    return float(np.sum(core.log_pdf(_values(d), p)))


def family_log_likelihood(d, m: ModelSpec):
    from .submodels import family_log_pdf

    return float(np.sum(family_log_pdf(_values(d), m)))


def _interior(d, p):
    x = _values(d)
    if np.any(x <= 0):
        raise DomainError("score and information need strictly positive data")
    return x


def score(d, p: BGParams):
    """Gradient of the log-likelihood, ordered ``(alpha, beta, theta, gamma)``."""
    x = _interior(d, p)
    _, grad = _kernel(x, p.theta, p.gamma, p.alpha, p.beta)
    if not np.all(np.isfinite(grad)):
        raise DomainError("score is not finite at this parameter point")
    return grad


def observed_information(d, p: BGParams):
    """Negative Hessian of the log-likelihood, ordered ``(alpha, beta, theta, gamma)``."""
    x = _interior(d, p)
    _, _, hess = _kernel(x, p.theta, p.gamma, p.alpha, p.beta, order=2)
    if not np.all(np.isfinite(hess)):
        raise DomainError("observed information is not finite at this parameter point")
    return -hess


# ---------------------------------------------------------------------------
# fitting


@dataclass(frozen=True)
class FitOptions:
    """Controls for :func:`fit_mle`.

    ``max_starts`` caps the deterministic multistart grid; ``gtol`` is the
    sup-norm gradient target in log-parameter space. ``starts`` replaces the
    grid with explicit starting points (mappings from parameter name to
    value, original time scale), as in simulation studies that start each
    fit at the data-generating values.
    """

    max_starts: int = 36
    gtol: float = 1e-8
    maxiter: int = 500
    tie_tol: float = 1e-9
    polish: bool = True
    starts: tuple | None = None


@dataclass
class FitResult:
    family: ModelFamily
    estimate: dict
    loglik: float
    observed_info: np.ndarray
    std_errors: dict | None
    converged: bool
    n_restarts_used: int
    n: int
    grad_norm: float = float("nan")
    message: str = ""

    @property
    def k(self):
        return self.family.n_params

    def spec(self):
        return ModelSpec(self.family, self.estimate)

    def bg_params(self):
        """Exact BG embedding; :class:`DomainError` for the limit families."""
        if self.family.gamma_limit:
            raise DomainError(f"{self.family.tag} lies on the gamma -> 0 boundary of BG")
        full = self.spec().full()
        return BGParams(full["theta"], full["gamma"], full["alpha"], full["beta"])


def _full_point(family, params):
    q = {"alpha": 1.0, "beta": 1.0, "theta": None, "gamma": None}
    q.update(params)
    return q


def _family_kernel(x, family, values, order=1):
    q = _full_point(family, dict(zip(family.free_params, values)))
    out = _kernel(x, q["theta"], q["gamma"], q["alpha"], q["beta"], order=order)
    idx = [_IDX[k] for k in family.free_params]
    if order == 1:
        return out[0], out[1][idx]
    return out[0], out[1][idx], out[2][np.ix_(idx, idx)]


def _gompertz_seed(y):
    """Quartile-matched Gompertz ``(theta, gamma)`` for unit-mean data.

    For a Gompertz law the quartile ratio depends only on ``c = gamma/theta``;
    heavier-than-exponential samples fall back to an exponential seed.
    """
    q1, q2, q3 = np.quantile(y, [0.25, 0.5, 0.75])
    if q1 <= 0:
        q1 = max(np.min(y), 1e-3 * q2)
    r = q3 / q1
    lo, hi = math.log(4.0), math.log(4.0 / 3.0)

    def ratio(c):
        return math.log1p(c * lo) / math.log1p(c * hi)

    if not 1.0 < r < ratio(1e-8):
        return 1.0, 1.0
    c = optimize.brentq(lambda c: ratio(c) - r, 1e-8, 1e8)
    gamma = math.log1p(c * math.log(2.0)) / q2
    return gamma / c, gamma


def _start_grid(family, y, max_starts):
    theta0, gamma0 = _gompertz_seed(y)
    if family.gamma_limit:
        theta0 = 1.0
    scales = {"theta": [1.0, 0.5, 2.0], "gamma": [1.0, 0.5, 2.0]}
    # pairs of (theta, gamma) multipliers; the shapes get the full 3x3 grid
    tg_pairs = [(1.0, 1.0), (0.5, 0.5), (2.0, 2.0), (0.5, 2.0), (2.0, 0.5),
                (1.0, 0.5), (1.0, 2.0), (0.5, 1.0), (2.0, 1.0)]
    shape_grid = [0.3, 1.0, 3.0]
    free = family.free_params
    has_g = "gamma" in free
    tg = tg_pairs if has_g else [(m, 1.0) for m in scales["theta"]]
    shapes = [()]
    for name in ("alpha", "beta"):
        if name in free:
            shapes = [s + (v,) for s in shapes for v in shape_grid]
    starts = []
    # interleave so truncation keeps every shape combination
    for mt, mg in tg:
        for s in shapes:
            point = dict(zip([k for k in ("alpha", "beta") if k in free], s))
            point["theta"] = theta0 * mt
            if has_g:
                point["gamma"] = gamma0 * mg
            starts.append(np.array([point[k] for k in free]))
    return starts[:max_starts]


def _log_bounds(family, y):
    lo, hi = [], []
    for k in family.free_params:
        if k == "gamma":
            lo.append(math.log(1e-8))
            hi.append(math.log(600.0 / y.max()))
        elif k == "theta":
            lo.append(math.log(1e-12))
            hi.append(math.log(1e8))
        else:
            lo.append(math.log(1e-6))
            hi.append(math.log(1e6))
    return list(zip(lo, hi))


def _newton_polish(y, family, z, gtol, bounds, maxiter=50):
    """Damped Newton in log space using the exact Hessian.

    Stops without moving when a step would leave the search box.
    """
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    for _ in range(maxiter):
        p = np.exp(z)
        ll, g, h = _family_kernel(y, family, p, order=2)
        gz = g * p
        if np.max(np.abs(gz)) <= gtol:
            break
        hz = h * np.outer(p, p) + np.diag(gz)
        try:
            np.linalg.cholesky(-hz)
        except np.linalg.LinAlgError:
            break
        step = np.linalg.solve(-hz, gz)
        if np.any(z + step < lo) or np.any(z + step > hi):
            break
        t = 1.0
        while t > 1e-8:
            trial = z + t * step
            ll_t, _ = _family_kernel(y, family, np.exp(trial))
            if np.isfinite(ll_t) and ll_t >= ll - 1e-12 * abs(ll):
                z = trial
                break
            t *= 0.5
        else:
            break
    p = np.exp(z)
    ll, g = _family_kernel(y, family, p)
    return z, ll, np.max(np.abs(g * p))


def _single_start(y, family, start, bounds, opts):
    def fun(z):
        ll, g = _family_kernel(y, family, np.exp(z))
        if not np.isfinite(ll) or not np.all(np.isfinite(g)):
            return 1e300, np.zeros_like(z)
        return -ll, -g * np.exp(z)

    res = optimize.minimize(
        fun, np.log(start), jac=True, method="L-BFGS-B", bounds=bounds,
        options={"maxiter": opts.maxiter, "gtol": opts.gtol, "ftol": 1e-15},
    )
    return res.x, -res.fun


def fit_mle(d, family=BG, opts: FitOptions = FitOptions()):
    """Maximum likelihood fit of one family by multistart quasi-Newton.

    Parameters are optimized on the log scale after rescaling the data to
    unit mean; the best start (ties within ``opts.tie_tol`` go to the
    earliest) is polished with Newton steps and mapped back.
    """
    family = get_family(family)
    if not isinstance(d, Dataset):
        d = Dataset.from_values(d)
    if d.n < 5:
        raise DomainError("need at least 5 observations to fit")
    if np.ptp(d.values) == 0:
        raise DomainError("all observations are identical; likelihood is degenerate")
    scale = float(d.values.mean())
    y = d.values / scale
    bounds = _log_bounds(family, y)

    if family.tag == "E":
        best_z = np.array([0.0])  # unit-mean data: theta_hat = 1
        best_ll = _family_kernel(y, family, np.exp(best_z))[0]
        used = 1
    else:
        best_z, best_ll, used = None, -np.inf, 0
        if opts.starts is not None:
            grid = [np.array([st[k] * (scale if k in ("theta", "gamma") else 1.0)
                              for k in family.free_params]) for st in opts.starts]
        else:
            grid = _start_grid(family, y, opts.max_starts)
        for start in grid:
            used += 1
            try:
                z, ll = _single_start(y, family, start, bounds, opts)
            except (FloatingPointError, ValueError, np.linalg.LinAlgError) as exc:
                log.debug("start %s failed: %s", start, exc)
                continue
            if np.isfinite(ll) and ll > best_ll + opts.tie_tol:
                best_z, best_ll = z, ll
    if best_z is None:
        return FitResult(family, {}, -np.inf, np.full((0, 0), np.nan), None,
                         False, used, d.n, message="all starts failed")

    if opts.polish:
        best_z, best_ll, gnorm = _newton_polish(y, family, best_z, opts.gtol, bounds)
    else:
        p = np.exp(best_z)
        gnorm = float(np.max(np.abs(_family_kernel(y, family, p)[1] * p)))

    # back to the original time scale: theta and gamma are rates
    est_scaled = dict(zip(family.free_params, np.exp(best_z)))
    estimate = {k: (v / scale if k in ("theta", "gamma") else v) for k, v in est_scaled.items()}
    estimate = {k: float(v) for k, v in estimate.items()}
    ll_orig, _, hess = _family_kernel(d.values, family,
                                      np.array([estimate[k] for k in family.free_params]),
                                      order=2)
    info = -hess
    at_bound = any(
        abs(zk - lo) < 1e-6 or abs(zk - hi) < 1e-6 for zk, (lo, hi) in zip(best_z, bounds)
    )
    converged = bool(gnorm <= max(opts.gtol, 1e-6 * d.n) and not at_bound)
    msg = "" if converged else ("estimate on search bound" if at_bound else
                               f"gradient sup-norm {gnorm:.2e} above tolerance")
    result = FitResult(family, estimate, float(ll_orig), info, None, converged,
                       used, d.n, float(gnorm), msg)
    result.std_errors = std_errors(result)
    return result


def std_errors(f: FitResult):
    """Square roots of the diagonal of the inverse observed information.

    Returns ``None`` when the information is not positive definite.
    """
    info = np.asarray(f.observed_info, dtype=float)
    if info.size == 0 or not np.all(np.isfinite(info)):
        return None
    try:
        chol = np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return None
    inv_chol = np.linalg.solve(chol, np.eye(info.shape[0]))
    var = np.sum(inv_chol ** 2, axis=0)
    return {k: float(math.sqrt(v)) for k, v in zip(f.family.free_params, var)}


# ---------------------------------------------------------------------------
# goodness of fit and model comparison


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_pvalue: float
    aic: float
    aicc: float
    bic: float


def ks_test(d, cdf):
    """One-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    ``cdf`` is a callable on arrays; it is evaluated once per distinct
    observation.
    """
    x = np.sort(_values(d))
    n = x.size
    if n < 1:
        raise DomainError("empty sample")
    uniq, inverse = np.unique(x, return_inverse=True)
    f = np.asarray(cdf(uniq), dtype=float)[inverse]
    i = np.arange(1, n + 1)
    stat = float(max(np.max(i / n - f), np.max(f - (i - 1) / n), 0.0))
    return stat, specfun.kolmogorov_sf(math.sqrt(n) * stat) if stat > 0 else 1.0


def information_criteria(loglik, k, n):
    """``(AIC, AICc, BIC)`` for a model with ``k`` parameters and ``n`` points."""
    if n <= k + 1:
        raise DomainError("AICc needs n > k + 1")
    aic = -2.0 * loglik + 2.0 * k
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1)
    bic = -2.0 * loglik + k * math.log(n)
    return aic, aicc, bic


def gof_report(d, f: FitResult):
    m = f.spec()
    from .submodels import family_cdf

    stat, pval = ks_test(d, lambda x: family_cdf(x, m))
    aic, aicc, bic = information_criteria(f.loglik, f.k, f.n)
    return GofReport(stat, pval, aic, aicc, bic)


def lrt(nested: FitResult, full: FitResult):
    """Likelihood-ratio statistic, chi-square p-value and degrees of freedom.

    Boundary nulls (the ``gamma -> 0`` families) are referred to the same
    chi-square distribution; the statistic is then conservative in theory.
    """
    df = full.k - nested.k
    if df <= 0 or not set(nested.family.free_params) <= set(full.family.free_params):
        raise DomainError(f"{nested.family.tag} is not nested in {full.family.tag}")
    stat = 2.0 * (full.loglik - nested.loglik)
    if stat < -1e-6:
        raise DomainError(
            f"negative LRT statistic {stat:.3g}: the {full.family.tag} fit missed its optimum"
        )
    stat = max(stat, 0.0)
    return stat, float(specfun.chi2_sf(stat, df)), df


@dataclass
class ComparisonRow:
    fit: FitResult
    gof: GofReport | None
    lrt: tuple | None  # (stat, pvalue, df) against BG


def compare_families(d, families=tuple(FAMILIES), opts: FitOptions = FitOptions()):
    """Fit every family and assemble the model-comparison table (LRT vs BG)."""
    if not isinstance(d, Dataset):
        d = Dataset.from_values(d)
    fits = {}
    for tag in families:
        fam = get_family(tag)
        fits[fam.tag] = fit_mle(d, fam, opts)
    rows = {}
    full = fits.get("BG")
    for tag, f in fits.items():
        gof = gof_report(d, f) if f.estimate else None
        test = None
        if full is not None and tag != "BG" and f.estimate and full.estimate:
            try:
                test = lrt(f, full)
            except DomainError as exc:
                log.warning("LRT %s vs BG: %s", tag, exc)
        rows[tag] = ComparisonRow(f, gof, test)
    return rows
