"""Literal transcriptions of published series and likelihood formulas, and a
report comparing them with the numerically verified paths of this package.

Nothing here is used by the rest of the library. Each function evaluates a
formula exactly as it is commonly printed, including its defects, so that the
size of the disagreement can be measured and recorded:

* ``moment_series``: the GG-mixture moment series. Its exponent uses an index
  that is never bound; ``exponent_index`` selects the reading (``"k"`` binds
  it to the moment order; ``"swapped"`` uses ``[-1/(gamma(r+1))]^(k+1)``,
  which is what a term-by-term derivation produces).
* ``mgf_series``: the GG-mixture mgf series. The inner ``k`` sum terminates
  when ``t/gamma`` is a non-negative integer and is only asymptotic
  otherwise, so it is truncated at its smallest term.
* ``renyi_series``: the closed Renyi series, optionally with a ``j = 0`` term.
* ``printed_log_likelihood`` / ``printed_score`` / ``printed_information``:
  the likelihood, score and observed information in the ``t_i = e^{-(e^{gamma
  x}-1)/gamma}`` notation.
* ``order_stat_moment_series``: the triple series for order-statistic moments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from . import analytic, core, inference
from .core import BGParams
from .errors import ConvergenceError, DomainError

__all__ = [
    "SeriesDiagnostic", "moment_series", "mgf_series", "renyi_series",
    "printed_log_likelihood", "printed_score", "printed_information",
    "order_stat_moment_series", "DEFAULT_CASES", "run_report", "format_report",
]


@dataclass
class SeriesDiagnostic:
    name: str
    params: tuple
    args: dict
    series: float
    oracle: float
    terms: int
    note: str = ""

    @property
    def abs_diff(self):
        return abs(self.series - self.oracle)

    @property
    def rel_diff(self):
        return self.abs_diff / abs(self.oracle) if self.oracle else math.inf

    def as_dict(self):
        d = asdict(self)
        d.update(abs_diff=self.abs_diff, rel_diff=self.rel_diff)
        return d


def _gbinom(a, k):
    return float(special.binom(a, k))


# ---------------------------------------------------------------------------
# GG-mixture series for moments and the mgf


def _gg_moment_series(k, a, theta, gamma, exponent_index, n_i, n_r):
    u = a * theta * math.gamma(k + 1)
    total = []
    for i in range(n_i):
        c = theta / gamma * (i + 1)
        ci = _gbinom(a - 1, i)
        if ci == 0.0:
            continue
        inner = []
        for r in range(n_r):
            if exponent_index == "k":
                tail = (-1.0 / (gamma * (k + 1))) ** (k + 1)
            else:
                tail = (-1.0 / (gamma * (r + 1))) ** (k + 1)
            inner.append((-1.0) ** (i + r) / math.gamma(r + 1) * c ** r * tail)
        total.append(ci * math.exp(c) * math.fsum(inner))
    return u * math.fsum(total)


def moment_series(k, p: BGParams, exponent_index="k", n_j=40, n_i=40, n_r=80):
    """``sum_j p_j E[X_j^k]`` with the printed GG moment series for each ``j``."""
    if exponent_index not in ("k", "swapped"):
        raise DomainError("exponent_index must be 'k' or 'swapped'")
    pj, _ = analytic._p_weights(p.alpha, p.beta, n_j)
    vals = []
    with np.errstate(over="ignore"):
        for j in range(n_j):
            if pj[j] == 0.0:
                continue
            try:
                vals.append(pj[j] * _gg_moment_series(
                    k, p.alpha + j, p.theta, p.gamma, exponent_index, n_i, n_r))
            except OverflowError:
                return math.inf
    return math.fsum(vals)


def _gg_mgf_series(t, a, theta, gamma, n_i, n_k):
    ratio = t / gamma
    terminating = ratio >= 0 and float(ratio).is_integer()
    outer = []
    for i in range(n_i):
        ci = _gbinom(a - 1, i)
        if ci == 0.0:
            continue
        c = (i + 1) * theta / gamma
        terms = []
        for k in range(n_k):
            term = _gbinom(ratio, k) * math.gamma(k + 1) / c ** (k + 1)
            if terminating and term == 0.0 and k > ratio:
                break
            # asymptotic series: stop at the smallest term
            if not terminating and terms and abs(term) > abs(terms[-1]):
                break
            terms.append(term)
        outer.append((-1.0) ** i * ci * math.fsum(terms))
    return a * theta / gamma * math.fsum(outer)


def mgf_series(t, p: BGParams, n_j=40, n_i=400, n_k=60):
    """``sum_j p_j M_{X_j}(t)`` with the printed GG mgf series."""
    pj, _ = analytic._p_weights(p.alpha, p.beta, n_j)
    return math.fsum(
        pj[j] * _gg_mgf_series(t, p.alpha + j, p.theta, p.gamma, n_i, n_k)
        for j in range(n_j) if pj[j] != 0.0
    )


# ---------------------------------------------------------------------------
# Renyi series


def renyi_series(lam, p: BGParams, include_j0=False, n_j=60):
    """Closed Renyi-entropy series; ``include_j0`` adds the ``j = 0`` term.

    Returns ``nan`` when the truncated double sum is not positive (its
    logarithm is then undefined).
    """
    a, b, th, g = p.alpha, p.beta, p.theta, p.gamma
    inner = []
    for j in range(0 if include_j0 else 1, n_j):
        cj = _gbinom(lam - 1.0, j)
        if cj == 0.0:
            continue
        for k in range(j + 1):
            inner.append(
                (-1.0) ** k * cj * _gbinom(j, k) * (g / th) ** j * math.gamma(j + 1)
                / (j + 1.0) ** (k - 1.0 + (b - 1.0) * lam)
            )
    s = math.fsum(inner)
    second = (b - 1.0) * lam + 1.0
    if s <= 0 or second <= 0:
        return math.nan
    return (
        -math.log(th) + lam / (lam - 1.0) * special.betaln(a, b)
        + (special.betaln(a, second) + math.log(s)) / (1.0 - lam)
    )


# ---------------------------------------------------------------------------
# likelihood in the t_i notation


def _t_pieces(x, p):
    x = np.asarray(x, dtype=float)
    log_t = -np.expm1(p.gamma * x) / p.gamma
    t_th = np.exp(p.theta * log_t)
    d = (-log_t + p.gamma * x * log_t - x) / p.gamma
    q = d * (x - 2.0 / p.gamma) + x / p.gamma * log_t
    return x, log_t, t_th, d, q


def printed_log_likelihood(x, p: BGParams):
    x, log_t, t_th, _, _ = _t_pieces(x, p)
    n = len(x)
    return float(
        n * math.log(p.theta) - n * special.betaln(p.alpha, p.beta) + p.gamma * x.sum()
        - p.beta * p.theta * log_t.sum() + (p.alpha - 1.0) * np.log1p(-t_th).sum()
    )


def printed_score(x, p: BGParams):
    """Score in ``(alpha, beta, theta, gamma)`` order, as printed."""
    x, log_t, t_th, d, _ = _t_pieces(x, p)
    n = len(x)
    a, b, th = p.alpha, p.beta, p.theta
    r = t_th / (1.0 - t_th)
    return np.array([
        n * special.digamma(a + b) - n * special.digamma(a) + np.log1p(-t_th).sum(),
        n * special.digamma(a + b) - n * special.digamma(b) - th * log_t.sum(),
        n / th - b * log_t.sum() - (a - 1.0) * (r * log_t).sum(),
        x.sum() - b * th * d.sum() - th * (a - 1.0) * (d * r).sum(),
    ])


def printed_information(x, p: BGParams):
    """``J = -[second derivatives]`` with the printed entries."""
    x, log_t, t_th, d, q = _t_pieces(x, p)
    n = len(x)
    a, b, th = p.alpha, p.beta, p.theta
    r = t_th / (1.0 - t_th)
    tg = special.polygamma(1, a + b)
    h = np.empty((4, 4))
    h[0, 0] = n * tg - n * special.polygamma(1, a)
    h[0, 1] = n * tg
    h[0, 2] = (r * log_t).sum()
    h[0, 3] = -th * (d * r).sum()
    h[1, 1] = n * tg - n * special.polygamma(1, b)
    h[1, 2] = -log_t.sum()
    h[1, 3] = -th * d.sum()
    h[2, 2] = -n / th ** 2 + th * (a - 1.0) * (t_th * log_t ** 2 / (1.0 - t_th) ** 2).sum()
    h[2, 3] = -b * d.sum() - (a - 1.0) * (
        d * r * (th * log_t + 1.0 + th * r * log_t)).sum()
    h[3, 3] = (-b * th * q.sum() - th * (a - 1.0) * (r * (q + th * d ** 2)).sum()
               - th ** 2 * (a - 1.0) * (d ** 2 * t_th ** 2 / (1.0 - t_th)).sum())
    for i in range(4):
        for j in range(i):
            h[i, j] = h[j, i]
    return -h


# ---------------------------------------------------------------------------
# order statistics


def order_stat_moment_series(s, i, n, p: BGParams, n_r=30, n_i1=30, n_i2=60):
    """Triple series for ``E[X_{i:n}^s]`` through ``c_{i+m, r}`` and ``b_r``."""
    mix = analytic.mixture_weights(p.alpha, p.beta, max(n_r + 1, 2), b_terms=n_r + 1)
    c_all = analytic.power_series_pow(list(mix.b), n, n_r)
    th, g = p.theta, p.gamma
    outer = []
    for m in range(n - i + 1):
        c = c_all.row(i + m)
        for r in range(1, n_r + 1):
            inner = []
            for i1 in range(n_i1):
                w1 = _gbinom(r - 1, i1)
                if w1 == 0.0:
                    continue
                cc = th / g * (i1 + 1)
                for i2 in range(n_i2):
                    inner.append(
                        w1 * (-1.0) ** (i1 + i2) / math.gamma(i2 + 1) * math.exp(cc)
                        * cc ** i2 * (-1.0 / (g * (i2 + 1))) ** (s + 1)
                    )
            outer.append((-1.0) ** m / (m + i) * r * c[r] * th * math.gamma(s + 1)
                         * math.fsum(inner))
    return math.fsum(outer) / special.beta(i, n - i + 1)


# ---------------------------------------------------------------------------
# report

DEFAULT_CASES = (
    (1.0, 1.0, 1.0, 1.0),
    (0.5, 0.5, 0.5, 0.5),
    (2.0, 2.0, 0.5, 0.5),
    (0.5, 2.0, 1.0, 1.0),
    (2.0, 3.0, 0.5, 1.0),
    (0.2158, 0.2467, 0.000345, 0.0882),
)


def _safe(f):
    try:
        with np.errstate(all="ignore"):
            return float(f())
    except (OverflowError, ZeroDivisionError, ValueError, ConvergenceError):
        return math.nan


def run_report(cases=DEFAULT_CASES, seed=0):
    """Evaluate every literal formula against its oracle on ``cases`` of
    ``(alpha, beta, theta, gamma)``. Returns a list of :class:`SeriesDiagnostic`."""
    with warnings.catch_warnings():
        # truncation warnings are expected here; the report records the outcome
        warnings.simplefilter("ignore", RuntimeWarning)
        return _report_rows(cases, seed)


def _report_rows(cases, seed):
    out = []
    rng = np.random.default_rng(seed)
    for a, b, th, g in cases:
        p = BGParams(th, g, a, b)
        tup = (a, b, th, g)
        mean = _safe(lambda: analytic.moment(1, p))
        for mode in ("k", "swapped"):
            out.append(SeriesDiagnostic(
                "moment_series", tup, {"k": 1, "exponent_index": mode},
                _safe(lambda: moment_series(1, p, mode)), mean, 40,
            ))
        for t in (g, 0.5 * g):
            out.append(SeriesDiagnostic(
                "mgf_series", tup, {"t": t}, _safe(lambda: mgf_series(t, p)),
                _safe(lambda: analytic.mgf(t, p)), 40,
                "terminating in k" if float(t / g).is_integer() else "asymptotic in k",
            ))
        for lam in (0.5, 2.0):
            oracle = _safe(lambda: analytic.renyi_entropy(lam, p))
            for j0 in (False, True):
                out.append(SeriesDiagnostic(
                    "renyi_series", tup, {"lambda": lam, "include_j0": j0},
                    _safe(lambda: renyi_series(lam, p, j0)), oracle, 60,
                ))
        x = core.sample(30, p, rng)
        x = x[x > 0]
        out.append(SeriesDiagnostic(
            "printed_log_likelihood", tup, {"n": len(x)},
            _safe(lambda: printed_log_likelihood(x, p)),
            _safe(lambda: inference.log_likelihood(x, p)), len(x),
        ))
        ps = printed_score(x, p)
        ts = inference.score(x, p)
        out.append(SeriesDiagnostic(
            "printed_score", tup, {"n": len(x)},
            float(np.max(np.abs(ps - ts))), 0.0, len(x),
            "max |printed - verified| over components",
        ))
        pj = printed_information(x, p)
        tj = inference.observed_information(x, p)
        out.append(SeriesDiagnostic(
            "printed_information", tup, {"n": len(x)},
            float(np.max(np.abs(pj - tj))), 0.0, len(x),
            "max |printed - verified| over entries",
        ))
        out.append(SeriesDiagnostic(
            "order_stat_moment_series", tup, {"s": 1, "i": 2, "n": 3},
            _safe(lambda: order_stat_moment_series(1, 2, 3, p)),
            _safe(lambda: analytic.order_stat_moment(1, 2, 3, p)), 30,
        ))
    return out


def format_report(rows):
    lines = [
        "| formula | (alpha, beta, theta, gamma) | arguments | series | oracle | rel. diff | note |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in rows:
        args = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in r.args.items())
        rel = "n/a" if r.oracle == 0.0 else f"{r.rel_diff:.3g}"
        note = r.note
        if not math.isfinite(r.series):
            note = (note + "; " if note else "") + "series undefined or overflowed"
        lines.append(
            f"| {r.name} | {', '.join(f'{v:g}' for v in r.params)} | {args} | "
            f"{r.series:.10g} | {r.oracle:.10g} | {rel} | {note} |"
        )
    return "\n".join(lines)
