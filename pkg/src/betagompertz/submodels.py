"""The nested sub-families of the beta-Gompertz model.

=====  ========================  ===================================
tag    free parameters           relation to BG(theta, gamma, alpha, beta)
=====  ========================  ===================================
E      theta                     alpha = beta = 1, gamma -> 0
GE     alpha, theta              beta = 1, gamma -> 0
BE     alpha, beta, theta        gamma -> 0
G      theta, gamma              alpha = beta = 1
GG     alpha, theta, gamma       beta = 1
BG     alpha, beta, theta, gamma
=====  ========================  ===================================

The ``gamma -> 0`` families are limits, not members, of the BG
parameterization; they get their own closed forms with ``H(x) = theta x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy import special

from . import core, specfun
from .core import BGParams
from .errors import DomainError

PARAM_ORDER = ("alpha", "beta", "theta", "gamma")


@dataclass(frozen=True)
class ModelFamily:
    tag: str
    free_params: tuple
    gamma_limit: bool

    @property
    def n_params(self):
        return len(self.free_params)

    @property
    def fixed(self):
        """Shape parameters pinned at 1 for this family."""
        return {k: 1.0 for k in ("alpha", "beta") if k not in self.free_params}

    def __str__(self):
        return self.tag


E = ModelFamily("E", ("theta",), True)
GE = ModelFamily("GE", ("alpha", "theta"), True)
BE = ModelFamily("BE", ("alpha", "beta", "theta"), True)
G = ModelFamily("G", ("theta", "gamma"), False)
GG = ModelFamily("GG", ("alpha", "theta", "gamma"), False)
BG = ModelFamily("BG", ("alpha", "beta", "theta", "gamma"), False)

FAMILIES = MappingProxyType({f.tag: f for f in (E, GE, BE, G, GG, BG)})


def get_family(tag):
    if isinstance(tag, ModelFamily):
        return tag
    try:
        return FAMILIES[str(tag).upper()]
    except KeyError:
        raise DomainError(f"unknown family {tag!r}; expected one of {list(FAMILIES)}") from None


@dataclass(frozen=True)
class ModelSpec:
    family: ModelFamily
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        fam = get_family(self.family)
        object.__setattr__(self, "family", fam)
        missing = [k for k in fam.free_params if k not in self.params]
        extra = [k for k in self.params if k not in fam.free_params]
        if missing or extra:
            raise DomainError(
                f"{fam.tag} takes parameters {fam.free_params}; "
                f"missing {missing}, unexpected {extra}"
            )
        clean = {}
        for k in fam.free_params:
            v = float(self.params[k])
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{k} must be finite and > 0, got {v}")
            clean[k] = v
        object.__setattr__(self, "params", MappingProxyType(clean))

    def full(self):
        """All four coordinates with fixed shapes filled in; ``gamma`` is
        ``None`` for the limit families."""
        out = {"alpha": 1.0, "beta": 1.0, "gamma": None}
        out.update(self.params)
        return out


@dataclass(frozen=True)
class LimitDescriptor:
    """Stand-in for a family that sits on the ``gamma -> 0`` boundary of BG."""

    family: ModelFamily
    fixed: dict
    limit: str = "gamma -> 0"

    @property
    def df_from_bg(self):
        return BG.n_params - self.family.n_params


def embed_in_bg(m: ModelSpec):
    """Exact :class:`BGParams` for G/GG/BG, a :class:`LimitDescriptor` otherwise."""
    if m.family.gamma_limit:
        return LimitDescriptor(m.family, dict(m.family.fixed))
    q = m.full()
    return BGParams(q["theta"], q["gamma"], q["alpha"], q["beta"])


def _hazard(x, q):
    if q["gamma"] is None:
        return q["theta"] * x
    return q["theta"] * np.expm1(q["gamma"] * x) / q["gamma"]


def family_log_pdf(x, m: ModelSpec):
    """Closed-form log density for any of the six families."""
    arr, scalar = core._support(x)
    q = m.full()
    a, b, th = q["alpha"], q["beta"], q["theta"]
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        h = _hazard(arr, q)
        slope = 0.0 if q["gamma"] is None else q["gamma"] * arr
        out = np.log(th) + slope - b * h - special.betaln(a, b)
        if a != 1.0:
            out = out + (a - 1.0) * np.log(-np.expm1(-h))
        out = np.where(np.isnan(out) & np.isinf(h), -np.inf, out)
    return core._ret(out, scalar)


def family_cdf(x, m: ModelSpec):
    arr, scalar = core._support(x)
    q = m.full()
    with np.errstate(over="ignore"):
        h = _hazard(arr, q)
    return core._ret(core._cdf_from_hazard(h, q["alpha"], q["beta"]), scalar)


def family_sf(x, m: ModelSpec):
    arr, scalar = core._support(x)
    q = m.full()
    with np.errstate(over="ignore"):
        s = np.exp(-_hazard(arr, q))
    return core._ret(special.betainc(q["beta"], q["alpha"], s), scalar)


def family_quantile(u, m: ModelSpec):
    arr = np.asarray(u, dtype=float)
    if np.any((arr <= 0) | (arr >= 1)):
        raise DomainError("u must lie in (0, 1)")
    q = m.full()
    if q["gamma"] is not None:
        return core.quantile(u, embed_in_bg(m))
    # gamma -> 0 limit of the BG quantile: -ln(1 - Q_beta(u)) / theta
    a, b = q["alpha"], q["beta"]
    upper = arr > 0.5
    with np.errstate(divide="ignore"):
        lower = -np.log1p(-specfun.inv_reg_inc_beta(np.where(upper, 0.5, arr), a, b))
        w = specfun.inv_reg_inc_beta(np.where(upper, 1 - arr, 0.5), b, a)
        out = np.where(upper, -np.log(w), lower) / q["theta"]
    return core._ret(out, arr.ndim == 0)
