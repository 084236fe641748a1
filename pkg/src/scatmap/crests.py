"""Crest geometry: parameterizations, tangencies, critical actions, regimes.

Crests are the curves in the (phi, s) torus where the splitting potential is
critical along unperturbed torus lines.  Their shape at a given action I is
controlled by c = mu*alpha_signed(I): horizontal graphs over phi for |c| < 1,
vertical graphs over s for |c| > 1, singular at |c| = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError
from .model import (
    ModelParams,
    alpha,
    beta,
    crest_coefficient,
    wrap_angle,
)

SINGULAR_TOL = 1e-12


class CrestBranch(Enum):
    MAXIMUM = "max"
    MINIMUM = "min"


class Orientation(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    SINGULAR = "singular"


class Regime(Enum):
    SINGLE_MAP = "single"
    TANGENCY = "tangency"
    HOLES = "holes"


@dataclass(frozen=True)
class TangencyInfo:
    """Tangency data between torus lines and the maximum crest at action I.

    psi1 in (pi/2, pi] and psi2 = 2*pi - psi1 are the tangent crest angles;
    theta1 >= theta2 are the corresponding torus-line labels.
    """

    I: float
    psi1: float
    psi2: float
    theta1: float
    theta2: float


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    mu_low: float
    mu_high: float
    I_plus: float | None
    I_plusplus: float | None
    boundary: bool


@lru_cache(maxsize=1)
def alpha_max() -> tuple[float, float]:
    """(argmax, max) of alpha over I > 0, found by golden-section search."""
    res = minimize_scalar(
        lambda x: -alpha(x), bracket=(0.5, 1.2, 3.0), method="golden",
        options={"xtol": 1e-12},
    )
    return float(res.x), alpha(float(res.x))


@lru_cache(maxsize=1)
def beta_max() -> tuple[float, float]:
    """(argmax, max) of beta over I > 0."""
    res = minimize_scalar(
        lambda x: -beta(x), bracket=(1.0, 1.9, 4.0), method="golden",
        options={"xtol": 1e-12},
    )
    return float(res.x), beta(float(res.x))


def crest_orientation(params: ModelParams, I: float, tol: float = SINGULAR_TOL) -> Orientation:
    c = abs(crest_coefficient(params, I))
    if abs(c - 1.0) <= tol:
        return Orientation.SINGULAR
    return Orientation.HORIZONTAL if c < 1.0 else Orientation.VERTICAL


def xi(params: ModelParams, branch: CrestBranch, I: float, phi: float) -> float:
    """Horizontal crest parameterization s = xi(I, phi), reduced to [0, 2*pi).

    Raises DomainError when |mu*alpha(I)*sin(phi)| > 1, i.e. where the crest
    cannot be written as a graph over phi (the "holes" situation).
    """
    u = crest_coefficient(params, I) * math.sin(phi)
    if abs(u) > 1.0:
        raise DomainError(
            f"crest not horizontally parameterizable: |mu*alpha*sin(phi)| = {abs(u):.6g} > 1"
        )
    if branch is CrestBranch.MAXIMUM:
        return wrap_angle(-math.asin(u))
    return wrap_angle(math.asin(u) + math.pi)


def xi_max_raw(params: ModelParams, I: float, psi: float) -> float:
    """Maximum-crest value in (-pi/2, pi/2), unwrapped. Internal workhorse."""
    u = crest_coefficient(params, I) * math.sin(psi)
    if abs(u) > 1.0:
        raise DomainError("crest not horizontally parameterizable here")
    return -math.asin(u)


def eta(params: ModelParams, branch: CrestBranch, I: float, s: float) -> float:
    """Vertical crest parameterization phi = eta(I, s), reduced to [0, 2*pi)."""
    c = crest_coefficient(params, I)
    if c == 0.0:
        raise DomainError("vertical parameterization undefined at mu*alpha(I) = 0")
    u = math.sin(s) / c
    if abs(u) > 1.0:
        raise DomainError(
            f"crest not vertically parameterizable: |sin(s)/(mu*alpha)| = {abs(u):.6g} > 1"
        )
    if branch is CrestBranch.MAXIMUM:
        return wrap_angle(-math.asin(u))
    return wrap_angle(math.asin(u) + math.pi)


def crest_residual(params: ModelParams, I: float, phi: float, s: float) -> float:
    """mu*alpha_signed(I)*sin(phi) + sin(s); zero exactly on a crest."""
    return crest_coefficient(params, I) * math.sin(phi) + math.sin(s)


def dxi_max_dpsi(params: ModelParams, I: float, psi: float) -> float:
    """d xi_max / d psi; blows up nowhere while |mu*alpha(I)| < 1."""
    c = crest_coefficient(params, I)
    u = c * math.sin(psi)
    if abs(u) >= 1.0:
        raise DomainError("slope of horizontal parameterization undefined")
    return -c * math.cos(psi) / math.sqrt(1.0 - u * u)


def theta_of_psi(params: ModelParams, I: float, psi: float) -> float:
    """Torus-line label theta(psi) = psi - I*xi_max(I, psi), unwrapped."""
    return psi - I * xi_max_raw(params, I, psi)


def tangency_points(params: ModelParams, I: float) -> TangencyInfo | None:
    """Tangency angles between torus lines and the maximum crest at I.

    Exists iff |I|*|mu|*alpha(I) >= 1 while |mu|*alpha(I) <= 1.  Returns None
    outside that set (including the vertical-crest case).
    """
    a = abs(params.mu) * alpha(I)
    b = abs(I) * a
    if b < 1.0 or a > 1.0:
        return None
    if a >= 1.0 - 1e-15:
        return None  # singular crest; tangency angles degenerate to pi/2, 3pi/2
    r = math.sqrt((b * b - 1.0) / (1.0 - a * a))
    half = math.atan(r)
    psi1 = math.pi - half
    psi2 = math.pi + half
    theta1 = theta_of_psi(params, I, psi1)
    theta2 = theta_of_psi(params, I, psi2)
    return TangencyInfo(I=I, psi1=psi1, psi2=psi2, theta1=theta1, theta2=theta2)


def _root_scan(f, lo: float, hi: float, step: float, xtol: float = 1e-14) -> list[float]:
    """All simple roots of f on [lo, hi] by sign-change scan + brentq."""
    roots = []
    n = max(2, int(math.ceil((hi - lo) / step)))
    xs = [lo + (hi - lo) * k / n for k in range(n + 1)]
    fprev = f(xs[0])
    if fprev == 0.0:
        roots.append(xs[0])
    for x0, x1 in zip(xs, xs[1:]):
        fnext = f(x1)
        if fnext == 0.0:
            roots.append(x1)
        elif fprev * fnext < 0.0:
            roots.append(brentq(f, x0, x1, xtol=xtol))
        fprev = fnext
    return roots


def critical_actions(params: ModelParams) -> tuple[float | None, float | None]:
    """Critical actions (I_plus, I_plusplus) bounding highway breakage.

    (None, None) while |mu| < 1/max(beta).  Otherwise I_plus is the smallest
    positive root of beta(I) = 1/|mu| (for |mu| <= 1) or of alpha(I) = 1/|mu|
    (for |mu| >= 1), and I_plusplus the largest root of beta(I) = 1/|mu|.
    """
    am = abs(params.mu)
    _, bmax = beta_max()
    if am < 1.0 / bmax:
        return None, None
    target = 1.0 / am
    beta_roots = _root_scan(lambda x: beta(x) - target, 1e-6, 30.0, 1e-2)
    if am <= 1.0:
        i_plus = min(beta_roots) if beta_roots else None
    else:
        alpha_roots = _root_scan(lambda x: alpha(x) - target, 1e-6, 30.0, 1e-2)
        i_plus = min(alpha_roots) if alpha_roots else None
    i_plusplus = max(beta_roots) if beta_roots else None
    return i_plus, i_plusplus


def classify_regime(params: ModelParams) -> RegimeReport:
    """Place mu among the three crossing regimes.

    Thresholds are 1/max(beta) and 1/max(alpha), computed numerically rather
    than hardcoded; closed intervals are used at the boundaries and boundary
    values of |mu| are flagged.
    """
    am = abs(params.mu)
    mu_low = 1.0 / beta_max()[1]
    mu_high = 1.0 / alpha_max()[1]
    if am < mu_low:
        regime = Regime.SINGLE_MAP
    elif am <= mu_high:
        regime = Regime.TANGENCY
    else:
        regime = Regime.HOLES
    i_plus, i_plusplus = critical_actions(params)
    boundary = abs(am - mu_low) <= 1e-9 or abs(am - mu_high) <= 1e-9
    return RegimeReport(
        regime=regime,
        mu_low=mu_low,
        mu_high=mu_high,
        I_plus=i_plus,
        I_plusplus=i_plusplus,
        boundary=boundary,
    )
