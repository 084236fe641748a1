"""Pseudo-orbits along highways and the diffusion-time estimate.

A drift itinerary alternates bursts of at most N_ss truncated scattering
steps with rotor ("inner") legs that re-aim the torus angle, either back
onto the highway or into the admissible window of the branch-A map inside
a tangency band.  The total model time decomposes as

    T_d = N_s * T_h + floor(N_s / N_ss) * T_i,

with T_h the homoclinic travel time per scattering step and T_i the
ergodization time of the rotor, bounded through the Dirichlet box principle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .crests import critical_actions, tangency_points, alpha_max
from .errors import (
    BranchUnavailable,
    ConstantUndefined,
    DegenerateAction,
    NoCrossing,
    NotInDomain,
    ScatmapError,
    StalledProgress,
    TangencyPoint,
)
from .highways import Side, highway_psi, highway_theta
from .model import (
    TWO_PI,
    ModelParams,
    alpha,
    crest_coefficient,
    wrap_angle,
    wrap_signed,
)
from .scattering import (
    Branch,
    CrestBranch,
    ReducedPoint,
    grad_reduced_poincare,
    tau_star,
)

# inner legs cannot steer theta when the rotor barely turns
_FROZEN_ACTION = 1e-3
# fraction of an eps step below which a leg counts as stalled
_STALL_FRACTION = 1e-3

ALPHA_PRIME_BOUND = 1.465  # rounded bound on |alpha'|; enters the C constant


class Mechanism(Enum):
    SCATTERING = "scattering"
    INNER = "inner"


@dataclass(frozen=True)
class OrbitLeg:
    mechanism: Mechanism
    points: tuple[ReducedPoint, ...]
    model_time: float
    deviation_start: float
    deviation_end: float
    error_bound: float


@dataclass(frozen=True)
class PseudoOrbit:
    legs: tuple[OrbitLeg, ...]
    c: float
    a: float
    steps_per_burst: int

    @property
    def points(self) -> list[ReducedPoint]:
        out: list[ReducedPoint] = []
        for leg in self.legs:
            out.extend(leg.points if not out else leg.points[1:])
        return out

    @property
    def final_point(self) -> ReducedPoint:
        return self.legs[-1].points[-1]

    @property
    def total_model_time(self) -> float:
        return sum(leg.model_time for leg in self.legs)


@dataclass(frozen=True)
class DiffusionTimeEstimate:
    Ts: float
    Ns: int
    Nss: int
    Th: float
    Ti: float
    C: float
    Td: float
    delta: float
    asymptotic: float
    ratio: float
    inner_share: float


def inner_ergodization_time(I: float, eps: float, a: float) -> tuple[int, float]:
    """Smallest k with |2*pi*k*I - 2*pi*l| < eps^a, and T_i = 2*pi*k.

    The Dirichlet box principle guarantees k <= N = ceil(2*pi/eps^a - 1);
    a brute scan up to N realizes it.  Raises DegenerateAction when the
    rotor is too slow to return (|I| <= eps).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    tol = eps**a
    if tol >= TWO_PI:
        raise ValueError("eps^a must be below 2*pi")
    if abs(I) <= eps:
        raise DegenerateAction(f"|I| = {abs(I)!r} <= eps; rotor effectively frozen")
    n_max = math.ceil(TWO_PI / tol - 1.0)
    for k in range(1, n_max + 1):
        if abs(math.remainder(TWO_PI * k * I, TWO_PI)) < tol:
            return k, TWO_PI * k
    # unreachable for tol consistent with the box principle; keep a guard
    raise DegenerateAction(f"no return within N = {n_max} multiples")


def _dirichlet_base(I: float, tol: float) -> tuple[int, float]:
    """Smallest k <= N with the signed shift delta = 2*pi*k*I mod 2*pi, |delta| < tol."""
    n_max = math.ceil(TWO_PI / tol - 1.0)
    for k in range(1, n_max + 1):
        d = math.remainder(TWO_PI * k * I, TWO_PI)
        if abs(d) < tol:
            return k, d
    raise DegenerateAction(f"no Dirichlet return within N = {n_max}")


def _inner_retarget(I: float, theta: float, theta_target: float,
                    tol: float) -> tuple[float, float]:
    """Rotor time t = 2*pi*k*m landing theta within ~tol/2 of the target.

    Uses the ladder of multiples of the base Dirichlet return: each block of
    k rotor periods shifts theta by the base residue delta, so the circle is
    swept in |delta|-sized rungs.
    """
    k, delta = _dirichlet_base(I, tol)
    gap = wrap_signed(theta_target - theta)
    if delta == 0.0:
        # perfectly periodic rotor angle: theta unreachable, stay put
        return 0.0, theta
    m = round(gap / delta)
    if m <= 0:
        # sweep the other way around the circle
        m = round((gap + math.copysign(TWO_PI, delta)) / delta)
        m = max(m, 0)
    t = TWO_PI * k * m
    return t, wrap_angle(theta + m * delta)


@lru_cache(maxsize=128)
def _region_constants(params: ModelParams, I_lo: float, I_hi: float,
                      grid_n: int = 25) -> tuple[float, float]:
    """(L, K): max gradient norm and max Hessian norm over a phase-space grid."""
    h = 1e-5
    L = 0.0
    K = 0.0
    for I in np.linspace(I_lo, I_hi, grid_n):
        for theta in np.linspace(0.0, TWO_PI, grid_n, endpoint=False):
            try:
                gi, gt = grad_reduced_poincare(params, float(I), float(theta))
                gi_p, gt_p = grad_reduced_poincare(params, float(I) + h, float(theta))
                gi_m, gt_m = grad_reduced_poincare(params, float(I) - h, float(theta))
                gi_tp, gt_tp = grad_reduced_poincare(params, float(I), float(theta) + h)
                gi_tm, gt_tm = grad_reduced_poincare(params, float(I), float(theta) - h)
            except ScatmapError:
                continue
            L = max(L, math.hypot(gi, gt))
            hess = np.array([
                [(gi_p - gi_m) / (2 * h), (gi_tp - gi_tm) / (2 * h)],
                [(gt_p - gt_m) / (2 * h), (gt_tp - gt_tm) / (2 * h)],
            ])
            K = max(K, float(np.linalg.norm(hess, 2)))
    return L, K


def propagated_error_bound(params: ModelParams, n: int, dev: float,
                           region: tuple[float, float], K2: float = 1.0) -> float:
    """Worst-case drift of n truncated steps from the reduced flow.

        n*eps^2*K2 + (L*eps/2)*((1 + eps*K)^n - 1) + dev*exp(K*eps*n)

    with L, K grid maxima of the gradient and of the variational (Hessian)
    norm over the region.  K2 is the unknown second-order remainder constant
    of the map itself, configurable, default 1.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    eps = params.eps
    L, K = _region_constants(params, float(min(region)), float(max(region)))
    euler = 0.5 * L * eps * ((1.0 + eps * K) ** n - 1.0)
    return n * eps * eps * K2 + euler + dev * math.exp(K * eps * n)


def _lane_theta(params: ModelParams, I: float, side: Side) -> float:
    return highway_theta(params, I, highway_psi(params, I, side))


def _deviation(params: ModelParams, pt: ReducedPoint, side: Side) -> float:
    try:
        return abs(wrap_signed(pt.theta - _lane_theta(params, pt.I, side)))
    except NotInDomain:
        return math.nan


def _homoclinic_time(params: ModelParams, I_star: float) -> float:
    try:
        return time_Th(params, max(abs(I_star), 1e-6))[0]
    except (ConstantUndefined, ValueError):  # undefined constant or eps = 0
        return math.nan


class _OrbitBuilder:
    def __init__(self, params: ModelParams, side: Side, c: float, a: float,
                 region: tuple[float, float]):
        if not (0.0 < a < c < 1.0):
            raise ValueError("exponents must satisfy 0 < a < c < 1")
        self.params = params
        self.side = side
        self.c = c
        self.a = a
        self.eps = params.eps
        self.nss = max(1, math.ceil(self.eps ** (-c))) if self.eps > 0 else 1
        self.tol_land = self.eps**a if self.eps > 0 else math.inf
        self.legs: list[OrbitLeg] = []
        self.region = region
        self.th_per_step = _homoclinic_time(params, max(abs(region[0]), abs(region[1])))

    def scattering_leg(self, pt: ReducedPoint, branch: Branch,
                       stop_I: float) -> ReducedPoint:
        dev0 = _deviation(self.params, pt, self.side)
        points = [pt]
        for _ in range(self.nss):
            try:
                d_i, d_theta = grad_reduced_poincare(
                    self.params, pt.I, pt.theta, CrestBranch.MAXIMUM, branch)
            except (TangencyPoint, NoCrossing, BranchUnavailable):
                break
            if d_theta <= 0.0:
                break  # the branch would move I the wrong way; re-aim first
            pt = ReducedPoint(I=pt.I + self.eps * d_theta,
                              theta=wrap_angle(pt.theta - self.eps * d_i))
            points.append(pt)
            if pt.I >= stop_I:
                break
        n = len(points) - 1
        dev1 = _deviation(self.params, pt, self.side)
        bound = propagated_error_bound(
            self.params, n, dev0 if math.isfinite(dev0) else self.tol_land,
            self.region) if self.eps > 0 else math.inf
        self.legs.append(OrbitLeg(
            mechanism=Mechanism.SCATTERING, points=tuple(points),
            model_time=n * self.th_per_step,
            deviation_start=dev0, deviation_end=dev1, error_bound=bound))
        return pt

    def inner_leg(self, pt: ReducedPoint, theta_target: float) -> ReducedPoint:
        dev0 = _deviation(self.params, pt, self.side)
        if abs(pt.I) <= max(self.eps, _FROZEN_ACTION):
            return pt  # rotor frozen near I = 0; the lane is crossed continuously
        t, theta_new = _inner_retarget(pt.I, pt.theta, theta_target, self.tol_land)
        new = ReducedPoint(I=pt.I, theta=theta_new)
        self.legs.append(OrbitLeg(
            mechanism=Mechanism.INNER, points=(pt, new), model_time=t,
            deviation_start=dev0,
            deviation_end=_deviation(self.params, new, self.side),
            error_bound=self.tol_land))
        return new

    def build(self) -> PseudoOrbit:
        return PseudoOrbit(legs=tuple(self.legs), c=self.c, a=self.a,
                           steps_per_burst=self.nss)


def _check_lane_interval(params: ModelParams, lo: float, hi: float):
    i_plus, i_plusplus = critical_actions(params)
    if i_plus is None:
        return
    for band in ((i_plus, i_plusplus), (-i_plusplus, -i_plus)):
        if hi > band[0] and lo < band[1]:
            raise NotInDomain(
                f"[{lo!r}, {hi!r}] crosses the highway breakage band "
                f"[{band[0]!r}, {band[1]!r}]"
            )


def build_pseudo_orbit_highway(params: ModelParams, I_start: float, I_end: float,
                               side: Side = Side.RIGHT, c: float = 0.5,
                               a: float = 0.25) -> PseudoOrbit:
    """Drift itinerary hugging one highway lane from I_start up to I_end.

    Alternates bursts of at most ceil(eps^-c) truncated scattering steps with
    rotor legs that land theta back within eps^a of the lane.  Raises
    StalledProgress when a burst advances I by less than eps*1e-3 (always the
    case at eps = 0) and NotInDomain when the interval touches breakage.
    """
    if I_end <= I_start:
        raise ValueError("I_end must exceed I_start (drift increases I)")
    _check_lane_interval(params, I_start, I_end)
    builder = _OrbitBuilder(params, side, c, a, (I_start, I_end))
    pt = ReducedPoint(I=I_start, theta=_lane_theta(params, I_start, side))
    guard = 0
    while pt.I < I_end:
        before = pt.I
        pt = builder.scattering_leg(pt, Branch.SINGLE, I_end)
        if pt.I - before <= params.eps * _STALL_FRACTION:
            raise StalledProgress(
                f"burst advanced I by {pt.I - before!r} at I = {pt.I!r}"
            )
        if pt.I >= I_end:
            break
        pt = builder.inner_leg(pt, _lane_theta(params, pt.I, side))
        guard += 1
        if guard > 200_000:
            raise StalledProgress("leg budget exhausted")
    return builder.build()


def _admissible_window(params: ModelParams, I: float) -> tuple[float, float]:
    """theta-window where branch-A stepping increases I, at action I.

    Inside a tangency band this is (theta2, 2*pi); where the crest turns
    vertical the window is found by sampling which torus lines still cross.
    """
    info = tangency_points(params, I)
    if info is not None:
        return wrap_angle(info.theta2), TWO_PI
    # vertical crest ("holes"): sample admissible theta near the top arc
    good: list[float] = []
    for theta in np.linspace(math.pi, TWO_PI, 257):
        try:
            ts = tau_star(params, I, float(theta))
        except ScatmapError:
            continue
        if math.pi < ts.psi < TWO_PI:
            good.append(float(theta))
    if not good:
        raise BranchUnavailable(f"no admissible torus line found at I = {I!r}")
    return min(good), max(good)


def build_pseudo_orbit_general(params: ModelParams, I_star: float,
                               c: float = 0.5, a: float = 0.25) -> PseudoOrbit:
    """Drift itinerary from -I_star to I_star valid in every crossing regime.

    Where the highway exists the itinerary follows it; across breakage bands
    it switches to the branch-A map on the theta-window where the action
    still climbs, using rotor legs to re-enter that window.
    """
    if I_star <= 0.0:
        raise ValueError("I_star must be positive")
    i_plus, _ = critical_actions(params)
    if i_plus is None:
        return build_pseudo_orbit_highway(params, -I_star, I_star,
                                          Side.RIGHT if params.a10 > 0 else Side.LEFT,
                                          c, a)
    side = Side.RIGHT if params.a10 > 0 else Side.LEFT
    builder = _OrbitBuilder(params, side, c, a, (-I_star, I_star))

    def in_band(I: float) -> bool:
        return tangency_points(params, I) is not None or \
            abs(crest_coefficient(params, I)) >= 1.0 - 1e-12

    if in_band(-I_star):
        lo, hi = _admissible_window(params, -I_star)
        pt = ReducedPoint(I=-I_star, theta=0.5 * (lo + hi))
    else:
        pt = ReducedPoint(I=-I_star, theta=_lane_theta(params, -I_star, side))

    guard = 0
    while pt.I < I_star:
        before = pt.I
        banded = in_band(pt.I)
        branch = Branch.A if banded else Branch.SINGLE
        pt = builder.scattering_leg(pt, branch, I_star)
        if pt.I >= I_star:
            break
        if pt.I - before <= params.eps * _STALL_FRACTION:
            raise StalledProgress(
                f"burst advanced I by {pt.I - before!r} at I = {pt.I!r}"
            )
        if in_band(pt.I):
            lo, hi = _admissible_window(params, pt.I)
            pt = builder.inner_leg(pt, 0.5 * (lo + hi))
        else:
            pt = builder.inner_leg(pt, _lane_theta(params, pt.I, side))
        guard += 1
        if guard > 200_000:
            raise StalledProgress("leg budget exhausted")
    return builder.build()


def shi(x: float) -> float:
    """Hyperbolic sine integral: odd primitive of sinh(t)/t from 0 to x.

    Power series below |x| = 2, adaptive quadrature beyond.
    """
    ax = abs(x)
    if ax == 0.0:
        return 0.0
    if ax < 2.0:
        term = ax
        total = ax
        k = 0
        while True:
            k += 1
            term *= ax * ax / ((2 * k) * (2 * k + 1))
            total += term / (2 * k + 1)
            if term < 1e-18 * total:
                break
        return math.copysign(total, x)
    val, _ = quad(lambda t: math.sinh(t) / t if t != 0.0 else 1.0, 0.0, ax,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return math.copysign(val, x)


def _ts_integrand(params: ModelParams, I: float, side: Side) -> float:
    a = abs(I)
    if a < 1e-9:
        sin_psi = -1.0 if side is Side.RIGHT else 1.0
        return -0.5 * math.pi / (TWO_PI * params.a10 * sin_psi)
    psi = highway_psi(params, a, side)
    return -math.sinh(math.pi * a / 2.0) / (TWO_PI * params.a10 * a * math.sin(psi))


def time_Ts(params: ModelParams, I0: float, If: float,
            side: Side = Side.RIGHT) -> float:
    """Scattering-flow time along the lane from I0 to If (tolerance 1e-9).

        integral of -sinh(pi I/2) / (2 pi a10 I sin(psi_h(I))) dI

    The integrand is even in I, so symmetric intervals double the half-range
    value.  Requires [I0, If] inside the highway domain.
    """
    _check_lane_interval(params, min(I0, If), max(I0, If))
    f = lambda I: _ts_integrand(params, float(I), side)
    pts = [0.0] if I0 < 0.0 < If else None
    val, _ = quad(f, I0, If, points=pts, limit=300, epsabs=1e-10, epsrel=1e-10)
    return val


def time_Th(params: ModelParams, I_star: float) -> tuple[float, float, float]:
    """Homoclinic travel time per scattering step: (T_h, delta, C).

    C = 16|a10| (1 + 1.465 / sqrt(1 - mu^2 A^2)) with A the max of alpha on
    [0, I_star]; delta = 4*sqrt(2)*eps/C; T_h = 2*log(C/eps).
    """
    if params.eps <= 0.0:
        raise ValueError("eps must be positive for a finite travel time")
    i_alpha, a_max = alpha_max()
    A = a_max if I_star >= i_alpha else alpha(I_star)
    m2a2 = (params.mu * A) ** 2
    if m2a2 >= 1.0:
        raise ConstantUndefined(
            f"mu^2 A^2 = {m2a2!r} >= 1; travel-time constant undefined"
        )
    C = 16.0 * abs(params.a10) * (1.0 + ALPHA_PRIME_BOUND / math.sqrt(1.0 - m2a2))
    delta = 4.0 * math.sqrt(2.0) * params.eps / C
    return 2.0 * math.log(C / params.eps), delta, C


def diffusion_time(params: ModelParams, I_star: float, c: float = 0.5,
                   a: float = 0.25) -> DiffusionTimeEstimate:
    """Assemble the total drift-time estimate over [-I_star, I_star].

    Uses the ergodization-time bound 2*pi*ceil(2*pi/eps^a - 1) for T_i and
    reports the asymptotic form (Ts/eps) * 2*log(C/eps) plus the ratio of
    the full estimate to it.
    """
    if not (0.0 < a < c < 1.0):
        raise ValueError("exponents must satisfy 0 < a < c < 1")
    if params.eps <= 0.0:
        raise ValueError("eps must be positive")
    eps = params.eps
    ts = time_Ts(params, -I_star, I_star,
                 Side.RIGHT if params.a10 > 0 else Side.LEFT)
    th, delta, C = time_Th(params, I_star)
    ns = round(ts / eps)
    nss = math.ceil(eps ** (-c))
    ti = TWO_PI * math.ceil(TWO_PI / eps**a - 1.0)
    td = ns * th + (ns // nss) * ti
    asym = (ts / eps) * 2.0 * math.log(C / eps)
    return DiffusionTimeEstimate(
        Ts=ts, Ns=ns, Nss=nss, Th=th, Ti=ti, C=C, Td=td, delta=delta,
        asymptotic=asym, ratio=td / asym,
        inner_share=(ns // nss) * ti / td,
    )
