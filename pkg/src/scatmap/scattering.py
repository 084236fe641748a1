"""Crossing times, reduced Poincare functions and the truncated scattering map.

A torus segment through (I, theta) is parameterized by the time-angle
sigma in (-pi/2, 3*pi/2]; it crosses the maximum crest where

    c(sigma) = mu*alpha_signed(I)*sin(theta + I*sigma) + sin(sigma) = 0

with cos(sigma) >= 0 (the minimum crest takes cos(sigma) <= 0).  The crossing
with smallest |tau| (tau = -sigma for the theta-anchored segment) defines the
primary map; inside a tangency band three crossings coexist and are told
apart by which psi-interval (branch A/B/C) they fall in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .crests import (
    CrestBranch,
    TangencyInfo,
    dxi_max_dpsi,
    tangency_points,
    theta_of_psi,
)
from .errors import (
    BranchUnavailable,
    DomainExit,
    NoCrossing,
    ScatmapError,
    SingularCrest,
    TangencyPoint,
)
from .model import (
    TWO_PI,
    ModelParams,
    amp_A00,
    amp_A01,
    amp_A10,
    amp_A10_deriv,
    crest_coefficient,
    wrap_angle,
)

# sigma sampling step for the crossing scan (half-window pi is split in 200)
_SCAN_STEP = math.pi / 200.0
# reject gradients closer to a tangency than this in |d theta / d psi|
_TANGENCY_GUARD = 1e-6


class Branch(Enum):
    SINGLE = "single"
    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class ReducedPoint:
    """(I, theta) point of the reduced scattering phase space."""

    I: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class TauStar:
    """A crest crossing: tau is the segment time, psi the crest angle."""

    tau: float
    psi: float
    sigma: float
    crest: CrestBranch
    branch: Branch


@dataclass(frozen=True)
class BranchSet:
    available: tuple[Branch, ...]
    domains: dict[Branch, tuple[tuple[float, float], ...]]
    tangency: TangencyInfo | None


def _sigma_window(crest: CrestBranch) -> tuple[float, float]:
    if crest is CrestBranch.MAXIMUM:
        return (-math.pi / 2.0, math.pi / 2.0)
    return (math.pi / 2.0, 3.0 * math.pi / 2.0)


def _crossings(params: ModelParams, I: float, phi: float, s: float,
               crest: CrestBranch) -> list[float]:
    """All sigma in the crest window with c(sigma) = 0, tolerance 1e-12.

    The coarse scan uses the standard step; cells holding a grazing pair
    (local |c| minimum without sign change) are rescanned finely so that
    near-tangency double roots are not dropped.

    While the crest is horizontal its component through (0, 0) is exactly
    the graph covered by the maximum sigma-window.  Once it turns vertical
    (|mu*alpha| > 1) that window also picks up points of the other
    component, which sits in the cos(psi) < 0 half; those are filtered
    out, and the thetas left without any admissible root are the holes.
    """
    a = crest_coefficient(params, I)
    lo, hi = _sigma_window(crest)

    def c(sig: float) -> float:
        return a * math.sin(phi + I * (sig - s)) + math.sin(sig)

    n = max(8, int(math.ceil((hi - lo) / _SCAN_STEP)))
    xs = np.linspace(lo, hi, n + 1)
    vs = np.array([c(x) for x in xs])

    roots: list[float] = []

    def refine(x0: float, x1: float):
        r = brentq(c, x0, x1, xtol=1e-15)
        if abs(c(r)) <= 1e-12:
            roots.append(r)

    for i in range(n):
        if vs[i] == 0.0:
            roots.append(xs[i])
        elif vs[i] * vs[i + 1] < 0.0:
            refine(xs[i], xs[i + 1])
    if vs[-1] == 0.0:
        roots.append(xs[-1])

    # grazing pairs: interior local minima of |c| below a coarse threshold
    absv = np.abs(vs)
    for i in range(1, n):
        if absv[i] < 2e-3 and absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1]:
            if vs[i - 1] * vs[i] > 0.0 and vs[i] * vs[i + 1] > 0.0:
                sub = np.linspace(xs[i - 1], xs[i + 1], 257)
                sv = np.array([c(x) for x in sub])
                for j in range(256):
                    if sv[j] * sv[j + 1] < 0.0:
                        refine(sub[j], sub[j + 1])
                    elif sv[j] == 0.0:
                        roots.append(sub[j])

    roots.sort()
    dedup: list[float] = []
    for r in roots:
        if not dedup or abs(r - dedup[-1]) > 1e-10:
            dedup.append(r)

    if abs(a) > 1.0:
        want_positive = crest is CrestBranch.MAXIMUM
        dedup = [r for r in dedup
                 if (math.cos(phi + I * (r - s)) > 0.0) == want_positive]
    return dedup


@lru_cache(maxsize=4096)
def _branch_psi_domains(params: ModelParams, I: float) -> dict[Branch, tuple[tuple[float, float], ...]] | None:
    """psi-interval domains of the three bijective branches, or None if no tangency."""
    info = tangency_points(params, I)
    if info is None:
        return None
    th = lambda psi: theta_of_psi(params, I, psi)
    # theta is increasing on [0, psi1] and on [psi2, 2*pi]; invert the band edges
    psi_t1 = brentq(lambda p: th(p) - info.theta1, info.psi2, TWO_PI, xtol=1e-14)
    psi_t2 = brentq(lambda p: th(p) - info.theta2, 0.0, info.psi1, xtol=1e-14)
    return {
        Branch.A: ((0.0, psi_t2), (info.psi2, TWO_PI)),
        Branch.B: ((0.0, info.psi1), (psi_t1, TWO_PI)),
        Branch.C: ((0.0, psi_t2), (info.psi1, info.psi2), (psi_t1, TWO_PI)),
    }


def _in_intervals(x: float, intervals: tuple[tuple[float, float], ...], tol: float = 1e-9) -> bool:
    return any(lo - tol <= x <= hi + tol for lo, hi in intervals)


def _check_singular(params: ModelParams, I: float):
    if abs(abs(crest_coefficient(params, I)) - 1.0) <= 1e-12:
        raise SingularCrest(f"crest is singular at I = {I!r}")


def _select_crossing(params: ModelParams, I: float, phi: float, s: float,
                     sigmas: list[float], branch: Branch) -> float:
    """Pick one crossing: minimal |tau| for the primary branch, else by psi-domain."""
    if branch is Branch.SINGLE:
        # tau = s - sigma; ties broken toward the smaller tau
        return min(sigmas, key=lambda sig: (abs(s - sig), s - sig))
    domains = _branch_psi_domains(params, I)
    if domains is None:
        # no tangency: the unique crossing serves every branch label
        return min(sigmas, key=lambda sig: (abs(s - sig), s - sig))
    candidates = [sig for sig in sigmas
                  if _in_intervals(wrap_angle(phi + I * (sig - s)), domains[branch])]
    if not candidates:
        raise BranchUnavailable(
            f"no crossing with psi in branch-{branch.value} domain at I={I!r}"
        )
    return min(candidates, key=lambda sig: (abs(s - sig), s - sig))


def tau_star_full(params: ModelParams, I: float, phi: float, s: float,
                  crest: CrestBranch = CrestBranch.MAXIMUM,
                  branch: Branch = Branch.SINGLE) -> TauStar:
    """Crossing of the segment through (I, phi, s) with a crest, in segment time.

    The returned tau satisfies the critical-point condition
    I*A10(I)*sin(phi - I*tau) + A01*sin(s - tau) = 0 with residual <= 1e-12,
    and s - tau lies in the window (-pi/2, 3*pi/2].  The anchor's s is first
    reduced into that window, so a point already on a crest reports tau = 0
    regardless of how its time angle was stored.
    """
    _check_singular(params, I)
    s = wrap_angle(s)
    if s > 1.5 * math.pi:
        s -= TWO_PI
    sigmas = _crossings(params, I, phi, s, crest)
    if not sigmas:
        raise NoCrossing(
            f"segment through (I={I!r}, phi={phi!r}, s={s!r}) misses the "
            f"{crest.value} crest"
        )
    sig = _select_crossing(params, I, phi, s, sigmas, branch)
    tau = s - sig
    return TauStar(tau=tau, psi=wrap_angle(phi - I * tau), sigma=sig,
                   crest=crest, branch=branch)


def tau_star(params: ModelParams, I: float, theta: float,
             crest: CrestBranch = CrestBranch.MAXIMUM,
             branch: Branch = Branch.SINGLE) -> TauStar:
    """theta-anchored crossing time: the segment starts at (phi, s) = (theta, 0)."""
    return tau_star_full(params, I, theta, 0.0, crest, branch)


def reduced_poincare(params: ModelParams, I: float, theta: float,
                     crest: CrestBranch = CrestBranch.MAXIMUM,
                     branch: Branch = Branch.SINGLE) -> float:
    """Splitting potential evaluated at the crest crossing of the (I, theta) segment."""
    ts = tau_star(params, I, theta, crest, branch)
    return (amp_A00(params) + amp_A10(params, I) * math.cos(ts.psi)
            + amp_A01(params) * math.cos(ts.sigma))


def reduced_poincare_psi(params: ModelParams, I: float, psi: float,
                         crest: CrestBranch = CrestBranch.MAXIMUM) -> float:
    """Crest-angle form A00 + A10(I) cos(psi) + A01 cos(xi(I, psi)); no root-finding."""
    from .crests import xi  # local import to keep module init cheap
    x = xi(params, crest, I, psi)
    return (amp_A00(params) + amp_A10(params, I) * math.cos(psi)
            + amp_A01(params) * math.cos(x))


def _grad_at_crossing(params: ModelParams, I: float, ts: TauStar) -> tuple[float, float]:
    """(d/dI, d/dtheta) of the reduced function from the envelope identity.

    The crossing condition kills every d tau/d(I, theta) term, leaving
      d/dtheta = -A10(I) sin(psi),
      d/dI     =  A10'(I) cos(psi) + tau * A10(I) * sin(psi).
    """
    a10 = amp_A10(params, I)
    sin_psi = math.sin(ts.psi)
    d_theta = -a10 * sin_psi
    d_i = amp_A10_deriv(params, I) * math.cos(ts.psi) + ts.tau * a10 * sin_psi
    return d_i, d_theta


def finite_diff_grad(params: ModelParams, I: float, theta: float,
                     crest: CrestBranch = CrestBranch.MAXIMUM,
                     branch: Branch = Branch.SINGLE,
                     h: float = 1e-5) -> tuple[float, float]:
    """Central finite differences of reduced_poincare; the independent oracle."""
    f = lambda ii, tt: reduced_poincare(params, ii, tt, crest, branch)
    d_i = (f(I + h, theta) - f(I - h, theta)) / (2.0 * h)
    d_theta = (f(I, theta + h) - f(I, theta - h)) / (2.0 * h)
    return d_i, d_theta


@lru_cache(maxsize=64)
def _closed_form_grad_valid(params: ModelParams) -> bool:
    """One-off validation of the envelope gradient against finite differences.

    The d/dI closed form rests on the crest condition cancelling every
    d(tau)/dI term, so it is checked per parameter set before being trusted;
    on failure callers fall back to finite differences.
    """
    probes = 0
    for I in (0.35, 0.8, 1.3, 2.1, 2.8):
        for theta in (0.7, 2.1, 3.9, 5.5):
            try:
                ts = tau_star(params, I, theta)
                if abs(dtheta_dpsi_at(params, I, ts.psi)) < 1e-3:
                    continue
                gi, gt = _grad_at_crossing(params, I, ts)
                fi, ft = finite_diff_grad(params, I, theta)
            except ScatmapError:
                continue
            probes += 1
            if (abs(gi - fi) > 1e-4 * (1.0 + abs(gi))
                    or abs(gt - ft) > 1e-4 * (1.0 + abs(gt))):
                return False
    return probes > 0


def dtheta_dpsi_at(params: ModelParams, I: float, psi: float,
                   crest: CrestBranch = CrestBranch.MAXIMUM) -> float:
    """d theta / d psi = 1 - I * d xi/d psi; vanishes on the tangency locus.

    The minimum-crest slope is the negative of the maximum-crest one.
    """
    slope = dxi_max_dpsi(params, I, psi)
    if crest is CrestBranch.MINIMUM:
        slope = -slope
    return 1.0 - I * slope


def grad_reduced_poincare(params: ModelParams, I: float, theta: float,
                          crest: CrestBranch = CrestBranch.MAXIMUM,
                          branch: Branch = Branch.SINGLE) -> tuple[float, float]:
    """Gradient (d/dI, d/dtheta) of the reduced Poincare function.

    Raises TangencyPoint when the crossing sits too close to the tangency
    locus, where the crossing time ceases to be differentiable.
    """
    ts = tau_star(params, I, theta, crest, branch)
    if abs(dtheta_dpsi_at(params, I, ts.psi, crest)) < _TANGENCY_GUARD:
        raise TangencyPoint(
            f"gradient undefined near tangency: |d theta/d psi| < {_TANGENCY_GUARD}"
        )
    if _closed_form_grad_valid(params):
        return _grad_at_crossing(params, I, ts)
    return finite_diff_grad(params, I, theta, crest, branch)


def scattering_step(params: ModelParams, pt: ReducedPoint,
                    crest: CrestBranch = CrestBranch.MAXIMUM,
                    branch: Branch = Branch.SINGLE) -> ReducedPoint:
    """One application of the truncated scattering map.

    (I, theta) -> (I + eps * dL/dtheta, theta - eps * dL/dI); exact up to the
    dropped second-order remainder.
    """
    d_i, d_theta = grad_reduced_poincare(params, pt.I, pt.theta, crest, branch)
    return ReducedPoint(I=pt.I + params.eps * d_theta,
                        theta=pt.theta - params.eps * d_i)


def scattering_branches(params: ModelParams, I: float, theta: float,
                        crest: CrestBranch = CrestBranch.MAXIMUM) -> BranchSet:
    """Which scattering branches exist at (I, theta), with their psi-domains."""
    coeff = abs(crest_coefficient(params, I))
    if abs(coeff - 1.0) <= 1e-12:
        return BranchSet(available=(), domains={}, tangency=None)
    info = tangency_points(params, I)
    if coeff > 1.0:
        # vertical crest: a crossing may or may not exist at this theta
        sigmas = _crossings(params, I, theta, 0.0, crest)
        avail = (Branch.SINGLE,) if sigmas else ()
        return BranchSet(available=avail, domains={}, tangency=None)
    if info is None:
        return BranchSet(available=(Branch.SINGLE,), domains={}, tangency=None)
    domains = dict(_branch_psi_domains(params, I))  # copy: cache stays pristine
    th = wrap_angle(theta)
    tol = 1e-12
    if info.theta2 - tol <= th <= info.theta1 + tol:
        # inside (or on the edge of) the tangency band: three branches
        return BranchSet(available=(Branch.A, Branch.B, Branch.C),
                         domains=domains, tangency=info)
    return BranchSet(available=(Branch.SINGLE,), domains=domains, tangency=info)


@dataclass(frozen=True)
class SymmetryReport:
    grid_shape: tuple[int, int]
    max_discrepancy_I: float
    max_discrepancy_phi: float

    @property
    def max_discrepancy(self) -> float:
        return max(self.max_discrepancy_I, self.max_discrepancy_phi)


def _full_coordinates_step(params: ModelParams, I: float, phi: float, s: float,
                           crest: CrestBranch) -> tuple[float, float]:
    """Truncated scattering map in (I, phi, s) coordinates (s is a parameter)."""
    ts = tau_star_full(params, I, phi, s, crest)
    a10 = amp_A10(params, I)
    sin_psi = math.sin(ts.psi)
    d_phi = -a10 * sin_psi
    d_i = amp_A10_deriv(params, I) * math.cos(ts.psi) + ts.tau * a10 * sin_psi
    return I + params.eps * d_phi, phi - params.eps * d_i


def symmetry_check_mu(params: ModelParams, n: int = 20,
                      I_range: tuple[float, float] = (0.1, 2.0)) -> SymmetryReport:
    """Verify that the minimum-crest map at s = pi equals the maximum-crest
    map at s = 0 with the sign of mu flipped (via a01 -> -a01).

    Returns the maximum componentwise discrepancy over an n-by-n grid.
    """
    flipped = replace(params, a01=-params.a01)
    max_di = 0.0
    max_dphi = 0.0
    for I in np.linspace(I_range[0], I_range[1], n):
        for phi in np.linspace(0.0, TWO_PI, n, endpoint=False):
            left = _full_coordinates_step(params, float(I), float(phi), math.pi,
                                          CrestBranch.MINIMUM)
            right = _full_coordinates_step(flipped, float(I), float(phi), 0.0,
                                           CrestBranch.MAXIMUM)
            max_di = max(max_di, abs(left[0] - right[0]))
            max_dphi = max(max_dphi, abs(left[1] - right[1]))
    return SymmetryReport(grid_shape=(n, n), max_discrepancy_I=max_di,
                          max_discrepancy_phi=max_dphi)


def flow_reduced_hamiltonian(params: ModelParams, pt: ReducedPoint, t: float,
                             crest: CrestBranch = CrestBranch.MAXIMUM,
                             branch: Branch = Branch.SINGLE,
                             rtol: float = 1e-11, atol: float = 1e-13) -> ReducedPoint:
    """Flow of dI/dt = dL/dtheta, dtheta/dt = -dL/dI for time t.

    The truncated scattering map is the Euler step of this system, so n map
    iterates track this flow at time n*eps.  Conserves the reduced function
    to ~1e-9 per unit time at the default tolerances.
    """
    if t == 0.0:
        return pt

    def rhs(_t, y):
        d_i, d_theta = grad_reduced_poincare(params, y[0], y[1], crest, branch)
        return [d_theta, -d_i]

    try:
        sol = solve_ivp(rhs, (0.0, t), [pt.I, pt.theta], method="DOP853",
                        rtol=rtol, atol=atol, dense_output=False)
    except ScatmapError as exc:
        raise DomainExit(f"reduced flow left its branch domain: {exc}") from exc
    if not sol.success:
        raise DomainExit(f"reduced flow integration failed: {sol.message}")
    return ReducedPoint(I=float(sol.y[0, -1]), theta=float(sol.y[1, -1]))
