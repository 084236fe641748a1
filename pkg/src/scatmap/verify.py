"""Independent numerical oracles for the closed forms.

Everything here recomputes a quantity the rest of the library obtains in
closed form, by a route that shares no code with it: direct quadrature for
the splitting potential, full 5D integration for the action jump across one
homoclinic excursion, and a gradient scan for the admissible perturbation
size along a highway.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import DegenerateAction, NotInDomain, StepFailure
from .highways import Side, highway_psi
from .model import (
    TWO_PI,
    FullState,
    ModelParams,
    amp_A10,
    amp_A10_deriv,
    crest_coefficient,
    perturbation_g,
    separatrix,
    wrap_angle,
)
from .crests import xi_max_raw
from .scattering import CrestBranch, tau_star_full


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: list[FullState]
    tolerances: tuple[float, float]


@dataclass(frozen=True)
class EpsilonStarEstimate:
    value: float
    envelope: float
    argmin_I: float


def melnikov_quadrature_oracle(params: ModelParams, I: float, phi: float,
                               s: float, tol: float = 1e-10) -> float:
    """Splitting potential by direct quadrature along the separatrix.

        (1/2) * integral of p0(u)^2 * g(phi + I*u, s + u) du

    The integrand decays like exp(-2|u|); the window is cut where the tail
    drops below tol.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    amp = abs(params.a00) + abs(params.a10) + abs(params.a01)
    # tail beyond T is bounded by 8*amp*exp(-2T)
    T = 0.5 * math.log(max(8.0 * amp, 1.0) / (0.1 * tol)) + 1.0

    def integrand(u: float) -> float:
        p0 = 2.0 / math.cosh(u)
        return 0.5 * p0 * p0 * perturbation_g(params, phi + I * u, s + u)

    val, _ = quad(integrand, -T, T, limit=400, epsabs=0.1 * tol, epsrel=1e-12)
    return val


def _rhs(params: ModelParams, y):
    p, q, I, phi, s = y
    g = params.a00 + params.a10 * math.cos(phi) + params.a01 * math.cos(s)
    return [
        math.sin(q) * (1.0 + params.eps * g),
        p,
        params.eps * params.a10 * math.cos(q) * math.sin(phi),
        I,
        1.0,
    ]


def integrate_full(params: ModelParams, state: FullState, T: float,
                   tol: float = 1e-10, n_samples: int = 200,
                   max_step: float = math.inf,
                   first_step: float | None = None) -> Trajectory:
    """Adaptive high-order integration of the full 5D flow over [0, T].

    ``max_step``/``first_step`` exist so convergence tests can force a fixed
    step; normal callers leave them alone.
    """
    if not math.isfinite(T):
        raise ValueError("T must be finite")
    y0 = [state.p, state.q, state.I, state.phi, state.s]
    t_eval = np.linspace(0.0, T, max(2, n_samples))
    sol = solve_ivp(lambda t, y: _rhs(params, y), (0.0, T), y0, method="DOP853",
                    rtol=tol, atol=tol * 1e-2, t_eval=t_eval,
                    max_step=max_step, first_step=first_step)
    if not sol.success:
        raise StepFailure(f"integrator failed: {sol.message}")
    states = [FullState(p=sol.y[0, k], q=sol.y[1, k], I=sol.y[2, k],
                        phi=sol.y[3, k], s=sol.y[4, k])
              for k in range(sol.y.shape[1])]
    return Trajectory(times=sol.t, states=states, tolerances=(tol * 1e-2, tol))


def _integrate_raw(params: ModelParams, y0, T: float, rtol: float, atol: float):
    sol = solve_ivp(lambda t, y: _rhs(params, y), (0.0, T), y0, method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise StepFailure(f"integrator failed: {sol.message}")
    return sol.y[:, -1]


def _inner_backflow(params: ModelParams, I: float, phi: float, T0: float):
    """Exact torus dynamics run backward for T0: captures the O(eps) wobble
    of the asymptotic orbit that a bare rotor rotation misses."""
    sol = solve_ivp(
        lambda t, y: [params.eps * params.a10 * math.sin(y[1]), y[0]],
        (0.0, -T0), [I, phi], method="DOP853", rtol=1e-13, atol=1e-14)
    if not sol.success:
        raise StepFailure(f"inner backflow failed: {sol.message}")
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def measure_homoclinic_jump(params: ModelParams, I: float, phi: float, s: float,
                            T0: float | None = None,
                            rtol: float = 1e-12) -> tuple[float, float]:
    """Measured vs predicted first-order action jump across one excursion.

    Launches on the unperturbed separatrix at separatrix time tau* - T0 with
    (I, phi) back-propagated by the exact torus flow, integrates the full
    system for 2*T0, and reads the jump off the rotor integral
    G = I^2/2 + eps*a10*cos(phi), which is constant except during the
    excursion.  Returns (dI_measured, dI_predicted = eps * dL*/dphi).

    T0 defaults to log(1/eps) + 5.  Much larger values degrade the result:
    the hyperbolic stretch re-amplifies the launch offset.
    """
    if abs(I) < 1e-6:
        raise DegenerateAction(
            "jump measurement needs a rotating torus (|I| >= 1e-6)")
    if params.eps == 0.0:
        return 0.0, 0.0
    if T0 is None:
        T0 = math.log(1.0 / params.eps) + 5.0
    # keep the launch anchored to the same s-representative tau_star uses
    s = wrap_angle(s)
    if s > 1.5 * math.pi:
        s -= TWO_PI
    ts = tau_star_full(params, I, phi, s, CrestBranch.MAXIMUM)
    predicted = params.eps * (-amp_A10(params, I) * math.sin(ts.psi))

    p0, q0 = separatrix(ts.tau - T0)
    I0, phi0 = _inner_backflow(params, I, phi, T0)
    y0 = [p0, q0, I0, phi0, s - T0]
    yf = _integrate_raw(params, y0, 2.0 * T0, rtol=rtol, atol=rtol * 0.1)

    G0 = 0.5 * y0[2] ** 2 + params.eps * params.a10 * math.cos(y0[3])
    Gf = 0.5 * yf[2] ** 2 + params.eps * params.a10 * math.cos(yf[3])
    return (Gf - G0) / I, predicted


def gradient_norm_on_highway(params: ModelParams, I: float,
                             side: Side = Side.RIGHT) -> float:
    """Norm of the reduced-function gradient at the lane point of action I."""
    psi = highway_psi(params, abs(I), side)
    tau = -xi_max_raw(params, abs(I), psi)
    a10 = amp_A10(params, abs(I))
    d_theta = -a10 * math.sin(psi)
    d_i = amp_A10_deriv(params, abs(I)) * math.cos(psi) + tau * a10 * math.sin(psi)
    return math.hypot(d_i, d_theta)


def epsilon_star(params: ModelParams, I_star: float,
                 grid: int = 801) -> EpsilonStarEstimate:
    """Largest perturbation for which the gradient dominates along the lane.

    Minimizes the gradient norm over lane samples with |I| <= I_star (the
    function is even in I, so only [0, I_star] is scanned) and reports the
    large-action envelope 4*pi*|a10|*I_star*exp(-pi*I_star/2) next to it.
    """
    if I_star <= 0.0:
        raise ValueError("I_star must be positive")
    if grid < 2:
        raise ValueError("grid must be >= 2")
    if abs(crest_coefficient(params, I_star)) >= 1.0 - 1e-12:
        raise NotInDomain(f"lane undefined at I = {I_star!r}")
    Is = np.linspace(0.0, I_star, grid)
    vals = np.array([gradient_norm_on_highway(params, float(I)) for I in Is])
    k = int(np.argmin(vals))
    envelope = 4.0 * math.pi * abs(params.a10) * I_star * math.exp(-math.pi * I_star / 2.0)
    return EpsilonStarEstimate(value=float(vals[k]), envelope=envelope,
                               argmin_I=float(Is[k]))
