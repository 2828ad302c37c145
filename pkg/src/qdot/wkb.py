"""Semiclassical quantization for the confined Coulomb problem.

The accumulated phase between the inner turning point rho_t and the wall,

    alpha(E) = integral_{rho_t}^{r0} sqrt(E - Z/rho - m^2/rho^2) d(rho),

is quantized as alpha = (n_r + 3/4) pi: the hard wall contributes a phase of
pi/2 and the linear turning point pi/4.  alpha is evaluated three ways --
adaptive quadrature in rho (authoritative), the same integral after the map
r = e^w, and a closed antiderivative -- which must agree to 1e-9 relative.

The closed form, written with A = E, B = Z/2, C = m^2 and
Q(rho) = A rho^2 - 2 B rho - C, is

    alpha = sqrt(Q(r0))
            - (B/sqrt(A)) * ln[(A r0 - B + sqrt(A Q(r0))) / sqrt(B^2 + A C)]
            - |m| * [pi/2 - arcsin((B r0 + C) / (r0 sqrt(B^2 + A C)))],

where sqrt(B^2 + A C) = A rho_t - B; the ln term drops for Z = 0 and the
arcsin term for m = 0, leaving alpha = sqrt(E) r0 when both vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import BracketingError, TurningPointProximityError
from .model import (
    CentrifugalConvention,
    EigenResult,
    QuantumNumbers,
    RadialProblem,
    effective_potential,
    turning_point,
)

#: quantization target alpha = (n_r + MASLOV_OFFSET) * pi
MASLOV_OFFSET = 0.75

_QUAD_EPSABS = 1e-13
_QUAD_EPSREL = 1e-12


class ActionMethod(Enum):
    QUADRATURE_RHO = "quadrature_rho"
    QUADRATURE_W = "quadrature_w"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class ActionResult:
    """Action value with the turning point and an evaluation-error estimate."""

    alpha: float
    turning_point: float
    method: ActionMethod
    est_error: float


def _check_quantum_numbers(qn: QuantumNumbers, problem: RadialProblem):
    if abs(qn.m) != problem.m_abs:
        raise ValueError(
            f"quantum numbers carry |m|={abs(qn.m)} but the problem has |m|={problem.m_abs}"
        )


def action_quadrature(E: float, problem: RadialProblem) -> ActionResult:
    """Action integral by adaptive quadrature in rho.

    The substitution rho = rho_t + s^2 removes the square-root singularity:
    the transformed integrand 2 s Gamma(rho_t + s^2) is smooth at s = 0, so
    ordinary adaptive quadrature reaches ~1e-12 relative accuracy.
    """
    z = problem.coulomb_strength
    m2 = float(problem.m_abs**2)
    rt = turning_point(E, problem)
    s_max = math.sqrt(problem.r0 - rt)

    def integrand(s):
        rho = rt + s * s
        q = (E * rho - z) * rho - m2
        return 2.0 * s * math.sqrt(max(q, 0.0)) / rho

    alpha, err = quad(
        integrand, 0.0, s_max, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200
    )
    return ActionResult(alpha, rt, ActionMethod.QUADRATURE_RHO, err)


def action_quadrature_w(E: float, problem: RadialProblem) -> ActionResult:
    """Action integral in the mapped variable w = ln r (change-of-variables identity).

    Integrates sqrt(e^{2w}(E - Z e^{-w}) - m^2) from the mapped turning point
    up to ln r0, with the same s^2 endpoint substitution.  For Z = 0 and m = 0
    there is no turning point and the integral runs from w = -infinity.
    """
    z = problem.coulomb_strength
    m2 = float(problem.m_abs**2)
    rt = turning_point(E, problem)
    w_wall = math.log(problem.r0)

    if rt == 0.0:
        # integrand sqrt(E) e^w decays to the left; no singularity anywhere
        alpha, err = quad(
            lambda w: math.sqrt(E) * math.exp(w),
            -math.inf,
            w_wall,
            epsabs=_QUAD_EPSABS,
            epsrel=_QUAD_EPSREL,
            limit=200,
        )
        return ActionResult(alpha, rt, ActionMethod.QUADRATURE_W, err)

    w_t = math.log(rt)
    t_max = math.sqrt(w_wall - w_t)

    def integrand(t):
        ew = math.exp(w_t + t * t)
        g = (E * ew - z) * ew - m2
        return 2.0 * t * math.sqrt(max(g, 0.0))

    alpha, err = quad(
        integrand, 0.0, t_max, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200
    )
    return ActionResult(alpha, rt, ActionMethod.QUADRATURE_W, err)


def action_closed_form(E: float, problem: RadialProblem) -> ActionResult:
    """Action integral by the closed antiderivative quoted in the module docstring."""
    z = problem.coulomb_strength
    r0 = problem.r0
    rt = turning_point(E, problem)

    a = E
    b = 0.5 * z
    c = float(problem.m_abs**2)
    q_wall = (a * r0 - 2.0 * b) * r0 - c
    q_wall = max(q_wall, 0.0)
    alpha = math.sqrt(q_wall)
    if b > 0.0:
        # sqrt(B^2 + A C) equals A rho_t - B exactly, which keeps the log
        # argument well conditioned as E approaches the wall potential
        denom = math.sqrt(b * b + a * c)
        alpha -= (b / math.sqrt(a)) * math.log(
            (a * r0 - b + math.sqrt(a * q_wall)) / denom
        )
    if c > 0.0:
        arg = (b * r0 + c) / (r0 * math.sqrt(b * b + a * c))
        arg = min(1.0, max(-1.0, arg))
        alpha -= problem.m_abs * (0.5 * math.pi - math.asin(arg))
    return ActionResult(alpha, rt, ActionMethod.CLOSED_FORM, 0.0)


def quantization_residual(E: float, qn: QuantumNumbers, problem: RadialProblem) -> float:
    """alpha(E) - (n_r + 3/4) pi; strictly increasing in E, zero at the level."""
    _check_quantum_numbers(qn, problem)
    return action_quadrature(E, problem).alpha - (qn.n_r + MASLOV_OFFSET) * math.pi


def solve_wkb(
    qn: QuantumNumbers,
    problem: RadialProblem,
    *,
    e_max: float = 1e12,
    rel_tol: float = 1e-12,
) -> EigenResult:
    """Solve the quantization condition alpha(E) = (n_r + 3/4) pi for E.

    alpha is monotone in E with range (0, inf) on (V(r0), inf), so the root is
    unique; the bracket is found by doubling upward from just above the wall
    potential and refined by Brent's method.

    Parameters
    ----------
    qn : QuantumNumbers
        target level; ``qn.m`` must match ``problem.m`` in magnitude
    problem : RadialProblem
        dot geometry and Coulomb strength
    e_max : float
        cap on the upward doubling search; exceeding it raises
        :class:`BracketingError`
    rel_tol : float
        relative energy tolerance passed to the root refinement

    Returns
    -------
    EigenResult
        with ``endpoint_residual`` the remaining quantization residual and
        ``n_intervals_used`` = 0 (no mesh is involved)
    """
    _check_quantum_numbers(qn, problem)
    target = (qn.n_r + MASLOV_OFFSET) * math.pi
    v_wall = effective_potential(problem.r0, problem, CentrifugalConvention.WKB_MODIFIED)
    e_lo = v_wall * (1.0 + 1e-12) + 1e-12 * (1.0 + v_wall)

    def residual(E):
        return action_quadrature(E, problem).alpha - target

    e_hi = max(2.0 * e_lo, 1.0 / problem.r0**2)
    while residual(e_hi) < 0.0:
        e_hi *= 2.0
        if e_hi > e_max:
            raise BracketingError(
                f"bracket failure: alpha(E) < {target:.6g} for all E up to {e_max:.3g}"
            )
    bracket = (e_lo, e_hi)
    root = brentq(residual, e_lo, e_hi, xtol=1e-14, rtol=rel_tol)
    return EigenResult(
        E=root,
        node_count=qn.n_r,
        bracket=bracket,
        endpoint_residual=residual(root),
        mesh_error_estimate=0.0,
        n_intervals_used=0,
    )


#: exclusion radius around the turning point, as a fraction of rho_t
TURNING_POINT_EXCLUSION = 1e-3


@dataclass(frozen=True)
class WkbWavefunction:
    """Semiclassical u(rho) for one energy; amplitude is a free normalization."""

    problem: RadialProblem
    E: float
    amplitude: float = 1.0

    @property
    def turning_point(self) -> float:
        return turning_point(self.E, self.problem)

    @property
    def delta(self) -> float:
        """Half-width of the excluded neighborhood where the branches diverge."""
        return TURNING_POINT_EXCLUSION * self.turning_point


def _gamma(E: float, problem: RadialProblem, rho: float) -> float:
    z = problem.coulomb_strength
    m2 = float(problem.m_abs**2)
    q = (E * rho - z) * rho - m2
    return math.sqrt(max(q, 0.0)) / rho


def _kappa(E: float, problem: RadialProblem, rho: float) -> float:
    z = problem.coulomb_strength
    m2 = float(problem.m_abs**2)
    q = (E * rho - z) * rho - m2
    return math.sqrt(max(-q, 0.0)) / rho


def _phase_integral(E: float, problem: RadialProblem, rho: float) -> float:
    """integral_{rho_t}^{rho} Gamma, via the rho_t + s^2 substitution."""
    rt = turning_point(E, problem)

    def integrand(s):
        return 2.0 * s * _gamma(E, problem, rt + s * s)

    val, _ = quad(
        integrand,
        0.0,
        math.sqrt(rho - rt),
        epsabs=_QUAD_EPSABS,
        epsrel=_QUAD_EPSREL,
        limit=200,
    )
    return val


def _decay_integral(E: float, problem: RadialProblem, rho: float) -> float:
    """integral_{rho}^{rho_t} kappa, via the rho_t - s^2 substitution."""
    rt = turning_point(E, problem)

    def integrand(s):
        return 2.0 * s * _kappa(E, problem, rt - s * s)

    val, _ = quad(
        integrand,
        0.0,
        math.sqrt(rt - rho),
        epsabs=_QUAD_EPSABS,
        epsrel=_QUAD_EPSREL,
        limit=200,
    )
    return val


def wkb_wavefunction_eval(wf: WkbWavefunction, rho: float) -> float:
    """Evaluate the connected WKB branches of u at radius rho.

    Region I (rho < rho_t):   u = (A / sqrt(kappa)) exp(-integral_rho^rho_t kappa)
    Region II (rho > rho_t):  u = (2 A / sqrt(Gamma)) sin(integral_rho_t^rho Gamma + pi/4)

    Radii within ``wf.delta`` of the turning point are rejected: the
    connection formulae diverge there and no uniform smoothing is applied.
    """
    problem = wf.problem
    if rho <= 0.0 or rho > problem.r0:
        raise ValueError(f"radius must lie in (0, r0], got rho={rho}")
    rt = wf.turning_point
    if abs(rho - rt) < wf.delta:
        raise TurningPointProximityError(
            f"rho={rho:.6g} is within delta={wf.delta:.3g} of the turning point {rt:.6g}"
        )
    if rho < rt:
        kappa = _kappa(wf.E, problem, rho)
        return wf.amplitude / math.sqrt(kappa) * math.exp(-_decay_integral(wf.E, problem, rho))
    gamma = _gamma(wf.E, problem, rho)
    phase = _phase_integral(wf.E, problem, rho) + 0.25 * math.pi
    return 2.0 * wf.amplitude / math.sqrt(gamma) * math.sin(phase)
