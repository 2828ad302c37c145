"""Exact eigenvalues by Numerov shooting on a logarithmic mesh.

The radial equation is integrated in the mapped variable w = ln r, where it
takes the first-derivative-free form

    chi''(w) + Gamma2(w) chi(w) = 0,
    Gamma2(w) = e^{2w} (E - Z e^{-w}) - m^2,

with chi(w) = psi(r) = e^{-w/2} u(r).  This w-space equation is algebraically
identical to the physical r-space u-equation with centrifugal coefficient
m^2 - 1/4, so the solver realizes the bare two-dimensional problem; the mesh
is uniform in w, i.e. logarithmic in r, dense near the origin where the
Coulomb term varies fastest.

Outward propagation starts from the origin asymptotics

    chi(w) ~ e^{|m| w} (1 + a e^w + b e^{2w}),
    a = Z / (2|m| + 1),  b = (a Z - E) / (4|m| + 4),

which is the regular solution through the centrifugal barrier; the growing
branch is the regular one there, so outward integration is numerically
stable, and the wall condition chi(ln r0) = 0 is enforced by shooting on E
with node-count bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BracketingError, MeshConvergenceError, QdotError
from .model import EigenResult, QuantumNumbers, RadialProblem, turning_point
from .wkb import solve_wkb

#: padding, in units of w = ln r, between the inner mesh edge and the smaller
#: of turning point and wall; e^{-14} ~ 8e-7 keeps the startup series tail
#: and the e^{|m|(w - w_t)} suppression below ~1e-6 relative at w_min
ORIGIN_MARGIN = 14.0

DEFAULT_INTERVALS = 16384

#: rescale chi whenever |chi| exceeds this guard; node counts are unaffected
RESCALE_LIMIT = 1e250


@dataclass(frozen=True)
class LogMesh:
    """Uniform mesh in w = ln r; points w_i map to radii r_i = e^{w_i}."""

    w_min: float
    w_max: float
    n_intervals: int

    def __post_init__(self):
        if not self.w_min < self.w_max:
            raise ValueError(f"need w_min < w_max, got [{self.w_min}, {self.w_max}]")
        if self.n_intervals < 64:
            raise ValueError(f"need at least 64 intervals, got {self.n_intervals}")

    @property
    def h(self) -> float:
        return (self.w_max - self.w_min) / self.n_intervals

    @property
    def n_points(self) -> int:
        return self.n_intervals + 1

    def points(self) -> np.ndarray:
        return np.linspace(self.w_min, self.w_max, self.n_points)


@dataclass(frozen=True)
class RadialWavefunction:
    """Solved radial state sampled on a log mesh.

    ``chi`` solves the w-space equation; ``u = e^{w/2} chi`` vanishes at the
    wall and carries n_r interior sign changes; ``psi = chi`` is the physical
    radial wavefunction, normalized so that integral |psi|^2 r dr = 1.
    """

    mesh: LogMesh
    r: np.ndarray
    chi: np.ndarray
    u: np.ndarray
    psi: np.ndarray

    @property
    def node_count(self) -> int:
        interior = self.chi[1:-1]
        return int(np.sum(np.sign(interior[:-1]) * np.sign(interior[1:]) < 0))


def gamma_sq_w(w, E: float, problem: RadialProblem):
    """Coefficient e^{2w}(E - Z e^{-w}) - m^2 of the w-space equation; vectorizes over w."""
    ew = np.exp(w)
    return (E * ew - problem.coulomb_strength) * ew - float(problem.m_abs**2)


def build_mesh(
    problem: RadialProblem, E_hint: float, n_intervals: int = DEFAULT_INTERVALS
) -> LogMesh:
    """Mesh reaching from well below the inner turning point up to the wall.

    The inner edge sits ORIGIN_MARGIN units of w below min(rho_t(E_hint), r0);
    when the hint has no turning point (Z = 0, m = 0) the wall radius anchors
    the margin instead.
    """
    if E_hint <= 0.0:
        raise ValueError(f"energy hint must be positive, got {E_hint}")
    rt = turning_point(E_hint, problem, enforce_wall=False)
    ref = rt if rt > 0.0 else problem.r0
    w_min = math.log(min(ref, problem.r0)) - ORIGIN_MARGIN
    return LogMesh(w_min=w_min, w_max=math.log(problem.r0), n_intervals=n_intervals)


@njit(cache=True, nogil=True)
def _propagate_kernel(E, w0, h, n, z, m_abs, chi, store):
    """Numerov three-term recurrence over n mesh points.

    Returns (endpoint, max_abs, crossings_total, crossings_interior):
    ``crossings_total`` counts every strict sign change including one in the
    final interval (that is the classifier used by the shooting bisection,
    where a zero entering through the wall marks E above the eigenvalue);
    ``crossings_interior`` excludes the final interval and is the physical
    node count.  When ``store`` is set the scaled chi values are written to
    ``chi``, consistently rescaled whenever the overflow guard trips.
    """
    a = z / (2.0 * m_abs + 1.0)
    b = (a * z - E) / (4.0 * m_abs + 4.0)
    h2_12 = h * h / 12.0

    r = math.exp(w0)
    prev = 1.0 + r * (a + b * r)
    f_prev = 1.0 + h2_12 * ((E * r - z) * r - m_abs * m_abs)
    r = math.exp(w0 + h)
    cur = math.exp(m_abs * h) * (1.0 + r * (a + b * r))
    f_cur = 1.0 + h2_12 * ((E * r - z) * r - m_abs * m_abs)

    if store:
        chi[0] = prev
        chi[1] = cur

    total = 0
    interior = 0
    if (prev > 0.0 and cur < 0.0) or (prev < 0.0 and cur > 0.0):
        total += 1
        interior += 1
    max_abs = max(abs(prev), abs(cur))

    for i in range(2, n):
        r = math.exp(w0 + h * i)
        f_nxt = 1.0 + h2_12 * ((E * r - z) * r - m_abs * m_abs)
        nxt = ((12.0 - 10.0 * f_cur) * cur - f_prev * prev) / f_nxt
        if (cur > 0.0 and nxt < 0.0) or (cur < 0.0 and nxt > 0.0):
            total += 1
            if i < n - 1:
                interior += 1
        prev = cur
        cur = nxt
        f_prev = f_cur
        f_cur = f_nxt
        a_cur = abs(cur)
        if a_cur > max_abs:
            max_abs = a_cur
        if a_cur > RESCALE_LIMIT:
            s = 1.0 / a_cur
            prev *= s
            cur *= s
            max_abs *= s
            if store:
                for j in range(i):
                    chi[j] *= s
        if store:
            chi[i] = cur

    return cur, max_abs, total, interior


_EMPTY = np.empty(0, dtype=np.float64)


def _classify(E: float, mesh: LogMesh, problem: RadialProblem) -> tuple[float, int, int]:
    """(scaled endpoint, total crossings, interior crossings) without storing chi."""
    endpoint, max_abs, total, interior = _propagate_kernel(
        E,
        mesh.w_min,
        mesh.h,
        mesh.n_points,
        problem.coulomb_strength,
        float(problem.m_abs),
        _EMPTY,
        False,
    )
    if not math.isfinite(endpoint):
        raise QdotError("overflow; rescaling failed")  # unreachable with the guard
    return endpoint / max_abs, total, interior


def numerov_propagate(
    E: float, mesh: LogMesh, problem: RadialProblem
) -> tuple[float, int, np.ndarray]:
    """Propagate chi outward at fixed energy.

    Returns ``(endpoint_value, node_count, chi)`` where chi is scaled to
    max|chi| = 1, ``endpoint_value = chi[-1]`` and ``node_count`` counts the
    strict sign changes at interior mesh points.
    """
    chi = np.empty(mesh.n_points, dtype=np.float64)
    endpoint, max_abs, _total, interior = _propagate_kernel(
        E,
        mesh.w_min,
        mesh.h,
        mesh.n_points,
        problem.coulomb_strength,
        float(problem.m_abs),
        chi,
        True,
    )
    if not math.isfinite(endpoint) or max_abs == 0.0:
        raise QdotError("overflow; rescaling failed")  # unreachable with the guard
    chi /= max_abs
    return chi[-1], interior, chi


_MAX_EXPANSIONS = 80
_MAX_BISECTIONS = 256


def solve_on_mesh(
    qn: QuantumNumbers,
    problem: RadialProblem,
    mesh: LogMesh,
    bracket: tuple[float, float],
    *,
    rel_tol: float = 1e-10,
) -> EigenResult:
    """Shooting eigenvalue on one fixed mesh, without mesh refinement.

    The classifier is the total crossing count of the propagated solution
    (nodes plus a possible zero in the final interval): the count exceeds n_r
    exactly when E lies above the n_r-th discrete eigenvalue, so bisection on
    it converges to the mesh eigenvalue.  The bracket expands by doubling or
    halving until it straddles the level, then bisects to ``rel_tol`` relative
    width.
    """
    if abs(qn.m) != problem.m_abs:
        raise ValueError(
            f"quantum numbers carry |m|={abs(qn.m)} but the problem has |m|={problem.m_abs}"
        )
    n_r = qn.n_r
    e_lo, e_hi = bracket
    if not (0.0 < e_lo < e_hi):
        raise ValueError(f"need 0 < E_lo < E_hi, got {bracket}")

    for _ in range(_MAX_EXPANSIONS):
        if _classify(e_lo, mesh, problem)[1] <= n_r:
            break
        e_lo *= 0.5
    else:
        raise BracketingError(f"bracket exhausted below: still {n_r}+1 crossings at E={e_lo:.3g}")
    for _ in range(_MAX_EXPANSIONS):
        if _classify(e_hi, mesh, problem)[1] > n_r:
            break
        e_hi *= 2.0
    else:
        raise BracketingError(f"bracket exhausted above: no crossing gain by E={e_hi:.3g}")

    for _ in range(_MAX_BISECTIONS):
        if e_hi - e_lo <= rel_tol * e_hi:
            break
        mid = 0.5 * (e_lo + e_hi)
        if _classify(mid, mesh, problem)[1] > n_r:
            e_hi = mid
        else:
            e_lo = mid

    energy = 0.5 * (e_lo + e_hi)
    endpoint, _total, interior = _classify(energy, mesh, problem)
    return EigenResult(
        E=energy,
        node_count=interior,
        bracket=(e_lo, e_hi),
        endpoint_residual=endpoint,
        mesh_error_estimate=0.0,
        n_intervals_used=mesh.n_intervals,
    )


def solve_exact(
    qn: QuantumNumbers,
    problem: RadialProblem,
    *,
    n_intervals: int = DEFAULT_INTERVALS,
    rel_tol: float = 1e-10,
    mesh_rel_tol: float = 1e-8,
    max_doublings: int = 6,
) -> EigenResult:
    """Exact eigenvalue: shooting plus mesh doubling with Richardson extrapolation.

    Parameters
    ----------
    qn : QuantumNumbers
        target level (n_r interior nodes); ``qn.m`` must match ``problem.m``
        in magnitude
    problem : RadialProblem
        dot geometry and Coulomb strength
    n_intervals : int
        starting mesh density; each refinement doubles it
    rel_tol : float
        relative width of the energy bisection on each mesh
    mesh_rel_tol : float
        doubling stops once |E_N - E_2N| / E <= mesh_rel_tol
    max_doublings : int
        cap on refinements before :class:`MeshConvergenceError`

    Returns
    -------
    EigenResult
        ``E`` is the Richardson value (16 E_2N - E_N) / 15 (the recurrence is
        fourth order), ``mesh_error_estimate`` = |E_2N - E_N| / 15, and the
        bracket, node count and endpoint residual refer to the finest mesh.

    Notes
    -----
    The initial bracket is [0.5, 2.0] times the semiclassical energy and is
    expanded automatically if the node counts do not straddle n_r.  Finer
    meshes restart from a narrow window around the previous mesh's eigenvalue,
    which the same expansion logic widens when needed.
    """
    e_hint = solve_wkb(qn, problem).E
    n = n_intervals
    res_prev = solve_on_mesh(
        qn,
        problem,
        build_mesh(problem, e_hint, n),
        (0.5 * e_hint, 2.0 * e_hint),
        rel_tol=rel_tol,
    )
    for _ in range(max_doublings):
        n *= 2
        warm = (res_prev.E * (1.0 - 1e-4), res_prev.E * (1.0 + 1e-4))
        res_next = solve_on_mesh(
            qn, problem, build_mesh(problem, e_hint, n), warm, rel_tol=rel_tol
        )
        if abs(res_next.E - res_prev.E) <= mesh_rel_tol * abs(res_next.E):
            richardson = (16.0 * res_next.E - res_prev.E) / 15.0
            estimate = abs(res_next.E - res_prev.E) / 15.0
            # widen the finest-mesh bracket by the extrapolation shift so the
            # reported interval still contains the returned energy
            lo, hi = res_next.bracket
            return EigenResult(
                E=richardson,
                node_count=res_next.node_count,
                bracket=(min(lo, richardson - estimate), max(hi, richardson + estimate)),
                endpoint_residual=res_next.endpoint_residual,
                mesh_error_estimate=estimate,
                n_intervals_used=n,
            )
        res_prev = res_next
    raise MeshConvergenceError(
        f"mesh not converged after {max_doublings} doublings (last N={n})"
    )


def wavefunction_exact(
    result: EigenResult, mesh: LogMesh, problem: RadialProblem
) -> RadialWavefunction:
    """Sample the solved state on a mesh and normalize integral |psi|^2 r dr = 1.

    ``result`` should come from :func:`solve_exact` (or :func:`solve_on_mesh`)
    on the same problem; any mesh that reaches the wall and extends well below
    the turning point works, e.g. ``build_mesh(problem, result.E,
    result.n_intervals_used)``.
    """
    _endpoint, _nodes, chi = numerov_propagate(result.E, mesh, problem)
    w = mesh.points()
    # integral |psi|^2 r dr = integral chi^2 e^{2w} dw on the mesh
    norm_sq = np.trapezoid(chi * chi * np.exp(2.0 * w), w)
    chi = chi / math.sqrt(norm_sq)
    r = np.exp(w)
    u = np.exp(0.5 * w) * chi
    return RadialWavefunction(mesh=mesh, r=r, chi=chi, u=u, psi=chi.copy())
