"""Dimensionless radial problem for a hard-wall circular dot with a central charge.

A single electron moves in a disc of radius ``r0`` bounded by an impenetrable
wall, repelled by a fixed point charge at the centre.  Everything here uses the
convention hbar = 1, 2*mu = 1, in which the radial equation for u(r) = sqrt(r)*psi(r)
reads

    u'' + [E - Z/r - c/r^2] u = 0,       u(r0) = 0,

with c = m^2 for the semiclassical (conformally mapped) form and c = m^2 - 1/4
for the physical two-dimensional form.  Energies scale as E -> E/lambda^2 under
(r0, Z) -> (lambda*r0, Z/lambda); see :func:`scale_problem`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import NoClassicalRegionError


class CentrifugalConvention(Enum):
    """Coefficient of the 1/r^2 term in the radial u-equation."""

    WKB_MODIFIED = "wkb_modified"  # m^2, induced by the conformal map r = e^w
    PHYSICAL_2D = "physical_2d"    # m^2 - 1/4, the bare two-dimensional reduction


@dataclass(frozen=True)
class RadialProblem:
    """Hard-wall dot of radius ``r0`` with Coulomb strength ``coulomb_strength``.

    ``coulomb_strength`` (Z) is the coefficient of the 1/r repulsion; Z = 0
    gives the free particle in a disc, whose levels are Bessel zeros.  The
    azimuthal number ``m`` may carry either sign; only ``|m|`` enters any
    formula.
    """

    r0: float
    coulomb_strength: float = 1.0
    m: int = 0

    def __post_init__(self):
        if not (self.r0 > 0.0):
            raise ValueError(f"wall radius must be positive, got r0={self.r0}")
        if self.coulomb_strength < 0.0:
            raise ValueError(
                f"coulomb strength must be non-negative, got {self.coulomb_strength}"
            )

    @property
    def m_abs(self) -> int:
        return abs(self.m)


@dataclass(frozen=True)
class QuantumNumbers:
    """Level selector: radial node count ``n_r`` and azimuthal number ``m``."""

    n_r: int
    m: int = 0

    def __post_init__(self):
        if self.n_r < 0:
            raise ValueError(f"n_r must be non-negative, got {self.n_r}")


@dataclass(frozen=True)
class EigenResult:
    """An energy eigenvalue plus solver diagnostics.

    ``bracket`` is an energy interval known to contain the root,
    ``endpoint_residual`` the boundary residual at the returned energy
    (quantization residual for the WKB solver, wall value of chi scaled to
    max|chi| = 1 for the exact solver).  ``mesh_error_estimate`` is the
    Richardson error estimate |E_2N - E_N| / 15; it is 0 for the WKB solver,
    which has no mesh (``n_intervals_used`` = 0 there as well).
    """

    E: float
    node_count: int
    bracket: tuple[float, float]
    endpoint_residual: float
    mesh_error_estimate: float
    n_intervals_used: int


def effective_potential(
    rho: float,
    problem: RadialProblem,
    convention: CentrifugalConvention = CentrifugalConvention.WKB_MODIFIED,
) -> float:
    """Potential Z/rho + c/rho^2 felt by u(rho), with c set by the convention."""
    if rho <= 0.0:
        raise ValueError(f"radius must be positive, got rho={rho}")
    m2 = float(problem.m_abs**2)
    if convention is CentrifugalConvention.PHYSICAL_2D:
        c = m2 - 0.25
    else:
        c = m2
    return problem.coulomb_strength / rho + c / (rho * rho)


def turning_point(E: float, problem: RadialProblem, *, enforce_wall: bool = True) -> float:
    """Classical turning radius: largest root of E*rho^2 - Z*rho - m^2 = 0.

    Uses the semiclassical (m^2) convention.  For Z = 0 and m = 0 the
    allowed region extends to the origin and 0.0 is returned.  With
    ``enforce_wall`` the root must lie inside the wall, otherwise there is
    no classically allowed region and :class:`NoClassicalRegionError` is
    raised.
    """
    if E <= 0.0:
        raise ValueError(f"energy must be positive, got E={E}")
    z = problem.coulomb_strength
    m2 = float(problem.m_abs**2)
    if z == 0.0 and m2 == 0.0:
        return 0.0
    rt = (z + math.sqrt(z * z + 4.0 * E * m2)) / (2.0 * E)
    if enforce_wall and rt >= problem.r0:
        raise NoClassicalRegionError(
            f"no classically allowed region: turning point {rt:.6g} >= wall {problem.r0:.6g} "
            f"(E={E:.6g} does not exceed the wall potential)"
        )
    return rt


def scale_problem(problem: RadialProblem, lam: float) -> RadialProblem:
    """Similarity transform (r0, Z) -> (lam*r0, Z/lam); every level scales by 1/lam^2."""
    if lam <= 0.0:
        raise ValueError(f"scale factor must be positive, got {lam}")
    return replace(
        problem, r0=lam * problem.r0, coulomb_strength=problem.coulomb_strength / lam
    )
