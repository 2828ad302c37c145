"""Bound states of a hard-wall circular dot with a central point charge.

Two solvers share one dimensionless problem definition (hbar = 1, 2*mu = 1):
a semiclassical one that quantizes the phase integral between the inner
turning point and the wall, and an exact one that shoots the Numerov
recurrence on a logarithmic mesh.  The report module recomputes the bundled
reference tables with both and grades the agreement.
"""

from .errors import (
    BracketingError,
    MeshConvergenceError,
    NoClassicalRegionError,
    QdotError,
    ReportIOError,
    TurningPointProximityError,
)
from .model import (
    CentrifugalConvention,
    EigenResult,
    QuantumNumbers,
    RadialProblem,
    effective_potential,
    scale_problem,
    turning_point,
)
from .numerov import (
    DEFAULT_INTERVALS,
    LogMesh,
    RadialWavefunction,
    build_mesh,
    gamma_sq_w,
    numerov_propagate,
    solve_exact,
    solve_on_mesh,
    wavefunction_exact,
)
from .report import (
    TABLES,
    ReproductionReport,
    RowResult,
    TableRow,
    Tolerances,
    audit_units,
    emit,
    reproduce_table,
)
from .wkb import (
    ActionMethod,
    ActionResult,
    WkbWavefunction,
    action_closed_form,
    action_quadrature,
    action_quadrature_w,
    quantization_residual,
    solve_wkb,
    wkb_wavefunction_eval,
)

__version__ = "0.1.0"

__all__ = [
    "ActionMethod",
    "ActionResult",
    "BracketingError",
    "CentrifugalConvention",
    "DEFAULT_INTERVALS",
    "EigenResult",
    "LogMesh",
    "MeshConvergenceError",
    "NoClassicalRegionError",
    "QdotError",
    "QuantumNumbers",
    "RadialProblem",
    "RadialWavefunction",
    "ReportIOError",
    "ReproductionReport",
    "RowResult",
    "TABLES",
    "TableRow",
    "Tolerances",
    "TurningPointProximityError",
    "WkbWavefunction",
    "action_closed_form",
    "action_quadrature",
    "action_quadrature_w",
    "audit_units",
    "build_mesh",
    "effective_potential",
    "emit",
    "gamma_sq_w",
    "numerov_propagate",
    "quantization_residual",
    "reproduce_table",
    "scale_problem",
    "solve_exact",
    "solve_on_mesh",
    "solve_wkb",
    "turning_point",
    "wavefunction_exact",
    "wkb_wavefunction_eval",
    "__version__",
]
