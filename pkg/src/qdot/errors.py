"""Exception types shared across the solver modules."""


class QdotError(Exception):
    """Base class for all solver errors."""


class NoClassicalRegionError(QdotError):
    """The energy lies at or below the wall potential: no classically allowed region."""


class TurningPointProximityError(QdotError):
    """WKB wavefunction requested within the excluded neighborhood of the turning point."""


class BracketingError(QdotError):
    """An eigenvalue bracket search was exhausted without isolating a root."""


class MeshConvergenceError(QdotError):
    """Mesh doubling reached its cap before the eigenvalue converged."""


class ReportIOError(QdotError):
    """Writing a report artifact failed; the message carries the destination path."""
