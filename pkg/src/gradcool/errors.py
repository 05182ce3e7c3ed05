"""Exception types raised across the package."""


class GradCoolError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GradCoolError):
    """Invalid parameter value, option combination, or config file."""


class DimensionError(GradCoolError):
    """Operator/state dimension mismatch."""


class TruncationError(GradCoolError):
    """Fock-space truncation is too small for the requested operation or state."""


class IntegratorError(GradCoolError):
    """Time integration failed (step control, solver breakdown)."""


class DegenerateSteadyStateError(GradCoolError):
    """The Liouvillian has more than one stationary state."""


class SingularResolventError(GradCoolError):
    """The shifted Liouvillian (L + i*omega) is numerically singular."""


class ConvergenceError(GradCoolError):
    """An iterative numerical procedure failed to converge."""


class FitError(GradCoolError):
    """Rate extraction failed (window too short or residual too large)."""


class BracketError(GradCoolError):
    """A 1-d search bracket does not contain an interior optimum."""
