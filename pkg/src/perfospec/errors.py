"""Exception types shared across the package."""


class PerfospecError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(PerfospecError, ValueError):
    """A parameter or configuration value violates its contract."""


class ResolutionError(ValidationError):
    """The requested grid resolution does not tile the box exactly."""


class EmptyDomainError(PerfospecError, RuntimeError):
    """Every grid cell is occupied; there is no operator to assemble."""


class FactorizationError(PerfospecError, RuntimeError):
    """Symmetric factorization broke down and no fallback succeeded."""


class EigensolverError(PerfospecError, RuntimeError):
    """Iterative eigensolver failed to reach the requested residual."""

    def __init__(self, message: str, achieved_residual: float | None = None):
        super().__init__(message)
        self.achieved_residual = achieved_residual


class DegenerateWindowError(ValidationError):
    """A fit window contains too few usable points or undefined transforms."""


class HypothesisViolationError(ValidationError):
    """The obstacle volume fraction is >= 1, so no certificate exists."""


class EmptyFamilyError(ValidationError):
    """No trial function fits below the requested energy level."""
