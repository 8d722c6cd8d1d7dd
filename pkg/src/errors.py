"""
Exception hierarchy for hypgluing.
Everything derives from ValueError so callers catching ValueError keep working.
"""
from typing import Any, Optional


class HypGluingError(ValueError):
    """Base class for all library errors."""


class TriangulationError(HypGluingError):
    """Malformed or invalid triangulation data."""


class DegenerateConfigurationError(HypGluingError):
    """Coincident ideal points, or a shape parameter at 0, 1 or infinity."""


class SingularJacobianError(HypGluingError):
    """Newton step cannot be computed."""

    def __init__(self, message: str, singular_values: Optional[Any] = None):
        super().__init__(message)
        self.singular_values = singular_values


class NewtonConvergenceError(HypGluingError):
    """Newton iteration stopped without reaching the tolerance."""

    def __init__(self, message: str, best: Any = None, residual: float = float("inf")):
        super().__init__(message)
        self.best = best
        self.residual = residual


class RepresentationError(HypGluingError):
    """Unknown generator label or malformed matrix data."""


class PlacementError(HypGluingError):
    """No nondegenerate vertex placement found within the allowed attempts."""


class HolonomyError(HypGluingError):
    """Developed holonomy fails the relator check."""


class FormatError(HypGluingError):
    """Malformed solution, representation or sidecar file."""
