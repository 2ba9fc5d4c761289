"""
Exception hierarchy for biphoton-design.

Validation problems derive from :class:`ConfigurationError` or
:class:`MaterialDatabaseError`; failures of the physics itself (a wavelength
outside a Sellmeier range, an unrealizable incidence angle, a degenerate
spectrum) derive from :class:`PhysicsError`. The command-line layer maps the
two families onto distinct exit codes.
"""

from typing import Any


class BiphotonDesignError(Exception):
    """Root of all errors raised by biphoton-design."""


class ConfigurationError(BiphotonDesignError, ValueError):
    """Raised when a run configuration, target set or option is invalid."""


class MaterialDatabaseError(BiphotonDesignError, ValueError):
    """Raised when a material database entry is malformed."""


class PhysicsError(BiphotonDesignError):
    """Raised when a design or simulation is physically impossible."""


class DispersionRangeError(PhysicsError, ValueError):
    """Raised when a frequency maps outside a Sellmeier branch's valid range."""

    def __init__(
        self,
        message: str,
        *,
        branch: str | None = None,
        valid_range: tuple[float, float] | None = None,
        grid_index: tuple[int, ...] | None = None,
    ) -> None:
        super().__init__(message)
        self.branch = branch
        self.valid_range = valid_range
        self.grid_index = grid_index


class DegenerateDesignError(PhysicsError):
    """Raised when the spectral-bandwidth radicand is not positive."""

    def __init__(self, message: str, radicand: float) -> None:
        super().__init__(message)
        self.radicand = radicand


class NoRealAngleError(PhysicsError):
    """Raised when |k_p c| exceeds n_p ω_p so no real incidence angle exists."""

    def __init__(self, message: str, sin_theta: float) -> None:
        super().__init__(message)
        self.sin_theta = sin_theta


class SingularMappingError(PhysicsError):
    """Raised when the linearized pump-to-photon map cannot be inverted."""


class DegenerateSpectrumError(PhysicsError):
    """Raised when a joint spectral amplitude carries no power."""


class UnusablePathwayError(PhysicsError):
    """Raised when a nonlinear pathway has a zero or missing χ⁽²⁾ element."""


class CalibrationError(PhysicsError):
    """Raised when no calibration candidate reproduces the reference table."""

    def __init__(self, message: str, best: Any = None) -> None:
        super().__init__(message)
        self.best = best


__all__ = [
    "BiphotonDesignError",
    "ConfigurationError",
    "MaterialDatabaseError",
    "PhysicsError",
    "DispersionRangeError",
    "DegenerateDesignError",
    "NoRealAngleError",
    "SingularMappingError",
    "DegenerateSpectrumError",
    "UnusablePathwayError",
    "CalibrationError",
]
