"""
Pump-pulse design module.

Turns the four target numbers (center frequencies ω°_s, ω°_i and amplitude
bandwidths σ_s, σ_i) plus the material dispersion into the pump recipe
(ω_p, k_p, A, B, C, θ) and evaluates the engineered pump envelope Ẽ_p(k, ω)
both in its native double-Gaussian form and in the simplified A/B/C form.

The envelope is real and positive; carrier phase and the relative phase of
polarization components belong to :mod:`biphoton_design.polarization`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from biphoton_design.dispersion import (
    SPEED_OF_LIGHT,
    AxisAssignment,
    Branch,
    FloatOrArray,
    Material,
    beta,
    beta_prime,
    refractive_index,
    wavelength_to_omega,
)
from biphoton_design.errors import (
    ConfigurationError,
    DegenerateDesignError,
    NoRealAngleError,
)

logger = logging.getLogger(__name__)


# Multipliers of c/l_c for converting a coherence length to σ.
COHERENCE_CONVENTIONS: dict[str, float] = {
    "c/lc": 1.0,
    "2c/lc": 2.0,
    "pi*c/lc": math.pi,
    "2pi*c/lc": 2.0 * math.pi,
    "sqrt2*c/lc": math.sqrt(2.0),
}

# Selected by the reference-table calibration (see biphoton_design.calibration).
DEFAULT_CONVENTION = "2pi*c/lc"


def bandwidth_from_coherence_length(coherence_length: float, convention: str = DEFAULT_CONVENTION) -> float:
    """
    Convert a coherence length to an amplitude bandwidth σ.

    Args:
        coherence_length: Coherence length l_c in metres.
        convention: One of :data:`COHERENCE_CONVENTIONS`.

    Returns:
        σ = factor · c / l_c in rad/s.

    Raises:
        ConfigurationError: If the convention is unknown or l_c is not positive.
    """
    if convention not in COHERENCE_CONVENTIONS:
        raise ConfigurationError(
            f"Unknown coherence-length convention {convention!r}; "
            f"expected one of {sorted(COHERENCE_CONVENTIONS)}"
        )
    if not coherence_length > 0:
        raise ConfigurationError(f"coherence length must be > 0, got {coherence_length!r}")
    return COHERENCE_CONVENTIONS[convention] * SPEED_OF_LIGHT / coherence_length


@dataclass(frozen=True)
class DesignTargets:
    """
    Requested marginal spectra of the photon pair.

    Attributes:
        omega_s: Signal center frequency ω°_s (rad/s).
        omega_i: Idler center frequency ω°_i (rad/s).
        sigma_s: Signal amplitude bandwidth σ_s (rad/s).
        sigma_i: Idler amplitude bandwidth σ_i (rad/s).
        branches: Index branches of pump, signal and idler.
    """

    omega_s: float
    omega_i: float
    sigma_s: float
    sigma_i: float
    branches: AxisAssignment = field(
        default_factory=lambda: AxisAssignment(Branch.ORDINARY, Branch.ORDINARY, Branch.ORDINARY)
    )

    def __post_init__(self) -> None:
        for name in ("omega_s", "omega_i", "sigma_s", "sigma_i"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(f"{name} must be a number, got {type(value)!r}")
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not isinstance(self.branches, AxisAssignment):
            raise ConfigurationError("branches must be an AxisAssignment")

    @classmethod
    def from_wavelengths(
        cls,
        signal_wavelength: float,
        idler_wavelength: float,
        signal_coherence_length: float,
        idler_coherence_length: float,
        branches: AxisAssignment | None = None,
        convention: str = DEFAULT_CONVENTION,
    ) -> "DesignTargets":
        """Build targets from vacuum wavelengths (m) and coherence lengths (m)."""
        for name, value in (
            ("signal_wavelength", signal_wavelength),
            ("idler_wavelength", idler_wavelength),
        ):
            if not value > 0:
                raise ConfigurationError(f"{name} must be > 0, got {value!r}")
        kwargs: dict[str, Any] = {}
        if branches is not None:
            kwargs["branches"] = branches
        return cls(
            omega_s=float(wavelength_to_omega(signal_wavelength)),
            omega_i=float(wavelength_to_omega(idler_wavelength)),
            sigma_s=bandwidth_from_coherence_length(signal_coherence_length, convention),
            sigma_i=bandwidth_from_coherence_length(idler_coherence_length, convention),
            **kwargs,
        )

    @property
    def omega_p(self) -> float:
        """Pump center frequency ω_p = ω°_s + ω°_i."""
        return self.omega_s + self.omega_i

    def with_branches(self, branches: AxisAssignment) -> "DesignTargets":
        return replace(self, branches=branches)

    def swapped(self) -> "DesignTargets":
        """Exchange the roles of signal and idler."""
        return DesignTargets(
            omega_s=self.omega_i,
            omega_i=self.omega_s,
            sigma_s=self.sigma_i,
            sigma_i=self.sigma_s,
            branches=AxisAssignment(
                pump=self.branches.pump,
                signal=self.branches.idler,
                idler=self.branches.signal,
            ),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega_s": self.omega_s,
            "omega_i": self.omega_i,
            "sigma_s": self.sigma_s,
            "sigma_i": self.sigma_i,
            "branches": self.branches.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DesignTargets":
        return cls(
            omega_s=data["omega_s"],
            omega_i=data["omega_i"],
            sigma_s=data["sigma_s"],
            sigma_i=data["sigma_i"],
            branches=AxisAssignment.from_dict(data["branches"]),
        )


@dataclass(frozen=True)
class PumpRecipe:
    """
    Pump parameters for one pump polarization component.

    Attributes:
        omega_p: Pump center frequency (rad/s).
        k_p: β_i(ω°_i) − β_s(ω°_s) (rad/m).
        n_p: Pump index at ω_p.
        beta_prime_s: Signal β′ at ω°_s (s/m).
        beta_prime_i: Idler β′ at ω°_i (s/m).
        A: Spectral bandwidth (rad/s).
        B: Spatial bandwidth (rad/m).
        C: Shear coefficient (s/m).
        theta: External incidence angle (rad).
        targets: Targets the recipe was designed for.
        material: Material name.
        convention: Coherence-length convention used to build the targets, if any.
    """

    omega_p: float
    k_p: float
    n_p: float
    beta_prime_s: float
    beta_prime_i: float
    A: float
    B: float
    C: float
    theta: float
    targets: DesignTargets
    material: str = ""
    convention: str | None = None

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    @property
    def beta_prime_sum(self) -> float:
        """β′ = β′_s + β′_i, the scale of the native envelope."""
        return self.beta_prime_s + self.beta_prime_i

    @property
    def k_center(self) -> float:
        """Envelope center along k, k_p / n_p."""
        return self.k_p / self.n_p


# ---------------------------------------------------------------------------
# Design relations
# ---------------------------------------------------------------------------

def derive_center_params(targets: DesignTargets, material: Material) -> tuple[float, float, float]:
    """
    Center parameters of the pump.

    Args:
        targets: Design targets.
        material: Nonlinear material.

    Returns:
        ``(ω_p, k_p, n_p)`` with ω_p = ω°_s + ω°_i, k_p = β_i(ω°_i) − β_s(ω°_s)
        and n_p the pump index at ω_p.

    Raises:
        DispersionRangeError: If any of the three frequencies is out of range.
    """
    branches = targets.branches
    omega_p = targets.omega_p
    k_p = beta(material, branches.idler, targets.omega_i) - beta(
        material, branches.signal, targets.omega_s
    )
    n_p = refractive_index(material, branches.pump, omega_p)
    return omega_p, float(k_p), float(n_p)


def _abc(
    beta_prime_s: float, beta_prime_i: float, sigma_s: float, sigma_i: float, n_p: float
) -> tuple[float, float, float]:
    bs, bi = beta_prime_s, beta_prime_i
    ss2, si2 = sigma_s**2, sigma_i**2
    total = bs + bi
    mismatch = bs * ss2 - bi * si2

    radicand = (bs / sigma_i) ** 2 + (bi / sigma_s) ** 2 - mismatch**2 / (ss2 * si2 * (ss2 + si2))
    if not radicand > 0 or not total > 0:
        raise DegenerateDesignError(
            f"spectral-bandwidth radicand is not positive (radicand={radicand!r}, "
            f"β′_s + β′_i={total!r}); the design is degenerate",
            radicand=float(radicand),
        )

    A = total / math.sqrt(radicand)
    B = total / (n_p * math.sqrt(1.0 / ss2 + 1.0 / si2))
    C = mismatch / (n_p * (ss2 + si2))
    return A, B, C


def compute_abc(targets: DesignTargets, material: Material) -> tuple[float, float, float]:
    """
    Spectral bandwidth A, spatial bandwidth B and shear C.

    Raises:
        DegenerateDesignError: If the spectral-bandwidth radicand is not positive.
    """
    _, _, n_p = derive_center_params(targets, material)
    bs = float(beta_prime(material, targets.branches.signal, targets.omega_s))
    bi = float(beta_prime(material, targets.branches.idler, targets.omega_i))
    return _abc(bs, bi, targets.sigma_s, targets.sigma_i, n_p)


def incidence_angle(k_p: float, n_p: float, omega_p: float) -> float:
    """
    External incidence angle θ = asin(k_p c / (n_p ω_p)).

    Raises:
        NoRealAngleError: If |k_p c| > n_p ω_p.
    """
    sin_theta = k_p * SPEED_OF_LIGHT / (n_p * omega_p)
    if abs(sin_theta) > 1.0:
        raise NoRealAngleError(
            f"incidence-angle relation has no real solution: sin θ = {sin_theta:.6g}",
            sin_theta=sin_theta,
        )
    return math.asin(sin_theta)


def design_recipe(
    targets: DesignTargets,
    material: Material,
    convention: str | None = None,
) -> PumpRecipe:
    """Derive the full pump recipe (center, bandwidths, shear, angle)."""
    omega_p, k_p, n_p = derive_center_params(targets, material)
    bs = float(beta_prime(material, targets.branches.signal, targets.omega_s))
    bi = float(beta_prime(material, targets.branches.idler, targets.omega_i))
    A, B, C = _abc(bs, bi, targets.sigma_s, targets.sigma_i, n_p)
    theta = incidence_angle(k_p, n_p, omega_p)
    logger.info(
        "Designed pump for %s (%s): omega_p=%.6g rad/s, k_p=%.6g rad/m, theta=%.4g deg",
        material.name,
        targets.branches.code,
        omega_p,
        k_p,
        math.degrees(theta),
    )
    return PumpRecipe(
        omega_p=omega_p,
        k_p=k_p,
        n_p=n_p,
        beta_prime_s=bs,
        beta_prime_i=bi,
        A=A,
        B=B,
        C=C,
        theta=theta,
        targets=targets,
        material=material.name,
        convention=convention,
    )


# ---------------------------------------------------------------------------
# Envelopes
# ---------------------------------------------------------------------------

def pump_envelope(recipe: PumpRecipe, targets: DesignTargets, k: ArrayLike, omega: ArrayLike) -> FloatOrArray:
    """
    Engineered double-Gaussian pump envelope, unnormalized (peak value 1).

    Args:
        recipe: Pump recipe providing ω_p, k_p, n_p and β′_s, β′_i.
        targets: Targets providing σ_s and σ_i.
        k: Pump wavevector component along the waveguide (rad/m).
        omega: Pump frequency (rad/s).
    """
    k = np.asarray(k, dtype=float)
    omega = np.asarray(omega, dtype=float)
    # n_p k − k_p, written about the envelope center
    kappa = recipe.n_p * (k - recipe.k_center)
    w = omega - recipe.omega_p
    scale = 2.0 * recipe.beta_prime_sum
    exponent = -(((kappa + w * recipe.beta_prime_s) / (scale * targets.sigma_i)) ** 2) - (
        ((kappa - w * recipe.beta_prime_i) / (scale * targets.sigma_s)) ** 2
    )
    result = np.exp(exponent)
    return float(result) if result.ndim == 0 else result


def pump_envelope_factored(recipe: PumpRecipe, k: ArrayLike, omega: ArrayLike) -> FloatOrArray:
    """Pump envelope in the A, B, C form."""
    k = np.asarray(k, dtype=float)
    omega = np.asarray(omega, dtype=float)
    w = omega - recipe.omega_p
    exponent = -((w / (2.0 * recipe.A)) ** 2) - (
        ((k - recipe.k_center) + recipe.C * w) / (2.0 * recipe.B)
    ) ** 2
    result = np.exp(exponent)
    return float(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class BasePulse:
    """Unsheared product Gaussian: center ω_p and k_center, widths A and B."""

    omega_p: float
    k_center: float
    A: float
    B: float

    @classmethod
    def from_recipe(cls, recipe: PumpRecipe) -> "BasePulse":
        return cls(omega_p=recipe.omega_p, k_center=recipe.k_center, A=recipe.A, B=recipe.B)

    def envelope(self, k: ArrayLike, omega: ArrayLike) -> FloatOrArray:
        k = np.asarray(k, dtype=float)
        omega = np.asarray(omega, dtype=float)
        exponent = -(((omega - self.omega_p) / (2.0 * self.A)) ** 2) - (
            (k - self.k_center) / (2.0 * self.B)
        ) ** 2
        result = np.exp(exponent)
        return float(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class ShearPlan:
    """A pulse-shaping plan: base pulse followed by k → k + C(ω − ω_p)."""

    base: BasePulse
    C: float
    omega_p: float

    @property
    def is_sheared(self) -> bool:
        return self.C != 0.0

    def base_envelope(self, k: ArrayLike, omega: ArrayLike) -> FloatOrArray:
        return self.base.envelope(k, omega)

    def envelope(self, k: ArrayLike, omega: ArrayLike) -> FloatOrArray:
        """Base envelope evaluated at the substituted wavevector."""
        k = np.asarray(k, dtype=float)
        omega = np.asarray(omega, dtype=float)
        return self.base.envelope(k + self.C * (omega - self.omega_p), omega)


def shear_substitution(base: BasePulse, C: float, omega_p: float) -> ShearPlan:
    """
    Apply the dispersive shear k → k + C(ω − ω_p) to a base pulse.

    Raises:
        ConfigurationError: If ``C`` is not finite.
    """
    if not math.isfinite(C):
        raise ConfigurationError(f"shear coefficient C must be finite, got {C!r}")
    return ShearPlan(base=base, C=float(C), omega_p=float(omega_p))


@dataclass(frozen=True)
class CrossSpectrallyPurePump:
    """
    Normally incident pump whose envelope factors into space and time parts.

    Ẽ_p(k, ω) = exp[−((ω − ω_p)σ_x / 2c)² − (k σ_z / 2)²].

    Attributes:
        center_frequency: ω_p (rad/s).
        sigma_x: Temporal coherence length (m).
        sigma_z: Spatial coherence length (m).
    """

    center_frequency: float
    sigma_x: float
    sigma_z: float

    def __post_init__(self) -> None:
        for name in ("center_frequency", "sigma_x", "sigma_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def spectral_bandwidth(self) -> float:
        """Equivalent A = c / σ_x."""
        return SPEED_OF_LIGHT / self.sigma_x

    @property
    def spatial_bandwidth(self) -> float:
        """Equivalent B = 1 / σ_z."""
        return 1.0 / self.sigma_z

    def envelope(self, k: ArrayLike, omega: ArrayLike) -> FloatOrArray:
        k = np.asarray(k, dtype=float)
        omega = np.asarray(omega, dtype=float)
        exponent = -(((omega - self.center_frequency) * self.sigma_x / (2.0 * SPEED_OF_LIGHT)) ** 2) - (
            k * self.sigma_z / 2.0
        ) ** 2
        result = np.exp(exponent)
        return float(result) if result.ndim == 0 else result

    @classmethod
    def from_recipe(cls, recipe: PumpRecipe) -> "CrossSpectrallyPurePump":
        """Express an unsheared, normally incident recipe as a pure pump.

        Raises:
            ConfigurationError: If the recipe is sheared or not at normal incidence.
        """
        if recipe.C != 0.0 or recipe.k_p != 0.0:
            raise ConfigurationError(
                "only recipes with C = 0 and k_p = 0 are cross-spectrally pure"
            )
        return cls(
            center_frequency=recipe.omega_p,
            sigma_x=SPEED_OF_LIGHT / recipe.A,
            sigma_z=1.0 / recipe.B,
        )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def recipe_to_dict(recipe: PumpRecipe) -> dict[str, Any]:
    """Serialize a recipe with SI floats at full precision."""
    return {
        "omega_p": recipe.omega_p,
        "k_p": recipe.k_p,
        "n_p": recipe.n_p,
        "beta_prime_s": recipe.beta_prime_s,
        "beta_prime_i": recipe.beta_prime_i,
        "A": recipe.A,
        "B": recipe.B,
        "C": recipe.C,
        "theta_deg": recipe.theta_deg,
        "convention": recipe.convention,
        "material": recipe.material,
        "branches": recipe.targets.branches.to_dict(),
        "targets": recipe.targets.to_dict(),
    }


def recipe_from_dict(data: Mapping[str, Any]) -> PumpRecipe:
    """Rebuild a recipe written by :func:`recipe_to_dict`."""
    required = {"omega_p", "k_p", "n_p", "beta_prime_s", "beta_prime_i", "A", "B", "C", "theta_deg", "targets"}
    missing = required - set(data)
    if missing:
        raise ConfigurationError(f"recipe document is missing keys: {sorted(missing)}")
    return PumpRecipe(
        omega_p=float(data["omega_p"]),
        k_p=float(data["k_p"]),
        n_p=float(data["n_p"]),
        beta_prime_s=float(data["beta_prime_s"]),
        beta_prime_i=float(data["beta_prime_i"]),
        A=float(data["A"]),
        B=float(data["B"]),
        C=float(data["C"]),
        theta=math.radians(float(data["theta_deg"])),
        targets=DesignTargets.from_dict(data["targets"]),
        material=str(data.get("material", "")),
        convention=data.get("convention"),
    )


__all__ = [
    "COHERENCE_CONVENTIONS",
    "DEFAULT_CONVENTION",
    "bandwidth_from_coherence_length",
    "DesignTargets",
    "PumpRecipe",
    "derive_center_params",
    "compute_abc",
    "incidence_angle",
    "design_recipe",
    "pump_envelope",
    "pump_envelope_factored",
    "BasePulse",
    "ShearPlan",
    "shear_substitution",
    "CrossSpectrallyPurePump",
    "recipe_to_dict",
    "recipe_from_dict",
]
