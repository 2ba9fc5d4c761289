"""
Joint spectral amplitude module.

Evaluates the two-photon joint spectral amplitude φ(ω_i, ω_s) produced by a
pump envelope, either by direct substitution into the pump (the oracle, with
exact or linearized dispersion) or from the separable closed form, and
quantifies frequency correlation through marginals, a Schmidt decomposition
and the Pearson coefficient of |φ|².

Grid values are stored with rows indexed by ω_i and columns by ω_s, the same
layout the CSV export uses.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import eval_hermite

from biphoton_design.dispersion import (
    AxisAssignment,
    FloatOrArray,
    Material,
    beta,
    beta_prime,
    refractive_index,
)
from biphoton_design.errors import (
    ConfigurationError,
    DegenerateSpectrumError,
    DispersionRangeError,
    SingularMappingError,
)
from biphoton_design.pump import DesignTargets, PumpRecipe, pump_envelope_factored

logger = logging.getLogger(__name__)

PumpEvaluator = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]

MIN_GRID_POINTS = 16
DISPERSION_MODES = ("full", "linearized")
PROVENANCES = ("oracle-full", "oracle-linearized", "closed-form", "imported")


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform signal/idler frequency axes (rad/s)."""

    omega_s: NDArray[np.float64]
    omega_i: NDArray[np.float64]

    def __post_init__(self) -> None:
        for name in ("omega_s", "omega_i"):
            axis = np.asarray(getattr(self, name), dtype=float)
            if axis.ndim != 1 or axis.size < MIN_GRID_POINTS:
                raise ConfigurationError(
                    f"{name} axis needs at least {MIN_GRID_POINTS} points, got shape {axis.shape}"
                )
            if not np.all(np.isfinite(axis)):
                raise ConfigurationError(f"{name} axis must be finite")
            steps = np.diff(axis)
            if np.any(steps <= 0):
                raise ConfigurationError(f"{name} axis must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
                raise ConfigurationError(f"{name} axis must be uniformly spaced")
            axis.setflags(write=False)
            object.__setattr__(self, name, axis)

    @classmethod
    def centered(
        cls,
        targets: DesignTargets,
        n: int = 256,
        span_sigma: float = 5.0,
        n_i: int | None = None,
    ) -> "FrequencyGrid":
        """Grid spanning ±``span_sigma``·σ around the target centers.

        Args:
            targets: Design targets supplying centers and bandwidths.
            n: Points on the signal axis (and the idler axis unless ``n_i``).
            span_sigma: Half-width of each axis in units of that photon's σ.
            n_i: Optional separate point count for the idler axis.
        """
        n_i = n if n_i is None else n_i
        for name, value in (("n", n), ("n_i", n_i)):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"{name} must be an integer")
            if value < MIN_GRID_POINTS:
                raise ConfigurationError(f"{name} must be >= {MIN_GRID_POINTS}, got {value}")
        if not span_sigma > 0:
            raise ConfigurationError(f"span_sigma must be > 0, got {span_sigma!r}")
        half_s = span_sigma * targets.sigma_s
        half_i = span_sigma * targets.sigma_i
        return cls(
            omega_s=np.linspace(targets.omega_s - half_s, targets.omega_s + half_s, n),
            omega_i=np.linspace(targets.omega_i - half_i, targets.omega_i + half_i, n_i),
        )

    @property
    def shape(self) -> tuple[int, int]:
        """``(N_i, N_s)``."""
        return (self.omega_i.size, self.omega_s.size)

    @property
    def d_omega_s(self) -> float:
        return float((self.omega_s[-1] - self.omega_s[0]) / (self.omega_s.size - 1))

    @property
    def d_omega_i(self) -> float:
        return float((self.omega_i[-1] - self.omega_i[0]) / (self.omega_i.size - 1))

    @property
    def cell_measure(self) -> float:
        return self.d_omega_s * self.d_omega_i

    @property
    def centers(self) -> tuple[float, float]:
        """Axis midpoints ``(ω_s, ω_i)``."""
        return (
            0.5 * float(self.omega_s[0] + self.omega_s[-1]),
            0.5 * float(self.omega_i[0] + self.omega_i[-1]),
        )

    def mesh(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Return ``(W_i, W_s)`` arrays of shape ``(N_i, N_s)``."""
        return np.meshgrid(self.omega_i, self.omega_s, indexing="ij")

    def trapezoid_weights(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Per-axis trapezoid weights ``(w_i, w_s)``."""
        return _trapezoid_weights(self.omega_i.size, self.d_omega_i), _trapezoid_weights(
            self.omega_s.size, self.d_omega_s
        )

    def refined(self, factor: int = 2) -> "FrequencyGrid":
        """Same span with ``factor`` times as many intervals per axis."""
        return FrequencyGrid(
            omega_s=np.linspace(self.omega_s[0], self.omega_s[-1], (self.omega_s.size - 1) * factor + 1),
            omega_i=np.linspace(self.omega_i[0], self.omega_i[-1], (self.omega_i.size - 1) * factor + 1),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega_s_min": float(self.omega_s[0]),
            "omega_s_max": float(self.omega_s[-1]),
            "n_s": int(self.omega_s.size),
            "omega_i_min": float(self.omega_i[0]),
            "omega_i_max": float(self.omega_i[-1]),
            "n_i": int(self.omega_i.size),
        }


def _trapezoid_weights(n: int, step: float) -> NDArray[np.float64]:
    weights = np.full(n, step)
    weights[0] = weights[-1] = 0.5 * step
    return weights


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """
    Real joint spectral amplitude on a frequency grid.

    Attributes:
        grid: The frequency grid.
        values: Amplitudes φ(ω_i, ω_s), shape ``(N_i, N_s)``; signed values allowed.
        provenance: ``oracle-full``, ``oracle-linearized``, ``closed-form`` or ``imported``.
    """

    grid: FrequencyGrid
    values: NDArray[np.float64]
    provenance: str = "closed-form"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ConfigurationError(
                f"JSA values have shape {values.shape}, grid expects {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("JSA values must be finite")
        if self.provenance not in PROVENANCES:
            raise ConfigurationError(
                f"Unknown provenance {self.provenance!r}; expected one of {PROVENANCES}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def intensity(self) -> NDArray[np.float64]:
        return self.values**2

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def total_power(self) -> float:
        """∫∫|φ|² by the trapezoid rule."""
        w_i, w_s = self.grid.trapezoid_weights()
        return float(w_i @ self.intensity @ w_s)

    def scaled(self, factor: float) -> "JointSpectralAmplitude":
        return JointSpectralAmplitude(self.grid, self.values * factor, self.provenance)

    def normalized(self) -> "JointSpectralAmplitude":
        """Copy scaled to unit trapezoid norm.

        Raises:
            DegenerateSpectrumError: If the JSA is identically zero.
        """
        _require_nonzero(self)
        return self.scaled(1.0 / math.sqrt(self.total_power()))


def _require_nonzero(jsa: JointSpectralAmplitude) -> None:
    if jsa.is_zero:
        raise DegenerateSpectrumError("joint spectral amplitude is identically zero")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def recipe_pump(recipe: PumpRecipe) -> PumpEvaluator:
    """Pump evaluator for the A, B, C envelope of a recipe."""

    def evaluate(k: NDArray[np.float64], omega: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.asarray(pump_envelope_factored(recipe, k, omega))

    return evaluate


def _axis_beta(material: Material, branch: Any, axis: NDArray[np.float64], label: str) -> NDArray[np.float64]:
    try:
        return np.asarray(beta(material, branch, axis))
    except DispersionRangeError as exc:
        raise DispersionRangeError(
            f"{label} axis point {exc.grid_index}: {exc}",
            branch=exc.branch,
            valid_range=exc.valid_range,
            grid_index=exc.grid_index,
        ) from exc


def jsa_from_pump(
    pump: PumpEvaluator,
    material: Material,
    branches: AxisAssignment,
    grid: FrequencyGrid,
    mode: str = "full",
    centers: tuple[float, float] | None = None,
    freeze_pump_index: bool = False,
) -> JointSpectralAmplitude:
    """
    Joint spectral amplitude generated by a pump envelope.

    φ(ω_i, ω_s) = Ẽ_p[(β_i(ω_i) − β_s(ω_s)) / n_p(ω_i + ω_s), ω_i + ω_s].

    Args:
        pump: Callable ``(k, ω) -> amplitude`` accepting arrays.
        material: Nonlinear material.
        branches: Index branches of pump, signal and idler.
        grid: Frequency grid.
        mode: ``"full"`` evaluates β and n_p from the Sellmeier data at every
            grid point; ``"linearized"`` expands β_s, β_i to first order about
            ``centers`` and freezes n_p at their sum.
        centers: Expansion centers ``(ω°_s, ω°_i)``; defaults to the grid
            midpoints.
        freeze_pump_index: In ``"full"`` mode, hold n_p at ``ω°_s + ω°_i``
            while β_s and β_i stay exact. The pump-index dispersion in the
            k-argument is what leaves a residual signal-idler correlation in
            full-dispersion designs; freezing it isolates that term.

    Raises:
        DispersionRangeError: If a grid point falls outside a branch range;
            the message names the offending grid index.
        ConfigurationError: If ``mode`` is unknown, or ``freeze_pump_index``
            is combined with a mode other than ``"full"``.
    """
    if mode not in DISPERSION_MODES:
        raise ConfigurationError(f"Unknown dispersion mode {mode!r}; expected one of {DISPERSION_MODES}")
    if freeze_pump_index and mode != "full":
        raise ConfigurationError("freeze_pump_index only applies to the full dispersion mode")

    w_i, w_s = grid.mesh()
    omega_sum = w_i + w_s
    center_s, center_i = grid.centers if centers is None else centers

    if mode == "full":
        beta_s = _axis_beta(material, branches.signal, grid.omega_s, "signal")
        beta_i = _axis_beta(material, branches.idler, grid.omega_i, "idler")
        try:
            if freeze_pump_index:
                n_p = float(refractive_index(material, branches.pump, center_s + center_i))
            else:
                n_p = np.asarray(refractive_index(material, branches.pump, omega_sum))
        except DispersionRangeError as exc:
            raise DispersionRangeError(
                f"pump frequency at grid point {exc.grid_index} (idler, signal): {exc}",
                branch=exc.branch,
                valid_range=exc.valid_range,
                grid_index=exc.grid_index,
            ) from exc
        k = (beta_i[:, np.newaxis] - beta_s[np.newaxis, :]) / n_p
    else:
        bs0 = float(beta(material, branches.signal, center_s))
        bi0 = float(beta(material, branches.idler, center_i))
        bps = float(beta_prime(material, branches.signal, center_s))
        bpi = float(beta_prime(material, branches.idler, center_i))
        n_p0 = float(refractive_index(material, branches.pump, center_s + center_i))
        beta_s = bs0 + (grid.omega_s - center_s) * bps
        beta_i = bi0 + (grid.omega_i - center_i) * bpi
        k = (beta_i[:, np.newaxis] - beta_s[np.newaxis, :]) / n_p0

    values = np.asarray(pump(k, omega_sum), dtype=float)
    logger.debug("Evaluated %s JSA on a %dx%d grid", mode, *grid.shape)
    return JointSpectralAmplitude(grid=grid, values=values, provenance=f"oracle-{mode}")


def jsa_closed_form(targets: DesignTargets, grid: FrequencyGrid) -> JointSpectralAmplitude:
    """Separable double Gaussian with the target centers and widths, peak value 1."""
    di = (grid.omega_i - targets.omega_i) / (2.0 * targets.sigma_i)
    ds = (grid.omega_s - targets.omega_s) / (2.0 * targets.sigma_s)
    values = np.exp(-(di[:, np.newaxis] ** 2) - ds[np.newaxis, :] ** 2)
    return JointSpectralAmplitude(grid=grid, values=values, provenance="closed-form")


# ---------------------------------------------------------------------------
# Marginals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarginalSpectrum:
    """Single-photon intensity spectrum with its first two moments."""

    axis: NDArray[np.float64]
    density: NDArray[np.float64]
    power: float
    center: float
    std: float

    @classmethod
    def from_density(cls, axis: NDArray[np.float64], density: NDArray[np.float64], step: float) -> "MarginalSpectrum":
        weights = _trapezoid_weights(axis.size, step)
        power = float(weights @ density)
        # moments about the axis midpoint keep the sums well conditioned
        origin = 0.5 * float(axis[0] + axis[-1])
        offsets = axis - origin
        mean_offset = float(weights @ (density * offsets)) / power
        variance = float(weights @ (density * (offsets - mean_offset) ** 2)) / power
        return cls(
            axis=axis,
            density=density,
            power=power,
            center=origin + mean_offset,
            std=math.sqrt(max(variance, 0.0)),
        )

    def to_dict(self) -> dict[str, float]:
        return {"power": self.power, "center": self.center, "std": self.std}


def marginals(jsa: JointSpectralAmplitude) -> tuple[MarginalSpectrum, MarginalSpectrum]:
    """
    Signal and idler intensity marginals ∫|φ|² dω_other (trapezoid rule).

    Returns:
        ``(signal, idler)`` marginal spectra.

    Raises:
        DegenerateSpectrumError: If the JSA is identically zero.
    """
    _require_nonzero(jsa)
    grid = jsa.grid
    w_i, w_s = grid.trapezoid_weights()
    intensity = jsa.intensity
    signal = MarginalSpectrum.from_density(grid.omega_s, w_i @ intensity, grid.d_omega_s)
    idler = MarginalSpectrum.from_density(grid.omega_i, intensity @ w_s, grid.d_omega_i)
    return signal, idler


# ---------------------------------------------------------------------------
# Schmidt analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchmidtReport:
    """
    Frequency-correlation quantifiers of a JSA.

    Attributes:
        eigenvalues: Schmidt eigenvalues λ_n, descending, Σλ_n = 1.
        purity: Σλ_n².
        schmidt_number: K = 1 / purity.
        entropy: −Σλ_n log₂ λ_n (bits).
        correlation: Pearson coefficient of |φ|² as a joint density.
        signal_modes: Leading signal Schmidt modes (columns), if requested.
        idler_modes: Leading idler Schmidt modes (columns), if requested.
    """

    eigenvalues: NDArray[np.float64]
    purity: float
    schmidt_number: float
    entropy: float
    correlation: float
    signal_modes: NDArray[np.float64] | None = field(default=None, repr=False)
    idler_modes: NDArray[np.float64] | None = field(default=None, repr=False)

    def to_dict(self, max_eigenvalues: int = 64) -> dict[str, Any]:
        return {
            "schmidt_number": self.schmidt_number,
            "purity": self.purity,
            "entropy_bits": self.entropy,
            "pearson_correlation": self.correlation,
            "eigenvalues": [float(v) for v in self.eigenvalues[:max_eigenvalues]],
        }


def pearson_correlation(jsa: JointSpectralAmplitude) -> float:
    """Pearson coefficient of |φ|² treated as a discrete joint density."""
    _require_nonzero(jsa)
    density = jsa.intensity / jsa.intensity.sum()
    # affine-invariant, so index coordinates are exact on a uniform grid
    y = np.arange(jsa.grid.omega_i.size, dtype=float)
    x = np.arange(jsa.grid.omega_s.size, dtype=float)
    p_i = density.sum(axis=1)
    p_s = density.sum(axis=0)
    y = y - p_i @ y
    x = x - p_s @ x
    covariance = float(y @ density @ x)
    variance = float((p_i @ y**2) * (p_s @ x**2))
    if variance <= 0.0:
        return 0.0
    return covariance / math.sqrt(variance)


def schmidt_analysis(jsa: JointSpectralAmplitude, keep_modes: int = 0) -> SchmidtReport:
    """
    Schmidt decomposition of a JSA.

    The amplitude grid is weighted by the square root of the cell measure
    and decomposed by SVD; squared singular values renormalized to unit sum
    are the Schmidt eigenvalues.

    Args:
        jsa: Joint spectral amplitude.
        keep_modes: Number of leading Schmidt mode pairs to return.

    Raises:
        DegenerateSpectrumError: If the JSA is identically zero.
    """
    _require_nonzero(jsa)
    matrix = jsa.values * math.sqrt(jsa.grid.cell_measure)
    if keep_modes > 0:
        u, singular, vt = np.linalg.svd(matrix, full_matrices=False)
    else:
        singular = np.linalg.svd(matrix, compute_uv=False)
    eigenvalues = singular**2
    eigenvalues = eigenvalues / eigenvalues.sum()

    purity = float(np.sum(eigenvalues**2))
    nonzero = eigenvalues[eigenvalues > 0.0]
    entropy = max(float(-np.sum(nonzero * np.log2(nonzero))), 0.0)
    report = SchmidtReport(
        eigenvalues=eigenvalues,
        purity=purity,
        schmidt_number=1.0 / purity,
        entropy=entropy,
        correlation=pearson_correlation(jsa),
        idler_modes=u[:, :keep_modes] if keep_modes > 0 else None,
        signal_modes=vt[:keep_modes, :].T if keep_modes > 0 else None,
    )
    logger.info(
        "Schmidt analysis (%s): K=%.10g, rho=%.3g", jsa.provenance, report.schmidt_number, report.correlation
    )
    return report


def correlated_gaussian_schmidt_spectrum(rho_tilde: float, n_modes: int = 64) -> tuple[NDArray[np.float64], float]:
    """
    Analytic Schmidt spectrum of exp[−(x² + y²)/4 − ρ̃xy/2].

    The Schmidt modes are Hermite-Gauss functions (Mehler's formula) with
    geometric eigenvalues λ_n = (1 − μ)μⁿ, μ = (1 − s)/(1 + s), s = √(1 − ρ̃²),
    so K = 1/s.

    Returns:
        ``(eigenvalues, schmidt_number)`` with the first ``n_modes`` λ_n.
    """
    if not -1.0 < rho_tilde < 1.0:
        raise ConfigurationError(f"rho_tilde must lie in (-1, 1), got {rho_tilde!r}")
    s = math.sqrt(1.0 - rho_tilde**2)
    mu = (1.0 - s) / (1.0 + s)
    n = np.arange(n_modes, dtype=float)
    return (1.0 - mu) * mu**n, 1.0 / s


def hermite_schmidt_mode(n: int, x: ArrayLike, rho_tilde: float) -> NDArray[np.float64]:
    """n-th Schmidt mode (unit L² norm) of exp[−(x² + y²)/4 − ρ̃xy/2]."""
    if not -1.0 < rho_tilde < 1.0:
        raise ConfigurationError(f"rho_tilde must lie in (-1, 1), got {rho_tilde!r}")
    # Mehler width: 2(1 + μ)/(1 − μ) = 2/s
    scale = math.sqrt(2.0 / math.sqrt(1.0 - rho_tilde**2))
    xs = np.asarray(x, dtype=float) / scale
    norm = math.sqrt(scale * 2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return eval_hermite(n, xs) * np.exp(-(xs**2) / 2.0) / norm


# ---------------------------------------------------------------------------
# Pump <-> photon coordinates
# ---------------------------------------------------------------------------

def _check_invertible(recipe: PumpRecipe) -> None:
    if recipe.beta_prime_sum == 0.0:
        raise SingularMappingError("β′_s + β′_i = 0: the pump-to-photon map is singular")


def map_pump_to_photon_coords(recipe: PumpRecipe, k: ArrayLike, omega: ArrayLike) -> tuple[FloatOrArray, FloatOrArray]:
    """
    Photon frequencies (ω_s, ω_i) addressed by the pump point (k, ω).

    Inverts n_p k − k_p = (ω_i − ω°_i)β′_i − (ω_s − ω°_s)β′_s together with
    ω − ω_p = (ω_s − ω°_s) + (ω_i − ω°_i).

    Raises:
        SingularMappingError: If β′_s + β′_i = 0.
    """
    _check_invertible(recipe)
    k = np.asarray(k, dtype=float)
    omega = np.asarray(omega, dtype=float)
    kappa = recipe.n_p * (k - recipe.k_center)
    w = omega - recipe.omega_p
    delta_i = (kappa + w * recipe.beta_prime_s) / recipe.beta_prime_sum
    delta_s = (w * recipe.beta_prime_i - kappa) / recipe.beta_prime_sum
    omega_s = recipe.targets.omega_s + delta_s
    omega_i = recipe.targets.omega_i + delta_i
    if omega_s.ndim == 0:
        return float(omega_s), float(omega_i)
    return omega_s, omega_i


def map_photon_to_pump_coords(recipe: PumpRecipe, omega_s: ArrayLike, omega_i: ArrayLike) -> tuple[FloatOrArray, FloatOrArray]:
    """Linearized forward map (ω_s, ω_i) → (k, ω)."""
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    delta_s = omega_s - recipe.targets.omega_s
    delta_i = omega_i - recipe.targets.omega_i
    k = recipe.k_center + (delta_i * recipe.beta_prime_i - delta_s * recipe.beta_prime_s) / recipe.n_p
    omega = recipe.omega_p + delta_s + delta_i
    if k.ndim == 0:
        return float(k), float(omega)
    return k, omega


def pump_overlay(recipe: PumpRecipe, grid: FrequencyGrid) -> NDArray[np.float64]:
    """Pump envelope drawn in photon coordinates, shape ``(N_i, N_s)``."""
    w_i, w_s = grid.mesh()
    k, omega = map_photon_to_pump_coords(recipe, w_s, w_i)
    return np.asarray(pump_envelope_factored(recipe, k, omega))


__all__ = [
    "PumpEvaluator",
    "DISPERSION_MODES",
    "FrequencyGrid",
    "JointSpectralAmplitude",
    "MarginalSpectrum",
    "SchmidtReport",
    "recipe_pump",
    "jsa_from_pump",
    "jsa_closed_form",
    "marginals",
    "pearson_correlation",
    "schmidt_analysis",
    "correlated_gaussian_schmidt_spectrum",
    "hermite_schmidt_mode",
    "map_pump_to_photon_coords",
    "map_photon_to_pump_coords",
    "pump_overlay",
]
