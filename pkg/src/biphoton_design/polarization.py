"""
Polarization-entangled designs built from two χ⁽²⁾ pathways.

A pump polarized along y drives the χ_yyy pathway and a pump polarized along
z drives χ_zxx. Designing both pump components for the same four target
numbers gives the two-photon state α_H|HH⟩ + e^{iφ}α_V|VV⟩, with the relative
powers of the pump components setting α_H and α_V.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from biphoton_design.biphoton import (
    FrequencyGrid,
    JointSpectralAmplitude,
    jsa_closed_form,
    jsa_from_pump,
    recipe_pump,
)
from biphoton_design.dispersion import AxisAssignment, Material
from biphoton_design.errors import ConfigurationError, PhysicsError, UnusablePathwayError
from biphoton_design.pump import DesignTargets, PumpRecipe, design_recipe, recipe_from_dict, recipe_to_dict

logger = logging.getLogger(__name__)

# χ⁽²⁾ element driving each pump polarization component
PATHWAY_ELEMENTS: dict[str, str] = {"y": "yyy", "z": "zxx"}

# zxx emits the "HH" amplitude, yyy the "VV" amplitude
DEFAULT_LABELS: dict[str, str] = {"y": "VV", "z": "HH"}


def _check_chi(chi_y: float, chi_z: float) -> None:
    for name, value in (("chi_y", chi_y), ("chi_z", chi_z)):
        if not math.isfinite(value):
            raise ConfigurationError(f"{name} must be finite, got {value!r}")
        if value == 0.0:
            raise UnusablePathwayError(f"{name} is zero; that pathway cannot generate pairs")


def balance_power_ratio(chi_y: float, chi_z: float) -> float:
    """
    Power ratio r = P_z / P_y that equalizes both pathway amplitudes.

    χ_z·√P_z = χ_y·√P_y gives r = (χ_y / χ_z)².

    Raises:
        UnusablePathwayError: If either χ⁽²⁾ element is zero.
    """
    _check_chi(chi_y, chi_z)
    return (chi_y / chi_z) ** 2


def power_ratio_for_weights(chi_y: float, chi_z: float, alpha_h: float) -> float:
    """Power ratio giving the non-maximally entangled state with amplitude ``alpha_h`` on HH."""
    _check_chi(chi_y, chi_z)
    if not 0.0 < alpha_h < 1.0:
        raise ConfigurationError(f"alpha_h must lie in (0, 1), got {alpha_h!r}")
    alpha_v = math.sqrt(1.0 - alpha_h**2)
    return (alpha_h * chi_y / (alpha_v * chi_z)) ** 2


def amplitude_weights(chi_y: float, chi_z: float, power_ratio: float) -> tuple[float, float]:
    """Normalized ``(α_H, α_V)`` from χ·√P with P_y = 1 and P_z = r."""
    _check_chi(chi_y, chi_z)
    if not power_ratio > 0:
        raise ConfigurationError(f"power ratio must be > 0, got {power_ratio!r}")
    raw_h = abs(chi_z) * math.sqrt(power_ratio)
    raw_v = abs(chi_y)
    norm = math.hypot(raw_h, raw_v)
    return raw_h / norm, raw_v / norm


def _same_spectra(a: DesignTargets, b: DesignTargets) -> bool:
    return (a.omega_s, a.omega_i, a.sigma_s, a.sigma_i) == (b.omega_s, b.omega_i, b.sigma_s, b.sigma_i)


@dataclass(frozen=True)
class EntangledDesign:
    """
    Two pump recipes sharing target spectra, plus their power balance.

    Attributes:
        recipe_y: Recipe of the y-polarized pump component (χ_yyy pathway).
        recipe_z: Recipe of the z-polarized pump component (χ_zxx pathway).
        chi_y: χ_yyy in m/V.
        chi_z: χ_zxx in m/V.
        power_ratio: r = P_z / P_y.
        phi: Relative phase between the pump polarization components (rad).
        material: Material both recipes were designed in.
        labels: Two-photon polarization label per pathway.
    """

    recipe_y: PumpRecipe
    recipe_z: PumpRecipe
    chi_y: float
    chi_z: float
    power_ratio: float
    phi: float = 0.0
    material: Material | None = field(default=None, repr=False, compare=False)
    labels: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_LABELS))

    def __post_init__(self) -> None:
        if not (math.isfinite(self.power_ratio) and self.power_ratio > 0):
            raise ConfigurationError(f"power ratio must be finite and > 0, got {self.power_ratio!r}")
        if not _same_spectra(self.recipe_y.targets, self.recipe_z.targets):
            raise ConfigurationError("both pathway recipes must share the same target spectra")
        if set(self.labels) != {"y", "z"}:
            raise ConfigurationError(f"labels must name pathways 'y' and 'z', got {sorted(self.labels)}")

    @property
    def weights(self) -> tuple[float, float]:
        """``(α_H, α_V)``."""
        return amplitude_weights(self.chi_y, self.chi_z, self.power_ratio)

    def to_dict(self) -> dict[str, Any]:
        return {
            "recipe_y": recipe_to_dict(self.recipe_y),
            "recipe_z": recipe_to_dict(self.recipe_z),
            "chi_y": self.chi_y,
            "chi_z": self.chi_z,
            "power_ratio": self.power_ratio,
            "phi": self.phi,
            "labels": dict(self.labels),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], material: Material | None = None) -> "EntangledDesign":
        return cls(
            recipe_y=recipe_from_dict(data["recipe_y"]),
            recipe_z=recipe_from_dict(data["recipe_z"]),
            chi_y=float(data["chi_y"]),
            chi_z=float(data["chi_z"]),
            power_ratio=float(data["power_ratio"]),
            phi=float(data.get("phi", 0.0)),
            material=material,
            labels=dict(data.get("labels", DEFAULT_LABELS)),
        )


def _pathway_chi(material: Material, pathway: str) -> float:
    element = PATHWAY_ELEMENTS[pathway]
    value = material.chi2.get(element, 0.0)
    if value == 0.0:
        raise UnusablePathwayError(
            f"{material.name} has no χ_{element} element; the {pathway}-polarized pathway is unusable"
        )
    return value


def _design_pathway(
    targets: DesignTargets, material: Material, branches: AxisAssignment, pathway: str, convention: str | None
) -> PumpRecipe:
    try:
        return design_recipe(targets.with_branches(branches), material, convention=convention)
    except PhysicsError as exc:
        exc.args = (f"{pathway}-polarized pathway ({branches.code}): {exc.args[0]}", *exc.args[1:])
        raise


def entangled_design(
    targets: DesignTargets,
    material: Material,
    branches_y: AxisAssignment,
    branches_z: AxisAssignment,
    phi: float = 0.0,
    labels: Mapping[str, str] | None = None,
    power_ratio: float | None = None,
    convention: str | None = None,
) -> EntangledDesign:
    """
    Design both pump polarization components for the same target spectra.

    Args:
        targets: Shared target spectra; their branch assignment is replaced per pathway.
        material: Nonlinear material providing χ_yyy and χ_zxx.
        branches_y: Index branches of the y-polarized pathway.
        branches_z: Index branches of the z-polarized pathway.
        phi: Relative pump phase, passed through unchanged.
        labels: Polarization label per pathway (defaults to ``{"y": "VV", "z": "HH"}``).
        power_ratio: Explicit r = P_z / P_y; defaults to the balanced ratio.
        convention: Coherence-length convention recorded in the recipes.

    Raises:
        UnusablePathwayError: If the material lacks either χ⁽²⁾ element.
        PhysicsError: Recipe failures, with the message prefixed by the pathway.
    """
    chi_y = _pathway_chi(material, "y")
    chi_z = _pathway_chi(material, "z")
    recipe_y = _design_pathway(targets, material, branches_y, "y", convention)
    recipe_z = _design_pathway(targets, material, branches_z, "z", convention)
    ratio = balance_power_ratio(chi_y, chi_z) if power_ratio is None else power_ratio
    logger.info("Entangled design for %s: power ratio P_z/P_y = %.6g", material.name, ratio)
    return EntangledDesign(
        recipe_y=recipe_y,
        recipe_z=recipe_z,
        chi_y=chi_y,
        chi_z=chi_z,
        power_ratio=ratio,
        phi=phi,
        material=material,
        labels=dict(DEFAULT_LABELS if labels is None else labels),
    )


@dataclass(frozen=True)
class PolarizationReport:
    """
    Entanglement quality of a two-pathway design.

    Attributes:
        alpha_h: Amplitude of the z pathway.
        alpha_v: Amplitude of the y pathway.
        overlap: |⟨φ_H|φ_V⟩| of the unit-normalized pathway JSAs.
        concurrence: 2·α_H·α_V·O.
        labels: Polarization label per pathway.
    """

    alpha_h: float
    alpha_v: float
    overlap: float
    concurrence: float
    labels: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_LABELS))

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha_h": self.alpha_h,
            "alpha_v": self.alpha_v,
            "overlap": self.overlap,
            "concurrence": self.concurrence,
            "labels": dict(self.labels),
        }


def jsa_overlap(first: JointSpectralAmplitude, second: JointSpectralAmplitude) -> float:
    """
    |⟨φ_a|φ_b⟩| after normalizing both amplitudes (trapezoid rule).

    Raises:
        DegenerateSpectrumError: If either JSA is identically zero.
        ConfigurationError: If the grids differ.
    """
    if first.grid.shape != second.grid.shape or not (
        np.array_equal(first.grid.omega_s, second.grid.omega_s)
        and np.array_equal(first.grid.omega_i, second.grid.omega_i)
    ):
        raise ConfigurationError("overlap requires both JSAs on the same grid")
    a = first.normalized()
    b = second.normalized()
    w_i, w_s = a.grid.trapezoid_weights()
    inner = float(w_i @ (a.values * b.values) @ w_s)
    return min(abs(inner), 1.0)


def report_from_jsas(
    jsa_h: JointSpectralAmplitude,
    jsa_v: JointSpectralAmplitude,
    alpha_h: float,
    alpha_v: float,
    labels: Mapping[str, str] | None = None,
) -> PolarizationReport:
    """Build a report from already evaluated pathway JSAs and weights."""
    overlap = jsa_overlap(jsa_h, jsa_v)
    return PolarizationReport(
        alpha_h=alpha_h,
        alpha_v=alpha_v,
        overlap=overlap,
        concurrence=min(2.0 * alpha_h * alpha_v * overlap, 1.0),
        labels=dict(DEFAULT_LABELS if labels is None else labels),
    )


def polarization_report(
    design: EntangledDesign,
    grid: FrequencyGrid,
    mode: str = "full",
    material: Material | None = None,
) -> PolarizationReport:
    """
    Evaluate both pathway JSAs and quantify the polarization entanglement.

    Args:
        design: The entangled design.
        grid: Frequency grid shared by both pathways.
        mode: ``"full"``, ``"linearized"`` or ``"closed-form"``.
        material: Material override; defaults to ``design.material``.

    Raises:
        DegenerateSpectrumError: If either pathway JSA vanishes on the grid.
        ConfigurationError: If no material is available for oracle modes.
    """
    material = material if material is not None else design.material

    def evaluate(recipe: PumpRecipe) -> JointSpectralAmplitude:
        if mode == "closed-form":
            return jsa_closed_form(recipe.targets, grid)
        if material is None:
            raise ConfigurationError("a material is required to evaluate oracle JSAs")
        return jsa_from_pump(
            recipe_pump(recipe),
            material,
            recipe.targets.branches,
            grid,
            mode=mode,
            centers=(recipe.targets.omega_s, recipe.targets.omega_i),
        )

    with ThreadPoolExecutor(max_workers=2) as pool:
        jsa_z, jsa_y = pool.map(evaluate, (design.recipe_z, design.recipe_y))

    alpha_h, alpha_v = design.weights
    report = report_from_jsas(jsa_z, jsa_y, alpha_h, alpha_v, design.labels)
    logger.info("Pathway overlap O=%.10g, concurrence=%.10g", report.overlap, report.concurrence)
    return report


__all__ = [
    "PATHWAY_ELEMENTS",
    "DEFAULT_LABELS",
    "balance_power_ratio",
    "power_ratio_for_weights",
    "amplitude_weights",
    "EntangledDesign",
    "entangled_design",
    "PolarizationReport",
    "jsa_overlap",
    "report_from_jsas",
    "polarization_report",
]
