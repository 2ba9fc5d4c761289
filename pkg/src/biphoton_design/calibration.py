"""
Reference-table calibration.

The published BBO pump parameters leave two choices unstated: how a
coherence length converts to an amplitude bandwidth σ, and which index
branch (ordinary or extraordinary) each wave sees in each pathway. This
module sweeps both, scores every candidate by its maximum relative deviation
from the eight published numbers and keeps the best one.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from biphoton_design.dispersion import AxisAssignment, Branch, Material
from biphoton_design.errors import CalibrationError, ConfigurationError, PhysicsError
from biphoton_design.export import read_json_document, write_json_document
from biphoton_design.polarization import EntangledDesign, entangled_design
from biphoton_design.pump import COHERENCE_CONVENTIONS, DEFAULT_CONVENTION, DesignTargets, PumpRecipe

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceColumn:
    """Published pump parameters of one pathway (SI, θ in degrees)."""

    pathway: str
    A: float
    B: float
    C: float
    theta_deg: float


# Non-degenerate, frequency-uncorrelated, polarization-entangled BBO design.
REFERENCE_COLUMNS: tuple[ReferenceColumn, ...] = (
    ReferenceColumn("z", A=1.89e12, B=1.35e3, C=3.54e-9, theta_deg=-20.1),
    ReferenceColumn("y", A=1.89e12, B=1.25e3, C=3.28e-9, theta_deg=-18.6),
)

REFERENCE_SIGNAL_WAVELENGTH = 0.8e-6
REFERENCE_IDLER_WAVELENGTH = 1.5e-6
REFERENCE_SIGNAL_COHERENCE = 1e-3
REFERENCE_IDLER_COHERENCE = 1e-2

# Acceptance per quantity: relative for A, B, C; absolute degrees for θ.
TOLERANCES: dict[str, float] = {"A": 0.15, "B": 0.15, "C": 0.10, "theta_deg": 2.0}

# Table units for human-readable output.
DISPLAY_UNITS: dict[str, tuple[float, str]] = {
    "A": (1e12, "1e12 rad/s"),
    "B": (1e3, "1e3 rad/m"),
    "C": (1e-9, "1e-9 s/m"),
    "theta_deg": (1.0, "deg"),
}

BRANCH_SPACES = ("optic-axis", "free")

# Polarization axes of (pump, signal, idler) per pathway.
PATHWAY_POLARIZATIONS: dict[str, tuple[str, str, str]] = {
    "y": ("y", "y", "y"),
    "z": ("z", "x", "x"),
}


def reference_targets(convention: str = DEFAULT_CONVENTION, branches: AxisAssignment | None = None) -> DesignTargets:
    """Targets of the reference design: 0.8 μm / 1 mm signal, 1.5 μm / 1 cm idler."""
    return DesignTargets.from_wavelengths(
        REFERENCE_SIGNAL_WAVELENGTH,
        REFERENCE_IDLER_WAVELENGTH,
        REFERENCE_SIGNAL_COHERENCE,
        REFERENCE_IDLER_COHERENCE,
        branches=branches,
        convention=convention,
    )


def optic_axis_branches(optic_axis: str) -> tuple[AxisAssignment, AxisAssignment]:
    """Branch assignments ``(y pathway, z pathway)`` for an optic axis along x, y or z."""
    pump_y, signal_y, idler_y = PATHWAY_POLARIZATIONS["y"]
    pump_z, signal_z, idler_z = PATHWAY_POLARIZATIONS["z"]
    return (
        AxisAssignment.from_optic_axis(
            optic_axis,
            pump_polarization=pump_y,
            signal_polarization=signal_y,
            idler_polarization=idler_y,
        ),
        AxisAssignment.from_optic_axis(
            optic_axis,
            pump_polarization=pump_z,
            signal_polarization=signal_z,
            idler_polarization=idler_z,
        ),
    )


@dataclass(frozen=True)
class Candidate:
    """One point of the calibration sweep."""

    convention: str
    branches_y: AxisAssignment
    branches_z: AxisAssignment
    optic_axis: str | None = None

    @property
    def label(self) -> str:
        axis = f"optic axis {self.optic_axis}, " if self.optic_axis else ""
        return f"{self.convention} ({axis}y {self.branches_y.code}, z {self.branches_z.code})"


def iter_candidates(
    branch_space: str = "optic-axis", conventions: Sequence[str] | None = None
) -> Iterable[Candidate]:
    """Enumerate convention × branch-assignment candidates in a fixed order."""
    if branch_space not in BRANCH_SPACES:
        raise ConfigurationError(f"Unknown branch space {branch_space!r}; expected one of {BRANCH_SPACES}")
    conventions = list(COHERENCE_CONVENTIONS) if conventions is None else list(conventions)
    for convention in conventions:
        if convention not in COHERENCE_CONVENTIONS:
            raise ConfigurationError(f"Unknown coherence-length convention {convention!r}")
        if branch_space == "optic-axis":
            for axis in ("x", "y", "z"):
                branches_y, branches_z = optic_axis_branches(axis)
                yield Candidate(convention, branches_y, branches_z, optic_axis=axis)
        else:
            assignments = [AxisAssignment(*combo) for combo in itertools.product(list(Branch), repeat=3)]
            for branches_y, branches_z in itertools.product(assignments, repeat=2):
                yield Candidate(convention, branches_y, branches_z)


def _recipe_values(recipe: PumpRecipe) -> dict[str, float]:
    return {"A": recipe.A, "B": recipe.B, "C": recipe.C, "theta_deg": recipe.theta_deg}


def _relative(computed: float, reference: float) -> float:
    return abs(computed - reference) / abs(reference)


def comparison_frame(design: EntangledDesign) -> pd.DataFrame:
    """Long table of computed vs. published values, one row per number."""
    recipes = {"y": design.recipe_y, "z": design.recipe_z}
    rows = []
    for column in REFERENCE_COLUMNS:
        values = _recipe_values(recipes[column.pathway])
        for quantity in ("A", "B", "C", "theta_deg"):
            reference = getattr(column, quantity)
            computed = values[quantity]
            rows.append(
                {
                    "pathway": column.pathway,
                    "quantity": quantity,
                    "computed": computed,
                    "reference": reference,
                    "relative_deviation": _relative(computed, reference),
                    "absolute_deviation": abs(computed - reference),
                }
            )
    return pd.DataFrame(rows)


def within_tolerance(frame: pd.DataFrame) -> pd.Series:
    """Boolean per row of :func:`comparison_frame`."""
    limits = frame["quantity"].map(TOLERANCES)
    deviation = frame["relative_deviation"].where(frame["quantity"] != "theta_deg", frame["absolute_deviation"])
    return deviation <= limits


def best_constant_factor(computed: Sequence[float], reference: Sequence[float]) -> float:
    """Factor f minimizing max |f·computed/reference − 1|."""
    ratios = [ref / got for got, ref in zip(computed, reference)]
    low, high = min(ratios), max(ratios)
    return 2.0 / (1.0 / low + 1.0 / high)


@dataclass(frozen=True)
class CalibrationResult:
    """
    Selected calibration and its comparison table.

    Attributes:
        candidate: The winning convention and branch assignment.
        design: Entangled design computed under the candidate.
        table: Output of :func:`comparison_frame` plus a ``within_tolerance`` column.
        score: Maximum relative deviation over the eight numbers.
        factors: Constant factors for A and B that best match the reference.
        branch_space: Sweep space the candidate came from.
        candidates_tried: Number of candidates that produced a design.
    """

    candidate: Candidate
    design: EntangledDesign
    table: pd.DataFrame = field(repr=False, compare=False)
    score: float
    factors: Mapping[str, float]
    branch_space: str
    candidates_tried: int = 0

    @property
    def accepted(self) -> bool:
        return bool(self.table["within_tolerance"].all())

    def display_frame(self) -> pd.DataFrame:
        """Computed vs. published values in table units at 3 significant digits."""
        frame = self.table.copy()
        scale = frame["quantity"].map(lambda q: DISPLAY_UNITS[q][0])
        frame["unit"] = frame["quantity"].map(lambda q: DISPLAY_UNITS[q][1])
        for column in ("computed", "reference"):
            frame[column] = [float(f"{value:.3g}") for value in frame[column] / scale]
        frame["deviation"] = [f"{value:.1%}" for value in self.table["relative_deviation"]]
        return frame[["pathway", "quantity", "unit", "computed", "reference", "deviation", "within_tolerance"]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "convention": self.candidate.convention,
            "branch_space": self.branch_space,
            "optic_axis": self.candidate.optic_axis,
            "branches_y": self.candidate.branches_y.to_dict(),
            "branches_z": self.candidate.branches_z.to_dict(),
            "score": self.score,
            "accepted": self.accepted,
            "factors": dict(self.factors),
            "candidates_tried": self.candidates_tried,
            "design": self.design.to_dict(),
            "table": [
                {
                    "pathway": str(row.pathway),
                    "quantity": str(row.quantity),
                    "computed": float(row.computed),
                    "reference": float(row.reference),
                    "relative_deviation": float(row.relative_deviation),
                    "within_tolerance": bool(row.within_tolerance),
                }
                for row in self.table.itertuples(index=False)
            ],
        }


def evaluate_candidate(material: Material, candidate: Candidate) -> tuple[EntangledDesign, pd.DataFrame, float]:
    """Design both pathways under a candidate and score them."""
    design = entangled_design(
        reference_targets(candidate.convention),
        material,
        candidate.branches_y,
        candidate.branches_z,
        convention=candidate.convention,
    )
    frame = comparison_frame(design)
    frame["within_tolerance"] = within_tolerance(frame)
    return design, frame, float(frame["relative_deviation"].max())


def calibrate(
    material: Material,
    branch_space: str = "optic-axis",
    conventions: Sequence[str] | None = None,
) -> CalibrationResult:
    """
    Run the sweep and return the lowest-scoring candidate.

    Candidates whose design fails physically are skipped. Ties keep the
    earlier candidate in sweep order.

    Raises:
        CalibrationError: If no candidate yields a design at all.
    """
    best: CalibrationResult | None = None
    tried = 0
    for candidate in iter_candidates(branch_space, conventions):
        try:
            design, frame, score = evaluate_candidate(material, candidate)
        except PhysicsError as exc:
            logger.debug("Skipping %s: %s", candidate.label, exc)
            continue
        tried += 1
        logger.debug("Candidate %s: score %.4g", candidate.label, score)
        if best is None or score < best.score:
            best = CalibrationResult(
                candidate=candidate,
                design=design,
                table=frame,
                score=score,
                factors={},
                branch_space=branch_space,
            )
    if best is None:
        raise CalibrationError(f"no calibration candidate produced a design for {material.name}")

    factors = {}
    for quantity in ("A", "B"):
        rows = best.table[best.table["quantity"] == quantity]
        factors[quantity] = best_constant_factor(rows["computed"].tolist(), rows["reference"].tolist())
    result = CalibrationResult(
        candidate=best.candidate,
        design=best.design,
        table=best.table,
        score=best.score,
        factors=factors,
        branch_space=branch_space,
        candidates_tried=tried,
    )
    logger.info("Selected calibration %s with max deviation %.3g", result.candidate.label, result.score)
    return result


def reproduce_reference(
    material: Material,
    branch_space: str = "optic-axis",
    conventions: Sequence[str] | None = None,
) -> CalibrationResult:
    """
    Calibrate and require every number within its acceptance tolerance.

    Raises:
        CalibrationError: If the best candidate misses a tolerance; the
            result is attached as ``best``.
    """
    result = calibrate(material, branch_space, conventions)
    if not result.accepted:
        failing = result.table.loc[~result.table["within_tolerance"], ["pathway", "quantity"]]
        names = ", ".join(f"{row.quantity}[{row.pathway}]" for row in failing.itertuples())
        raise CalibrationError(
            f"best calibration {result.candidate.label} misses tolerance for {names}", best=result
        )
    return result


def save_calibration(result: CalibrationResult, path: str | Path) -> Path:
    """Write the calibration choice as sorted-key JSON."""
    return write_json_document(result.to_dict(), path)


def load_calibration(path: str | Path) -> dict[str, Any]:
    """Read a calibration document written by :func:`save_calibration`."""
    document = read_json_document(path)
    missing = {"convention", "branches_y", "branches_z"} - set(document)
    if missing:
        raise ConfigurationError(f"calibration document is missing keys: {sorted(missing)}")
    if document["convention"] not in COHERENCE_CONVENTIONS:
        raise ConfigurationError(f"Unknown coherence-length convention {document['convention']!r}")
    return document


__all__ = [
    "ReferenceColumn",
    "REFERENCE_COLUMNS",
    "TOLERANCES",
    "BRANCH_SPACES",
    "reference_targets",
    "optic_axis_branches",
    "Candidate",
    "iter_candidates",
    "comparison_frame",
    "within_tolerance",
    "best_constant_factor",
    "CalibrationResult",
    "evaluate_candidate",
    "calibrate",
    "reproduce_reference",
    "save_calibration",
    "load_calibration",
]
