"""
Material dispersion module.

This module evaluates refractive indices, propagation constants β(ω) and
their first derivatives β′(ω) for uniaxial nonlinear materials described by
Sellmeier curves. Waveguide (modal) dispersion is ignored; the database
format reserves a ``modal_correction`` field that must stay empty.

All quantities are SI internally (rad/s, rad/m, s/m, m). Wavelengths in
micrometres only appear inside the Sellmeier forms and the database files.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.constants import c as SPEED_OF_LIGHT

from biphoton_design.errors import DispersionRangeError, MaterialDatabaseError

logger = logging.getLogger(__name__)

FloatOrArray = float | NDArray[np.float64]


class Branch(str, Enum):
    """Index branch of a uniaxial material."""

    ORDINARY = "ordinary"
    EXTRAORDINARY = "extraordinary"

    @classmethod
    def parse(cls, value: "str | Branch") -> "Branch":
        """Accept ``"o"``/``"e"`` shorthands as well as full names."""
        if isinstance(value, Branch):
            return value
        if not isinstance(value, str):
            raise TypeError(f"branch must be a string, got {type(value)!r}")
        key = value.strip().lower()
        if key in ("o", "ordinary"):
            return cls.ORDINARY
        if key in ("e", "extraordinary"):
            return cls.EXTRAORDINARY
        raise ValueError(f"Unknown index branch: {value!r}")

    @property
    def short(self) -> str:
        return self.value[0]


# ---------------------------------------------------------------------------
# Sellmeier functional forms
# ---------------------------------------------------------------------------

class SellmeierForm(NamedTuple):
    """A Sellmeier functional form with its analytic derivative.

    ``n_squared`` and ``derivative`` take the wavelength in micrometres;
    ``derivative`` returns d(n²)/dλ in 1/μm. ``poles`` lists the wavelengths
    (μm) where the form diverges.
    """

    n_squared: Callable[[tuple[float, ...], NDArray[np.float64]], NDArray[np.float64]]
    derivative: Callable[[tuple[float, ...], NDArray[np.float64]], NDArray[np.float64]]
    poles: Callable[[tuple[float, ...]], list[float]]
    check_arity: Callable[[int], bool]
    arity_hint: str


def _constant_n2(coeffs: tuple[float, ...], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.full_like(lam, coeffs[0], dtype=float)


def _constant_dn2(coeffs: tuple[float, ...], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.zeros_like(lam, dtype=float)


def _bbo_n2(coeffs: tuple[float, ...], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    a, b, c, d = coeffs
    lam2 = lam * lam
    return a + b / (lam2 - c) - d * lam2


def _bbo_dn2(coeffs: tuple[float, ...], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    _, b, c, d = coeffs
    lam2 = lam * lam
    return -2.0 * b * lam / (lam2 - c) ** 2 - 2.0 * d * lam


def _bbo_poles(coeffs: tuple[float, ...]) -> list[float]:
    c = coeffs[2]
    return [math.sqrt(c)] if c > 0 else []


def _sellmeier_n2(coeffs: tuple[float, ...], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    lam2 = lam * lam
    n2 = np.ones_like(lam, dtype=float)
    for b, c in zip(coeffs[0::2], coeffs[1::2]):
        n2 = n2 + b * lam2 / (lam2 - c)
    return n2


def _sellmeier_dn2(coeffs: tuple[float, ...], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    lam2 = lam * lam
    out = np.zeros_like(lam, dtype=float)
    for b, c in zip(coeffs[0::2], coeffs[1::2]):
        out = out - 2.0 * b * c * lam / (lam2 - c) ** 2
    return out


def _sellmeier_poles(coeffs: tuple[float, ...]) -> list[float]:
    return [math.sqrt(c) for c in coeffs[1::2] if c > 0]


SELLMEIER_FORMS: dict[str, SellmeierForm] = {
    # n² = a0
    "constant": SellmeierForm(
        _constant_n2, _constant_dn2, lambda coeffs: [], lambda n: n == 1, "exactly 1"
    ),
    # n² = A + B/(λ² − C) − Dλ²
    "bbo": SellmeierForm(_bbo_n2, _bbo_dn2, _bbo_poles, lambda n: n == 4, "exactly 4"),
    # n² = 1 + Σ Bᵢλ²/(λ² − Cᵢ)
    "sellmeier": SellmeierForm(
        _sellmeier_n2,
        _sellmeier_dn2,
        _sellmeier_poles,
        lambda n: n > 0 and n % 2 == 0,
        "a positive even number of",
    ),
}


@dataclass(frozen=True)
class SellmeierCoefficients:
    """Coefficients of one Sellmeier branch.

    Attributes:
        form: Name of the functional form (a key of :data:`SELLMEIER_FORMS`).
        coefficients: Dimensionless / μm²-scaled coefficients of the form.
        valid_range: ``(λ_min, λ_max)`` in metres.
    """

    form: str
    coefficients: tuple[float, ...]
    valid_range: tuple[float, float]

    def __post_init__(self) -> None:
        if self.form not in SELLMEIER_FORMS:
            raise MaterialDatabaseError(
                f"Unknown Sellmeier form {self.form!r}; "
                f"expected one of {sorted(SELLMEIER_FORMS)}"
            )
        object.__setattr__(self, "coefficients", tuple(float(v) for v in self.coefficients))
        object.__setattr__(self, "valid_range", tuple(float(v) for v in self.valid_range))

        sellmeier_form = SELLMEIER_FORMS[self.form]
        if not sellmeier_form.check_arity(len(self.coefficients)):
            raise MaterialDatabaseError(
                f"Sellmeier form {self.form!r} takes {sellmeier_form.arity_hint} coefficients, "
                f"got {len(self.coefficients)}"
            )
        if not all(math.isfinite(v) for v in self.coefficients):
            raise MaterialDatabaseError("Sellmeier coefficients must be finite")

        lo, hi = self.valid_range
        if not (0.0 <= lo < hi):
            raise MaterialDatabaseError(f"Invalid wavelength range {self.valid_range!r}")

        lo_um, hi_um = lo * 1e6, hi * 1e6
        for pole in sellmeier_form.poles(self.coefficients):
            if lo_um <= pole <= hi_um:
                raise MaterialDatabaseError(
                    f"Sellmeier pole at {pole:.6g} μm lies inside the valid range "
                    f"[{lo_um:.6g}, {hi_um:.6g}] μm"
                )

        # Sample the range; unbounded ranges only occur for the constant form.
        upper = hi_um if math.isfinite(hi_um) else max(lo_um, 1.0) * 1e3
        lower = lo_um if lo_um > 0 else min(upper, 1.0) * 1e-3
        samples = np.linspace(lower, upper, 512)
        if np.any(sellmeier_form.n_squared(self.coefficients, samples) <= 1.0):
            raise MaterialDatabaseError("Sellmeier curve yields n² <= 1 inside its valid range")

    def n_squared(self, wavelength_um: NDArray[np.float64]) -> NDArray[np.float64]:
        return SELLMEIER_FORMS[self.form].n_squared(self.coefficients, wavelength_um)

    def n_squared_derivative(self, wavelength_um: NDArray[np.float64]) -> NDArray[np.float64]:
        return SELLMEIER_FORMS[self.form].derivative(self.coefficients, wavelength_um)


@dataclass(frozen=True)
class ReferenceIndex:
    """A published refractive-index table entry used to validate an entry."""

    wavelength: float
    ordinary: float
    extraordinary: float


@dataclass(frozen=True)
class Material:
    """A named uniaxial nonlinear medium.

    Attributes:
        name: Material name.
        ordinary: Ordinary-branch Sellmeier coefficients.
        extraordinary: Extraordinary-branch Sellmeier coefficients.
        chi2: χ⁽²⁾ tensor elements in m/V keyed by index label (``"yyy"``...).
        source: Citation of the coefficient source.
        modal_correction: Reserved for waveguide dispersion; must be ``None``.
        reference_indices: Published index values for validation.
    """

    name: str
    ordinary: SellmeierCoefficients
    extraordinary: SellmeierCoefficients
    chi2: Mapping[str, float] = field(default_factory=dict)
    source: str = ""
    modal_correction: float | None = None
    reference_indices: tuple[ReferenceIndex, ...] = ()

    def __post_init__(self) -> None:
        for label, value in self.chi2.items():
            if not math.isfinite(value):
                raise MaterialDatabaseError(
                    f"χ⁽²⁾ element {label!r} of {self.name!r} is not finite"
                )
        if self.modal_correction not in (None, 0, 0.0):
            raise MaterialDatabaseError(
                "modal_correction is reserved; waveguide dispersion is not modelled"
            )

    @property
    def is_usable(self) -> bool:
        """True when at least one χ⁽²⁾ element is nonzero."""
        return any(value != 0.0 for value in self.chi2.values())

    def branch(self, branch: str | Branch) -> SellmeierCoefficients:
        """Return the Sellmeier coefficients for ``branch``."""
        branch = Branch.parse(branch)
        return self.ordinary if branch is Branch.ORDINARY else self.extraordinary


@dataclass(frozen=True)
class AxisAssignment:
    """Index branches seen by the pump, signal and idler of one pathway."""

    pump: Branch
    signal: Branch
    idler: Branch

    def __post_init__(self) -> None:
        for name in ("pump", "signal", "idler"):
            object.__setattr__(self, name, Branch.parse(getattr(self, name)))

    @classmethod
    def from_optic_axis(
        cls,
        optic_axis: str,
        *,
        pump_polarization: str,
        signal_polarization: str,
        idler_polarization: str,
    ) -> "AxisAssignment":
        """Derive branches from the optic-axis direction in waveguide coordinates.

        A wave polarized along the optic axis sees the extraordinary index;
        any other linear polarization (perpendicular to it) sees the ordinary
        index.

        Args:
            optic_axis: ``"x"``, ``"y"`` or ``"z"``.
            pump_polarization: Polarization axis of the pump component.
            signal_polarization: Polarization axis of the signal photon.
            idler_polarization: Polarization axis of the idler photon.
        """
        axes = ("x", "y", "z")
        for name, axis in (
            ("optic_axis", optic_axis),
            ("pump_polarization", pump_polarization),
            ("signal_polarization", signal_polarization),
            ("idler_polarization", idler_polarization),
        ):
            if axis not in axes:
                raise ValueError(f"{name} must be one of {axes}, got {axis!r}")

        def pick(axis: str) -> Branch:
            return Branch.EXTRAORDINARY if axis == optic_axis else Branch.ORDINARY

        return cls(
            pump=pick(pump_polarization),
            signal=pick(signal_polarization),
            idler=pick(idler_polarization),
        )

    @property
    def code(self) -> str:
        """Compact pump/signal/idler label such as ``"e/o/o"``."""
        return f"{self.pump.short}/{self.signal.short}/{self.idler.short}"

    def to_dict(self) -> dict[str, str]:
        return {"pump": self.pump.value, "signal": self.signal.value, "idler": self.idler.value}

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> "AxisAssignment":
        return cls(pump=data["pump"], signal=data["signal"], idler=data["idler"])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def omega_to_wavelength(omega: ArrayLike) -> FloatOrArray:
    """Convert angular frequency (rad/s) to vacuum wavelength (m)."""
    omega = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore"):
        result = 2.0 * np.pi * SPEED_OF_LIGHT / omega
    return _unwrap(result)


def wavelength_to_omega(wavelength: ArrayLike) -> FloatOrArray:
    """Convert vacuum wavelength (m) to angular frequency (rad/s)."""
    wavelength = np.asarray(wavelength, dtype=float)
    with np.errstate(divide="ignore"):
        result = 2.0 * np.pi * SPEED_OF_LIGHT / wavelength
    return _unwrap(result)


def _unwrap(value: NDArray[np.float64]) -> FloatOrArray:
    return float(value) if value.ndim == 0 else value


def _wavelength_um(
    material: Material, branch: Branch, omega: ArrayLike
) -> tuple[SellmeierCoefficients, NDArray[np.float64]]:
    """Map ``omega`` to micrometres and check it against the branch range."""
    coeffs = material.branch(branch)
    omega = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore"):
        wavelength = 2.0 * np.pi * SPEED_OF_LIGHT / np.abs(omega)

    lo, hi = coeffs.valid_range
    inside = (wavelength >= lo) & (wavelength <= hi)
    if not np.all(inside):
        flat_index = int(np.argmax(~inside.ravel()))
        bad = float(wavelength.ravel()[flat_index])
        grid_index = np.unravel_index(flat_index, wavelength.shape) if wavelength.ndim else ()
        where = f" at grid index {tuple(int(i) for i in grid_index)}" if wavelength.ndim else ""
        raise DispersionRangeError(
            f"Wavelength {bad * 1e6:.6g} μm{where} is outside the {branch.value} branch "
            f"range [{lo * 1e6:.6g}, {hi * 1e6:.6g}] μm of {material.name}",
            branch=branch.value,
            valid_range=(lo, hi),
            grid_index=tuple(int(i) for i in grid_index) if wavelength.ndim else None,
        )
    return coeffs, wavelength * 1e6


def refractive_index(material: Material, branch: str | Branch, omega: ArrayLike) -> FloatOrArray:
    """
    Refractive index n(ω) of one branch.

    Args:
        material: The material.
        branch: Index branch (``"o"``/``"e"`` or a :class:`Branch`).
        omega: Angular frequency in rad/s (scalar or array).

    Returns:
        The refractive index, same shape as ``omega``.

    Raises:
        DispersionRangeError: If ``omega`` maps outside the branch range.
    """
    branch = Branch.parse(branch)
    coeffs, lam = _wavelength_um(material, branch, omega)
    return _unwrap(np.sqrt(coeffs.n_squared(lam)))


def beta(material: Material, branch: str | Branch, omega: ArrayLike) -> FloatOrArray:
    """Propagation constant β(ω) = n(ω)·ω/c in rad/m."""
    omega_arr = np.asarray(omega, dtype=float)
    n = np.asarray(refractive_index(material, branch, omega_arr))
    return _unwrap(n * omega_arr / SPEED_OF_LIGHT)


def beta_prime(material: Material, branch: str | Branch, omega: ArrayLike) -> FloatOrArray:
    """
    First derivative dβ/dω in s/m, from the analytic Sellmeier derivative.

    With λ = 2πc/ω the chain rule gives β′ = (n − λ dn/dλ)/c, the group
    slowness n_g/c.

    Args:
        material: The material.
        branch: Index branch.
        omega: Angular frequency in rad/s.

    Returns:
        β′(ω), same shape as ``omega``.
    """
    branch = Branch.parse(branch)
    coeffs, lam = _wavelength_um(material, branch, omega)
    n = np.sqrt(coeffs.n_squared(lam))
    dn_dlam = coeffs.n_squared_derivative(lam) / (2.0 * n)
    with np.errstate(invalid="ignore"):
        correction = np.where(dn_dlam == 0.0, 0.0, lam * dn_dlam)
    return _unwrap((n - correction) / SPEED_OF_LIGHT)


def group_index(material: Material, branch: str | Branch, omega: ArrayLike) -> FloatOrArray:
    """Group index n_g = c·β′."""
    return _unwrap(np.asarray(beta_prime(material, branch, omega)) * SPEED_OF_LIGHT)


def validate_reference_indices(material: Material, tolerance: float = 1e-4) -> list[str]:
    """Compare a material against its published index table.

    Returns:
        A list of human-readable mismatch descriptions; empty when every
        tabulated value is reproduced within ``tolerance``.
    """
    problems: list[str] = []
    for ref in material.reference_indices:
        omega = wavelength_to_omega(ref.wavelength)
        for branch, expected in (
            (Branch.ORDINARY, ref.ordinary),
            (Branch.EXTRAORDINARY, ref.extraordinary),
        ):
            got = refractive_index(material, branch, omega)
            if abs(got - expected) > tolerance:
                problems.append(
                    f"{material.name} {branch.value} at {ref.wavelength * 1e6:.4g} μm: "
                    f"{got:.6f} vs published {expected:.6f}"
                )
    return problems


# ---------------------------------------------------------------------------
# Material database
# ---------------------------------------------------------------------------

def _branch_from_dict(name: str, data: Any) -> SellmeierCoefficients:
    if not isinstance(data, Mapping):
        raise MaterialDatabaseError(f"'{name}' must be a mapping")
    missing = {"form", "coeffs", "range_um"} - set(data)
    if missing:
        raise MaterialDatabaseError(f"'{name}' is missing keys: {sorted(missing)}")
    range_um = data["range_um"]
    if not isinstance(range_um, (list, tuple)) or len(range_um) != 2:
        raise MaterialDatabaseError(f"'{name}.range_um' must be a [min, max] pair")
    return SellmeierCoefficients(
        form=data["form"],
        coefficients=tuple(data["coeffs"]),
        valid_range=(float(range_um[0]) * 1e-6, float(range_um[1]) * 1e-6),
    )


def material_from_dict(data: Mapping[str, Any]) -> Material:
    """Build a :class:`Material` from a parsed database document.

    The document schema is ``{name, ordinary: {form, coeffs, range_um},
    extraordinary: {...}, chi2: {label: pm/V}, source}`` plus the optional
    ``modal_correction`` and ``reference_indices`` keys.

    Raises:
        MaterialDatabaseError: If the document is malformed or has no ``source``.
    """
    if not isinstance(data, Mapping):
        raise MaterialDatabaseError("material document must be a mapping")
    source = data.get("source")
    if not isinstance(source, str) or not source.strip():
        raise MaterialDatabaseError(
            f"material {data.get('name', '<unnamed>')!r} has no 'source' citation"
        )
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise MaterialDatabaseError("material document requires a 'name'")

    chi2_raw = data.get("chi2", {})
    if not isinstance(chi2_raw, Mapping):
        raise MaterialDatabaseError("'chi2' must be a mapping of label to pm/V")
    chi2 = {str(label): float(value) * 1e-12 for label, value in chi2_raw.items()}

    references = tuple(
        ReferenceIndex(
            wavelength=float(entry["wavelength_um"]) * 1e-6,
            ordinary=float(entry["ordinary"]),
            extraordinary=float(entry["extraordinary"]),
        )
        for entry in data.get("reference_indices", ())
    )

    return Material(
        name=name,
        ordinary=_branch_from_dict("ordinary", data.get("ordinary")),
        extraordinary=_branch_from_dict("extraordinary", data.get("extraordinary")),
        chi2=chi2,
        source=source,
        modal_correction=data.get("modal_correction"),
        reference_indices=references,
    )


def load_material_json(path: str | Path) -> Material:
    """Load a material from a JSON database file."""
    material_path = Path(path).expanduser()
    with material_path.open("r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise MaterialDatabaseError(f"{material_path} is not valid JSON: {exc}") from exc
    material = material_from_dict(data)
    logger.debug("Loaded material %s from %s", material.name, material_path)
    return material


def bundled_material_dir() -> Path:
    """Directory holding the materials shipped with the package."""
    return Path(str(resources.files("biphoton_design") / "data" / "materials"))


def _iter_material_files(directories: list[Path]) -> Iterator[Path]:
    for directory in directories:
        if directory.is_file():
            yield directory
        elif directory.is_dir():
            yield from sorted(directory.glob("*.json"))


def list_materials(directories: list[Path] | None = None) -> dict[str, Path]:
    """Map material names (upper-cased) to their database files.

    Earlier directories take precedence over later ones.
    """
    directories = directories if directories is not None else [bundled_material_dir()]
    found: dict[str, Path] = {}
    for path in _iter_material_files(directories):
        try:
            with path.open("r", encoding="utf-8") as handle:
                name = json.load(handle).get("name", path.stem)
        except (OSError, json.JSONDecodeError, AttributeError):
            logger.warning("Skipping unreadable material file %s", path)
            continue
        found.setdefault(str(name).upper(), path)
    return found


def load_material(name_or_path: str | Path, directories: list[Path] | None = None) -> Material:
    """Load a material by file path or by name from the database directories.

    Raises:
        MaterialDatabaseError: If the name is not in any database directory.
    """
    candidate = Path(name_or_path).expanduser()
    if candidate.suffix == ".json" or candidate.is_file():
        return load_material_json(candidate)

    available = list_materials(directories)
    key = str(name_or_path).upper()
    if key not in available:
        raise MaterialDatabaseError(
            f"Unknown material {name_or_path!r}; available: {sorted(available)}"
        )
    return load_material_json(available[key])


__all__ = [
    "SPEED_OF_LIGHT",
    "Branch",
    "SellmeierForm",
    "SELLMEIER_FORMS",
    "SellmeierCoefficients",
    "ReferenceIndex",
    "Material",
    "AxisAssignment",
    "omega_to_wavelength",
    "wavelength_to_omega",
    "refractive_index",
    "beta",
    "beta_prime",
    "group_index",
    "validate_reference_indices",
    "material_from_dict",
    "load_material_json",
    "bundled_material_dir",
    "list_materials",
    "load_material",
]
