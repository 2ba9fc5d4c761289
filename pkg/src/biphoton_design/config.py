"""
Run configuration.

A :class:`RunConfig` collects everything one command-line run needs. It is
built from built-in defaults, then an optional JSON or YAML file, then
command-line flags, each layer overriding the previous one.
"""

from __future__ import annotations

import json
import logging
import math
import os
from collections.abc import Mapping
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

try:
    import yaml
except ImportError as exc:  # pragma: no cover
    raise ImportError(
        "Config IO requires 'pyyaml' to be installed.\n"
        "Install with: pip install pyyaml\n"
    ) from exc

from biphoton_design.biphoton import DISPERSION_MODES
from biphoton_design.dispersion import AxisAssignment, Material, bundled_material_dir, load_material
from biphoton_design.errors import ConfigurationError
from biphoton_design.pump import COHERENCE_CONVENTIONS, DEFAULT_CONVENTION, DesignTargets

logger = logging.getLogger(__name__)

MATERIALS_ENV_VAR = "BIPHOTON_DESIGN_MATERIALS"
DEFAULT_MATERIAL = "BBO"

JSA_MODES = (*DISPERSION_MODES, "closed-form")

# Accepted wavelength keys and their scale to metres.
_WAVELENGTH_KEYS: dict[str, float] = {"_m": 1.0, "_um": 1e-6, "_nm": 1e-9}


def _parse_branches(value: Any, name: str) -> AxisAssignment:
    if isinstance(value, AxisAssignment):
        return value
    if isinstance(value, Mapping):
        try:
            return AxisAssignment.from_dict(value)
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"{name}: {exc}") from exc
    if isinstance(value, str):
        parts = value.replace(",", "/").split("/")
        if len(parts) != 3:
            raise ConfigurationError(f"{name} must look like 'o/o/o' (pump/signal/idler), got {value!r}")
        try:
            return AxisAssignment(*parts)
        except ValueError as exc:
            raise ConfigurationError(f"{name}: {exc}") from exc
    raise ConfigurationError(f"{name} must be a string or mapping, got {type(value)!r}")


@dataclass(frozen=True)
class RunConfig:
    """
    Settings for one run.

    Targets come in exactly one of two styles: vacuum wavelengths plus
    coherence lengths (converted with ``convention``), or center frequencies
    plus amplitude bandwidths given directly in rad/s.

    Attributes:
        material: Material name or database file; ``None`` uses the default.
        signal_wavelength: Signal vacuum wavelength (m).
        idler_wavelength: Idler vacuum wavelength (m).
        signal_coherence_length: Signal coherence length (m).
        idler_coherence_length: Idler coherence length (m).
        omega_s: Signal center frequency (rad/s).
        omega_i: Idler center frequency (rad/s).
        sigma_s: Signal amplitude bandwidth (rad/s).
        sigma_i: Idler amplitude bandwidth (rad/s).
        branches: Pump/signal/idler branches of a single-pathway design.
        branches_y: Branches of the y-polarized pathway of an entangled design.
        branches_z: Branches of the z-polarized pathway of an entangled design.
        convention: Coherence-length convention label.
        grid_size: Points per frequency axis.
        span_sigma: Grid half-width in units of σ.
        mode: ``full``, ``linearized`` or ``closed-form``.
        phi: Relative pump phase of an entangled design (rad).
        output_dir: Directory for written files.
    """

    material: str | None = None
    signal_wavelength: float | None = None
    idler_wavelength: float | None = None
    signal_coherence_length: float | None = None
    idler_coherence_length: float | None = None
    omega_s: float | None = None
    omega_i: float | None = None
    sigma_s: float | None = None
    sigma_i: float | None = None
    branches: AxisAssignment = AxisAssignment("o", "o", "o")
    branches_y: AxisAssignment = AxisAssignment("o", "o", "o")
    branches_z: AxisAssignment = AxisAssignment("e", "o", "o")
    convention: str = DEFAULT_CONVENTION
    grid_size: int = 256
    span_sigma: float = 5.0
    mode: str = "full"
    phi: float = 0.0
    output_dir: Path = Path(".")

    def __post_init__(self) -> None:
        if self.convention not in COHERENCE_CONVENTIONS:
            raise ConfigurationError(
                f"Unknown coherence-length convention {self.convention!r}; "
                f"expected one of {sorted(COHERENCE_CONVENTIONS)}"
            )
        if isinstance(self.grid_size, bool) or not isinstance(self.grid_size, int):
            raise ConfigurationError("grid_size must be an integer")
        if self.grid_size < 16:
            raise ConfigurationError(f"grid_size must be >= 16, got {self.grid_size}")
        if not (isinstance(self.span_sigma, (int, float)) and math.isfinite(self.span_sigma) and self.span_sigma > 0):
            raise ConfigurationError(f"span_sigma must be finite and > 0, got {self.span_sigma!r}")
        if self.mode not in JSA_MODES:
            raise ConfigurationError(f"Unknown mode {self.mode!r}; expected one of {JSA_MODES}")
        for name in ("branches", "branches_y", "branches_z"):
            object.__setattr__(self, name, _parse_branches(getattr(self, name), name))
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @property
    def uses_wavelengths(self) -> bool:
        return any(getattr(self, name) is not None for name in self._wavelength_fields())

    @property
    def uses_frequencies(self) -> bool:
        return any(getattr(self, name) is not None for name in self._frequency_fields())

    @staticmethod
    def _wavelength_fields() -> tuple[str, ...]:
        return ("signal_wavelength", "idler_wavelength", "signal_coherence_length", "idler_coherence_length")

    @staticmethod
    def _frequency_fields() -> tuple[str, ...]:
        return ("omega_s", "omega_i", "sigma_s", "sigma_i")

    def targets(self, branches: AxisAssignment | None = None) -> DesignTargets:
        """
        Build :class:`DesignTargets` from whichever target style is set.

        Raises:
            ConfigurationError: If neither or both styles are given, or one is incomplete.
        """
        branches = self.branches if branches is None else branches
        if self.uses_wavelengths == self.uses_frequencies:
            raise ConfigurationError(
                "give targets either as wavelengths + coherence lengths or as omega + sigma, not "
                + ("both" if self.uses_wavelengths else "neither")
            )
        style = self._wavelength_fields() if self.uses_wavelengths else self._frequency_fields()
        missing = [name for name in style if getattr(self, name) is None]
        if missing:
            raise ConfigurationError(f"incomplete targets, missing: {missing}")
        if self.uses_wavelengths:
            return DesignTargets.from_wavelengths(
                self.signal_wavelength,
                self.idler_wavelength,
                self.signal_coherence_length,
                self.idler_coherence_length,
                branches=branches,
                convention=self.convention,
            )
        return DesignTargets(
            omega_s=self.omega_s,
            omega_i=self.omega_i,
            sigma_s=self.sigma_s,
            sigma_i=self.sigma_i,
            branches=branches,
        )

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Return a copy with every non-``None`` override applied."""
        values = {key: value for key, value in overrides.items() if value is not None}
        _reject_unknown(values)
        return replace(self, **values)


def _reject_unknown(values: Mapping[str, Any]) -> None:
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")


def _normalize_document(document: Any, source: str) -> dict[str, Any]:
    """Map file keys (``*_nm``/``*_um`` wavelengths included) to RunConfig fields."""
    if not isinstance(document, Mapping):
        raise ConfigurationError(f"{source} must contain a mapping at the top level")
    values: dict[str, Any] = {}
    for key, value in document.items():
        if not isinstance(key, str):
            raise ConfigurationError(f"{source}: configuration keys must be strings, got {key!r}")
        field_name, scale = key, None
        if key.endswith("_wavelength_nm") or key.endswith("_wavelength_um") or key.endswith("_wavelength_m"):
            for suffix, factor in _WAVELENGTH_KEYS.items():
                if key.endswith(suffix):
                    field_name, scale = key[: -len(suffix)], factor
                    break
        if field_name in values:
            raise ConfigurationError(f"{source}: {field_name!r} is given more than once")
        if scale is not None:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigurationError(f"{source}: {key} must be a number")
            value = float(value) * scale
        values[field_name] = value
    _reject_unknown(values)
    return values


def load_run_config_json(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Load a run configuration from a JSON file on top of ``base``."""
    config_path = Path(path).expanduser()
    try:
        document = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{config_path} is not valid JSON: {exc}") from exc
    return (base or RunConfig()).merged(_normalize_document(document, str(config_path)))


def load_run_config_yaml(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Load a run configuration from a YAML file on top of ``base``."""
    config_path = Path(path).expanduser()
    try:
        document = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{config_path} is not valid YAML: {exc}") from exc
    return (base or RunConfig()).merged(_normalize_document(document or {}, str(config_path)))


def load_run_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Dispatch on the file suffix: ``.yaml``/``.yml`` for YAML, anything else JSON."""
    if Path(path).suffix.lower() in (".yaml", ".yml"):
        return load_run_config_yaml(path, base)
    return load_run_config_json(path, base)


def material_directories() -> list[Path]:
    """Database locations: ``$BIPHOTON_DESIGN_MATERIALS`` first, then the bundled set."""
    directories = []
    override = os.environ.get(MATERIALS_ENV_VAR)
    if override:
        directories.append(Path(override).expanduser())
    directories.append(bundled_material_dir())
    return directories


def resolve_material(name_or_path: str | None = None) -> Material:
    """
    Load the run's material.

    ``None`` selects the file named by ``$BIPHOTON_DESIGN_MATERIALS`` when it
    points at a single file, else the default material.
    """
    directories = material_directories()
    if name_or_path is None:
        override = os.environ.get(MATERIALS_ENV_VAR)
        if override and Path(override).expanduser().is_file():
            name_or_path = override
        else:
            name_or_path = DEFAULT_MATERIAL
    material = load_material(name_or_path, directories)
    logger.info("Using material %s (%s)", material.name, material.source)
    return material


__all__ = [
    "MATERIALS_ENV_VAR",
    "DEFAULT_MATERIAL",
    "JSA_MODES",
    "RunConfig",
    "load_run_config_json",
    "load_run_config_yaml",
    "load_run_config",
    "material_directories",
    "resolve_material",
]
