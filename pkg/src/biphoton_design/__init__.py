"""
biphoton-design: pump-pulse design for frequency-uncorrelated photon pairs.

This package turns requested signal and idler spectra into the shaped pump
pulse (bandwidths, shear and incidence angle) that generates them by
spontaneous parametric down-conversion in a χ⁽²⁾ waveguide, simulates the
resulting joint spectrum and measures how frequency-uncorrelated it is.
"""

from importlib import metadata

try:
    __version__ = metadata.version('biphoton_design')
except metadata.PackageNotFoundError:
    # Package is not installed
    pass

from biphoton_design.biphoton import (
    FrequencyGrid,
    JointSpectralAmplitude,
    MarginalSpectrum,
    SchmidtReport,
    correlated_gaussian_schmidt_spectrum,
    hermite_schmidt_mode,
    jsa_closed_form,
    jsa_from_pump,
    map_photon_to_pump_coords,
    map_pump_to_photon_coords,
    marginals,
    pump_overlay,
    recipe_pump,
    schmidt_analysis,
)
from biphoton_design.calibration import calibrate, reference_targets, reproduce_reference
from biphoton_design.config import RunConfig, load_run_config, resolve_material
from biphoton_design.dispersion import (
    AxisAssignment,
    Branch,
    Material,
    beta,
    beta_prime,
    group_index,
    list_materials,
    load_material,
    refractive_index,
)
from biphoton_design.errors import (
    BiphotonDesignError,
    CalibrationError,
    ConfigurationError,
    DegenerateDesignError,
    DegenerateSpectrumError,
    DispersionRangeError,
    MaterialDatabaseError,
    NoRealAngleError,
    PhysicsError,
    SingularMappingError,
    UnusablePathwayError,
)
from biphoton_design.polarization import (
    EntangledDesign,
    PolarizationReport,
    balance_power_ratio,
    entangled_design,
    polarization_report,
    power_ratio_for_weights,
)
from biphoton_design.pump import (
    CrossSpectrallyPurePump,
    DesignTargets,
    PumpRecipe,
    ShearPlan,
    compute_abc,
    derive_center_params,
    design_recipe,
    incidence_angle,
    pump_envelope,
    pump_envelope_factored,
    shear_substitution,
)

__all__ = [
    "Branch",
    "AxisAssignment",
    "Material",
    "refractive_index",
    "beta",
    "beta_prime",
    "group_index",
    "list_materials",
    "load_material",
    "DesignTargets",
    "PumpRecipe",
    "ShearPlan",
    "CrossSpectrallyPurePump",
    "derive_center_params",
    "compute_abc",
    "incidence_angle",
    "design_recipe",
    "pump_envelope",
    "pump_envelope_factored",
    "shear_substitution",
    "FrequencyGrid",
    "JointSpectralAmplitude",
    "MarginalSpectrum",
    "SchmidtReport",
    "recipe_pump",
    "jsa_from_pump",
    "jsa_closed_form",
    "marginals",
    "schmidt_analysis",
    "correlated_gaussian_schmidt_spectrum",
    "hermite_schmidt_mode",
    "map_pump_to_photon_coords",
    "map_photon_to_pump_coords",
    "pump_overlay",
    "EntangledDesign",
    "PolarizationReport",
    "balance_power_ratio",
    "power_ratio_for_weights",
    "entangled_design",
    "polarization_report",
    "calibrate",
    "reproduce_reference",
    "reference_targets",
    "RunConfig",
    "load_run_config",
    "resolve_material",
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
    "__version__",
]
