"""Shared fixtures for biphoton-design tests."""

import math

import pytest

from biphoton_design.calibration import reference_targets
from biphoton_design.dispersion import AxisAssignment, Material, SellmeierCoefficients, load_material
from biphoton_design.pump import DesignTargets


@pytest.fixture
def constant_material() -> Material:
    """Dispersionless material with n = 1.5 everywhere."""
    branch = SellmeierCoefficients(form="constant", coefficients=(2.25,), valid_range=(0.0, math.inf))
    return Material(
        name="CONST",
        ordinary=branch,
        extraordinary=branch,
        chi2={"yyy": 1e-12, "zxx": 1e-12},
        source="test fixture",
    )


@pytest.fixture
def bbo() -> Material:
    """The bundled BBO entry."""
    return load_material("BBO")


@pytest.fixture
def reference() -> DesignTargets:
    """Reference design targets on the ordinary branch."""
    return reference_targets()


@pytest.fixture
def reference_z() -> DesignTargets:
    """Reference design targets for the z-polarized (e/o/o) pathway."""
    return reference_targets(branches=AxisAssignment("e", "o", "o"))
