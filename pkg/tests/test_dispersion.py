"""Tests for the dispersion module."""

import json
import math

import numpy as np
import pytest

from biphoton_design.dispersion import (
    SPEED_OF_LIGHT,
    AxisAssignment,
    Branch,
    Material,
    SellmeierCoefficients,
    beta,
    beta_prime,
    group_index,
    list_materials,
    load_material,
    material_from_dict,
    omega_to_wavelength,
    refractive_index,
    validate_reference_indices,
    wavelength_to_omega,
)
from biphoton_design.errors import DispersionRangeError, MaterialDatabaseError


def _bbo_document() -> dict:
    return {
        "name": "TESTBBO",
        "source": "test",
        "ordinary": {"form": "bbo", "coeffs": [2.7359, 0.01878, 0.01822, 0.01354], "range_um": [0.21, 2.6]},
        "extraordinary": {"form": "bbo", "coeffs": [2.3753, 0.01224, 0.01667, 0.01516], "range_um": [0.21, 2.6]},
        "chi2": {"yyy": 2.22, "zxx": 0.16},
    }


def test_constant_material_index_and_beta(constant_material):
    """A constant-index material gives n = 1.5 and β = nω/c."""
    omega = 2e15
    assert refractive_index(constant_material, "o", omega) == pytest.approx(1.5, rel=1e-15)
    assert beta(constant_material, "e", omega) == pytest.approx(1.5 * omega / SPEED_OF_LIGHT, rel=1e-15)
    assert beta(constant_material, "e", omega) == pytest.approx(1e7, rel=1e-3)


def test_constant_material_beta_prime_is_n_over_c(constant_material):
    """Without dispersion the group slowness is n/c."""
    omega = np.linspace(1e15, 3e15, 7)
    np.testing.assert_allclose(beta_prime(constant_material, "o", omega), 1.5 / SPEED_OF_LIGHT, rtol=1e-15)
    np.testing.assert_allclose(group_index(constant_material, "o", omega), 1.5, rtol=1e-15)


def test_bbo_ordinary_index_at_800nm(bbo):
    """BBO n_o at 800 nm matches the published value."""
    omega = wavelength_to_omega(0.8e-6)
    assert refractive_index(bbo, Branch.ORDINARY, omega) == pytest.approx(1.6606, abs=1e-4)
    assert refractive_index(bbo, Branch.EXTRAORDINARY, omega) == pytest.approx(1.5444, abs=1e-4)


def test_bbo_reference_indices_validate(bbo):
    """Every tabulated index of the bundled BBO entry is reproduced."""
    assert bbo.reference_indices
    assert validate_reference_indices(bbo) == []


def test_out_of_range_wavelength_raises(bbo):
    """A 50 μm wavelength lies outside the BBO Sellmeier range."""
    with pytest.raises(DispersionRangeError, match="ordinary") as excinfo:
        refractive_index(bbo, "o", wavelength_to_omega(50e-6))
    assert excinfo.value.branch == "ordinary"
    assert excinfo.value.valid_range == pytest.approx((0.21e-6, 2.6e-6))


def test_out_of_range_reports_grid_index(bbo):
    """Array evaluation names the first offending grid point."""
    omega = wavelength_to_omega(np.array([0.8e-6, 1.0e-6, 3.0e-6, 5.0e-6]))
    with pytest.raises(DispersionRangeError) as excinfo:
        beta(bbo, "e", omega)
    assert excinfo.value.grid_index == (2,)


@pytest.mark.parametrize("branch", [Branch.ORDINARY, Branch.EXTRAORDINARY])
def test_beta_prime_matches_central_difference(bbo, branch):
    """Analytic β′ agrees with central differences at random in-range frequencies."""
    rng = np.random.default_rng(7)
    wavelengths = rng.uniform(0.25e-6, 2.5e-6, size=50)
    omega = wavelength_to_omega(wavelengths)
    step = 1e10
    numeric = (beta(bbo, branch, omega + step) - beta(bbo, branch, omega - step)) / (2.0 * step)
    analytic = beta_prime(bbo, branch, omega)
    assert np.max(np.abs(analytic - numeric) / np.abs(numeric)) < 1e-6


def test_wavelength_omega_conversions_are_inverse():
    """Wavelength and angular frequency conversions invert each other."""
    assert omega_to_wavelength(wavelength_to_omega(1.5e-6)) == pytest.approx(1.5e-6, rel=1e-15)


def test_branch_parse_accepts_shorthands():
    """Branch labels accept o/e shorthands."""
    assert Branch.parse("o") is Branch.ORDINARY
    assert Branch.parse("Extraordinary") is Branch.EXTRAORDINARY
    with pytest.raises(ValueError, match="Unknown index branch"):
        Branch.parse("x")


def test_axis_assignment_from_optic_axis():
    """Waves polarized along the optic axis see the extraordinary index."""
    z_path = AxisAssignment.from_optic_axis(
        "z", pump_polarization="z", signal_polarization="x", idler_polarization="x"
    )
    y_path = AxisAssignment.from_optic_axis(
        "z", pump_polarization="y", signal_polarization="y", idler_polarization="y"
    )
    assert z_path.code == "e/o/o"
    assert y_path.code == "o/o/o"
    assert AxisAssignment.from_dict(z_path.to_dict()) == z_path


def test_material_loader_rejects_missing_source():
    """Database entries must cite their source."""
    document = _bbo_document()
    del document["source"]
    with pytest.raises(MaterialDatabaseError, match="source"):
        material_from_dict(document)


def test_material_loader_converts_chi2_to_si():
    """χ⁽²⁾ values are stored in pm/V and loaded in m/V."""
    material = material_from_dict(_bbo_document())
    assert material.chi2["yyy"] == pytest.approx(2.22e-12)
    assert material.is_usable


@pytest.mark.parametrize(
    ("form", "coefficients", "valid_range", "match"),
    [
        ("cauchy", (1.0,), (0.2e-6, 2e-6), "Unknown Sellmeier form"),
        ("bbo", (2.7, 0.01), (0.2e-6, 2e-6), "exactly 4"),
        ("sellmeier", (1.0,), (0.2e-6, 2e-6), "even number"),
        ("bbo", (2.7359, 0.01878, 0.25, 0.01354), (0.2e-6, 2e-6), "pole"),
        ("constant", (0.5,), (0.2e-6, 2e-6), "n²"),
        ("constant", (2.25,), (2e-6, 0.2e-6), "Invalid wavelength range"),
    ],
)
def test_sellmeier_coefficients_validation(form, coefficients, valid_range, match):
    """Malformed Sellmeier branches are rejected when constructed."""
    with pytest.raises(MaterialDatabaseError, match=match):
        SellmeierCoefficients(form=form, coefficients=coefficients, valid_range=valid_range)


def test_generic_sellmeier_form_derivative():
    """The generic Sellmeier form has a consistent analytic derivative."""
    branch = SellmeierCoefficients(
        form="sellmeier",
        coefficients=(0.6961663, 0.0684043**2, 0.4079426, 0.1162414**2, 0.8974794, 9.896161**2),
        valid_range=(0.21e-6, 3.7e-6),
    )
    material = Material(name="SILICA", ordinary=branch, extraordinary=branch, source="test")
    omega = wavelength_to_omega(np.linspace(0.4e-6, 1.6e-6, 11))
    step = 1e10
    numeric = (beta(material, "o", omega + step) - beta(material, "o", omega - step)) / (2.0 * step)
    np.testing.assert_allclose(beta_prime(material, "o", omega), numeric, rtol=1e-6)
    assert refractive_index(material, "o", wavelength_to_omega(1.0e-6)) == pytest.approx(1.4504, abs=1e-4)


def test_modal_correction_is_reserved(constant_material):
    """A nonzero modal correction is rejected."""
    with pytest.raises(MaterialDatabaseError, match="modal_correction"):
        Material(
            name="WG",
            ordinary=constant_material.ordinary,
            extraordinary=constant_material.extraordinary,
            source="test",
            modal_correction=0.01,
        )


def test_list_and_load_materials(tmp_path):
    """Materials are found by name in the bundled and extra directories."""
    (tmp_path / "custom.json").write_text(json.dumps(_bbo_document()), encoding="utf-8")
    found = list_materials([tmp_path])
    assert set(found) == {"TESTBBO"}

    material = load_material("testbbo", [tmp_path])
    assert material.name == "TESTBBO"
    assert "BBO" in list_materials()
    assert load_material(tmp_path / "custom.json").name == "TESTBBO"


def test_unknown_material_name_raises():
    """Unknown names list the available materials."""
    with pytest.raises(MaterialDatabaseError, match="available"):
        load_material("UNOBTAINIUM")


def test_zero_frequency(bbo, constant_material):
    """ω = 0 maps to an infinite wavelength: β = 0 without dispersion, out of range for BBO."""
    assert beta(constant_material, "o", 0.0) == 0.0
    with pytest.raises(DispersionRangeError):
        refractive_index(bbo, "o", 0.0)
    assert math.isinf(omega_to_wavelength(0.0))
