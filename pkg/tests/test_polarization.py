"""Tests for the polarization-entanglement module."""

from dataclasses import replace

import numpy as np
import pytest

from biphoton_design.biphoton import FrequencyGrid, JointSpectralAmplitude, jsa_closed_form
from biphoton_design.dispersion import AxisAssignment
from biphoton_design.errors import (
    ConfigurationError,
    DegenerateSpectrumError,
    NoRealAngleError,
    UnusablePathwayError,
)
from biphoton_design.polarization import (
    EntangledDesign,
    amplitude_weights,
    balance_power_ratio,
    entangled_design,
    jsa_overlap,
    polarization_report,
    power_ratio_for_weights,
    report_from_jsas,
)

OOO = AxisAssignment("o", "o", "o")
EOO = AxisAssignment("e", "o", "o")


def test_balance_power_ratio_for_bbo(bbo):
    """BBO needs (χ_yyy/χ_zxx)² ≈ 192.52 times more z-polarized power."""
    ratio = balance_power_ratio(bbo.chi2["yyy"], bbo.chi2["zxx"])
    assert ratio == pytest.approx((2.22 / 0.16) ** 2, rel=1e-12)
    assert ratio == pytest.approx(192.52, rel=1e-4)


def test_equal_elements_need_equal_power():
    """Equal χ⁽²⁾ elements balance at r = 1."""
    assert balance_power_ratio(3e-12, 3e-12) == 1.0


@pytest.mark.parametrize(("chi_y", "chi_z"), [(0.0, 1e-12), (1e-12, 0.0)])
def test_zero_element_is_unusable(chi_y, chi_z):
    """A vanishing χ⁽²⁾ element cannot be balanced."""
    with pytest.raises(UnusablePathwayError):
        balance_power_ratio(chi_y, chi_z)


def test_balanced_weights_are_equal(bbo):
    """The balanced ratio gives α_H = α_V = 1/√2."""
    chi_y, chi_z = bbo.chi2["yyy"], bbo.chi2["zxx"]
    alpha_h, alpha_v = amplitude_weights(chi_y, chi_z, balance_power_ratio(chi_y, chi_z))
    assert abs(alpha_h - alpha_v) < 1e-12
    assert alpha_h**2 + alpha_v**2 == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("alpha_h", [0.2, 0.5, 0.9])
def test_power_ratio_for_weights_inverts_amplitude_weights(bbo, alpha_h):
    """The ratio chosen for a target α_H reproduces that α_H."""
    chi_y, chi_z = bbo.chi2["yyy"], bbo.chi2["zxx"]
    ratio = power_ratio_for_weights(chi_y, chi_z, alpha_h)
    assert amplitude_weights(chi_y, chi_z, ratio)[0] == pytest.approx(alpha_h, rel=1e-12)


def test_power_ratio_for_weights_rejects_out_of_range(bbo):
    """α_H must lie strictly between 0 and 1."""
    with pytest.raises(ConfigurationError, match="alpha_h"):
        power_ratio_for_weights(bbo.chi2["yyy"], bbo.chi2["zxx"], 1.0)


def test_identical_branches_give_identical_recipes(bbo, reference):
    """With the same branch assignment both pathways share one recipe."""
    design = entangled_design(reference, bbo, OOO, OOO, phi=0.7)
    assert design.recipe_y == design.recipe_z
    assert design.phi == 0.7
    assert design.power_ratio == pytest.approx(192.52, rel=1e-4)


def test_entangled_design_differs_per_pathway(bbo, reference):
    """Different pump branches change θ but not the target spectra."""
    design = entangled_design(reference, bbo, OOO, EOO)
    assert design.recipe_y.targets.branches == OOO
    assert design.recipe_z.targets.branches == EOO
    assert design.recipe_y.theta_deg != pytest.approx(design.recipe_z.theta_deg, abs=0.1)
    assert design.recipe_y.A == pytest.approx(design.recipe_z.A, rel=1e-12)


def test_explicit_power_ratio_and_labels(bbo, reference):
    """An explicit ratio and label mapping override the defaults."""
    design = entangled_design(reference, bbo, OOO, EOO, power_ratio=4.0, labels={"y": "HH", "z": "VV"})
    assert design.power_ratio == 4.0
    assert design.labels == {"y": "HH", "z": "VV"}


def test_material_without_zxx_is_unusable(constant_material, reference):
    """Missing χ_zxx makes the z-polarized pathway unusable."""
    material = replace(constant_material, chi2={"yyy": 1e-12})
    with pytest.raises(UnusablePathwayError, match="zxx"):
        entangled_design(reference, material, OOO, EOO)


def test_pathway_failures_name_the_pathway(bbo, reference, monkeypatch):
    """Recipe errors are prefixed with the failing pathway."""
    import biphoton_design.polarization as polarization

    def fail(targets, material, convention=None):
        raise NoRealAngleError("no real solution", sin_theta=1.2)

    monkeypatch.setattr(polarization, "design_recipe", fail)
    with pytest.raises(NoRealAngleError, match="y-polarized pathway"):
        entangled_design(reference, bbo, OOO, EOO)


def test_design_rejects_mismatched_targets(bbo, reference):
    """Both recipes must be designed for the same spectra."""
    design = entangled_design(reference, bbo, OOO, EOO)
    other = replace(design.recipe_z, targets=replace(reference, sigma_s=reference.sigma_s * 2))
    with pytest.raises(ConfigurationError, match="same target spectra"):
        replace(design, recipe_z=other)


def test_design_dict_round_trip(bbo, reference):
    """Entangled designs survive a dict round trip."""
    design = entangled_design(reference, bbo, OOO, EOO, phi=1.25)
    restored = EntangledDesign.from_dict(design.to_dict(), material=bbo)
    assert replace(restored.recipe_y, theta=design.recipe_y.theta) == design.recipe_y
    assert replace(restored.recipe_z, theta=design.recipe_z.theta) == design.recipe_z
    assert restored.recipe_z.theta == pytest.approx(design.recipe_z.theta, rel=1e-15)
    assert (restored.phi, restored.power_ratio, restored.labels) == (1.25, design.power_ratio, design.labels)
    assert restored.weights == pytest.approx(design.weights)


def test_identical_pathways_are_maximally_entangled(bbo, reference):
    """Identical pathway JSAs with balanced weights give O = 1 and C = 1."""
    design = entangled_design(reference, bbo, OOO, OOO)
    report = polarization_report(design, FrequencyGrid.centered(reference, n=64), mode="linearized")
    assert report.overlap == pytest.approx(1.0, abs=1e-12)
    assert report.concurrence == pytest.approx(1.0, abs=1e-12)


def test_disjoint_pathways_have_no_overlap():
    """JSAs with disjoint support do not overlap."""
    grid = FrequencyGrid(omega_s=np.linspace(0.0, 1.0, 32), omega_i=np.linspace(0.0, 1.0, 32))
    first = np.zeros(grid.shape)
    second = np.zeros(grid.shape)
    first[:10, :10] = 1.0
    second[20:, 20:] = 1.0
    report = report_from_jsas(
        JointSpectralAmplitude(grid, first), JointSpectralAmplitude(grid, second), 2**-0.5, 2**-0.5
    )
    assert report.overlap == 0.0
    assert report.concurrence == 0.0


def test_overlap_requires_matching_grids(reference):
    """Overlaps are only defined on a shared grid."""
    first = jsa_closed_form(reference, FrequencyGrid.centered(reference, n=32))
    second = jsa_closed_form(reference, FrequencyGrid.centered(reference, n=33))
    with pytest.raises(ConfigurationError, match="same grid"):
        jsa_overlap(first, second)


def test_overlap_of_zero_jsa_is_degenerate(reference):
    """A vanishing pathway JSA cannot be normalized."""
    grid = FrequencyGrid.centered(reference, n=32)
    with pytest.raises(DegenerateSpectrumError):
        jsa_overlap(jsa_closed_form(reference, grid), JointSpectralAmplitude(grid, np.zeros(grid.shape)))


def test_reference_design_overlap_with_full_dispersion(bbo, reference):
    """The y and z pathways of the reference design nearly coincide."""
    design = entangled_design(reference, bbo, OOO, EOO)
    report = polarization_report(design, FrequencyGrid.centered(reference, n=128))
    assert 0.99 < report.overlap <= 1.0
    # Gaussian estimate from the two pathways' correlations (-0.0446, -0.0344)
    assert report.overlap == pytest.approx(0.9999864, abs=2e-6)
    assert report.concurrence == pytest.approx(report.overlap, rel=1e-9)
    assert report.to_dict()["labels"] == {"y": "VV", "z": "HH"}


def test_closed_form_report_needs_no_material(bbo, reference):
    """Closed-form evaluation ignores the material."""
    design = replace(entangled_design(reference, bbo, OOO, EOO), material=None)
    report = polarization_report(design, FrequencyGrid.centered(reference, n=32), mode="closed-form")
    assert report.overlap == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ConfigurationError, match="material is required"):
        polarization_report(design, FrequencyGrid.centered(reference, n=32), mode="linearized")


def test_overlap_is_stable_under_refinement(bbo, reference):
    """Refining the grid changes the pathway overlap by less than 1e-4."""
    design = entangled_design(reference, bbo, OOO, EOO)
    grid = FrequencyGrid.centered(reference, n=64)
    coarse = polarization_report(design, grid, mode="linearized")
    fine = polarization_report(design, grid.refined(2), mode="linearized")
    assert abs(fine.overlap - coarse.overlap) < 1e-4


def test_overlap_is_symmetric(reference):
    """O does not depend on the order of the pathways."""
    grid = FrequencyGrid.centered(reference, n=32)
    first = jsa_closed_form(reference, grid)
    second = jsa_closed_form(replace(reference, sigma_s=reference.sigma_s * 1.5), grid)
    assert jsa_overlap(first, second) == pytest.approx(jsa_overlap(second, first), rel=1e-14)
    assert jsa_overlap(first, second) < 1.0
