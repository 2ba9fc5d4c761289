"""Tests for the reference-table calibration."""

import json

import pandas as pd
import pytest

from biphoton_design.calibration import (
    REFERENCE_COLUMNS,
    TOLERANCES,
    best_constant_factor,
    calibrate,
    iter_candidates,
    load_calibration,
    optic_axis_branches,
    reproduce_reference,
    save_calibration,
    within_tolerance,
)
from biphoton_design.dispersion import load_material
from biphoton_design.errors import CalibrationError, ConfigurationError
from biphoton_design.pump import COHERENCE_CONVENTIONS


@pytest.fixture(scope="module")
def bbo_calibration():
    return reproduce_reference(load_material("BBO"))


def test_bbo_reproduces_reference_table(bbo_calibration):
    """All eight published BBO numbers are reproduced within tolerance."""
    assert bbo_calibration.accepted
    assert bbo_calibration.table["within_tolerance"].all()
    assert len(bbo_calibration.table) == 8


def test_bbo_calibration_choice(bbo_calibration):
    """The 2πc/l_c convention with the optic axis along z wins."""
    candidate = bbo_calibration.candidate
    assert candidate.convention == "2pi*c/lc"
    assert candidate.optic_axis == "z"
    assert candidate.branches_y.code == "o/o/o"
    assert candidate.branches_z.code == "e/o/o"
    assert bbo_calibration.candidates_tried == 3 * len(COHERENCE_CONVENTIONS)


def test_bbo_calibrated_values(bbo_calibration):
    """Computed values land close to the published columns."""
    design = bbo_calibration.design
    assert design.recipe_y.A == pytest.approx(1.89e12, rel=5e-3)
    assert design.recipe_y.B == pytest.approx(1252, rel=5e-3)
    assert design.recipe_z.B == pytest.approx(1349, rel=5e-3)
    assert design.recipe_y.C == pytest.approx(3.288e-9, rel=5e-3)
    assert design.recipe_z.C == pytest.approx(3.541e-9, rel=5e-3)
    assert design.recipe_y.theta_deg == pytest.approx(-17.72, abs=0.05)
    assert design.recipe_z.theta_deg == pytest.approx(-19.14, abs=0.05)
    assert bbo_calibration.score < 0.06


def test_constant_factors_are_close_to_one(bbo_calibration):
    """No extra factor on A or B is needed."""
    for quantity in ("A", "B"):
        assert bbo_calibration.factors[quantity] == pytest.approx(1.0, abs=0.02)


def test_free_sweep_is_at_least_as_good(bbo):
    """The unrestricted branch sweep contains the optic-axis candidates."""
    constrained = calibrate(bbo, conventions=["2pi*c/lc"])
    free = calibrate(bbo, branch_space="free", conventions=["2pi*c/lc"])
    assert free.score <= constrained.score
    assert free.candidate.optic_axis is None


def test_display_frame_uses_table_units(bbo_calibration):
    """Display values are scaled to table units with three significant digits."""
    frame = bbo_calibration.display_frame()
    assert list(frame["reference"]) == [1.89, 1.35, 3.54, -20.1, 1.89, 1.25, 3.28, -18.6]
    assert list(frame["unit"][:4]) == ["1e12 rad/s", "1e3 rad/m", "1e-9 s/m", "deg"]
    assert frame["deviation"].str.endswith("%").all()


def test_calibration_document_round_trip(bbo_calibration, tmp_path):
    """Saved calibrations are sorted-key JSON that loads back."""
    path = save_calibration(bbo_calibration, tmp_path / "out" / "calibration.json")
    text = path.read_text(encoding="utf-8")
    document = json.loads(text)
    assert list(document) == sorted(document)
    assert text.endswith("\n")

    loaded = load_calibration(path)
    assert loaded["convention"] == "2pi*c/lc"
    assert loaded["accepted"] is True
    assert len(loaded["table"]) == 8


def test_load_calibration_rejects_incomplete_documents(tmp_path):
    """Documents missing the calibration choice are rejected."""
    path = tmp_path / "calibration.json"
    path.write_text(json.dumps({"convention": "2pi*c/lc"}), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="missing keys"):
        load_calibration(path)


def test_constant_index_material_misses_the_angle(constant_material):
    """A dispersionless crystal cannot reproduce the z-pathway angle."""
    with pytest.raises(CalibrationError, match=r"theta_deg\[z\]") as excinfo:
        reproduce_reference(constant_material)
    best = excinfo.value.best
    assert best is not None
    assert not best.accepted
    failing = best.table.loc[~best.table["within_tolerance"]]
    assert set(zip(failing["pathway"], failing["quantity"])) == {("z", "theta_deg")}


def test_best_constant_factor_balances_extremes():
    """The factor equalizes the largest over- and under-shoot."""
    factor = best_constant_factor([1.0, 1.0], [1.1, 0.9])
    assert factor == pytest.approx(0.99, rel=1e-12)
    deviations = [abs(factor * c / r - 1.0) for c, r in zip([1.0, 1.0], [1.1, 0.9])]
    assert deviations[0] == pytest.approx(deviations[1], rel=1e-12)


def test_within_tolerance_uses_absolute_degrees():
    """θ is judged in absolute degrees, the rest relatively."""
    frame = pd.DataFrame(
        {
            "quantity": ["A", "B", "C", "theta_deg", "theta_deg"],
            "relative_deviation": [0.14, 0.16, 0.05, 0.5, 0.01],
            "absolute_deviation": [0.0, 0.0, 0.0, 1.9, 2.1],
        }
    )
    assert within_tolerance(frame).tolist() == [True, False, True, True, False]
    assert TOLERANCES["theta_deg"] == 2.0


def test_reference_columns_cover_both_pathways():
    """Published values exist for the y and z pathways."""
    assert {column.pathway for column in REFERENCE_COLUMNS} == {"y", "z"}


def test_optic_axis_along_x_puts_signal_and_idler_on_extraordinary():
    """With the optic axis along x the z pathway's photons see n_e."""
    branches_y, branches_z = optic_axis_branches("x")
    assert branches_y.code == "o/o/o"
    assert branches_z.code == "o/e/e"


def test_iter_candidates_rejects_unknown_inputs():
    """Unknown branch spaces and conventions are configuration errors."""
    with pytest.raises(ConfigurationError, match="branch space"):
        list(iter_candidates("diagonal"))
    with pytest.raises(ConfigurationError, match="convention"):
        list(iter_candidates(conventions=["c/lc^2"]))


def test_free_sweep_enumerates_all_assignments():
    """Eight assignments per pathway give 64 free candidates per convention."""
    assert len(list(iter_candidates("free", conventions=["2pi*c/lc"]))) == 64
