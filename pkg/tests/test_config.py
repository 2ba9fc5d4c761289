"""Tests for run configuration loading."""

import json
from pathlib import Path

import pytest

from biphoton_design.calibration import reference_targets
from biphoton_design.config import (
    MATERIALS_ENV_VAR,
    RunConfig,
    load_run_config,
    material_directories,
    resolve_material,
)
from biphoton_design.dispersion import AxisAssignment
from biphoton_design.errors import ConfigurationError, MaterialDatabaseError

REFERENCE_FILE = {
    "signal_wavelength_nm": 800,
    "idler_wavelength_nm": 1500,
    "signal_coherence_length": 1e-3,
    "idler_coherence_length": 1e-2,
}


def _material_document(name: str) -> dict:
    branch = {"form": "constant", "coeffs": [2.25], "range_um": [0.1, 5.0]}
    return {
        "name": name,
        "source": "test",
        "ordinary": branch,
        "extraordinary": branch,
        "chi2": {"yyy": 1.0, "zxx": 1.0},
    }


def test_defaults():
    """Defaults match the reference calibration."""
    config = RunConfig()
    assert config.convention == "2pi*c/lc"
    assert config.grid_size == 256
    assert config.span_sigma == 5.0
    assert config.mode == "full"
    assert config.branches_y.code == "o/o/o"
    assert config.branches_z.code == "e/o/o"
    assert config.output_dir == Path(".")


def test_json_file_with_nanometre_keys(tmp_path):
    """Wavelengths may be given in nm; targets match the reference."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps(REFERENCE_FILE), encoding="utf-8")
    targets = load_run_config(path).targets()
    expected = reference_targets()
    assert targets.omega_s == pytest.approx(expected.omega_s, rel=1e-15)
    assert targets.omega_i == pytest.approx(expected.omega_i, rel=1e-15)
    assert targets.sigma_s == pytest.approx(expected.sigma_s, rel=1e-15)
    assert targets.sigma_i == pytest.approx(expected.sigma_i, rel=1e-15)


def test_yaml_file(tmp_path):
    """YAML configs are parsed and branch strings accepted."""
    path = tmp_path / "run.yaml"
    path.write_text(
        "signal_wavelength_um: 0.8\n"
        "idler_wavelength_um: 1.5\n"
        "signal_coherence_length: 1.0e-3\n"
        "idler_coherence_length: 1.0e-2\n"
        "branches: e/o/o\n"
        "mode: linearized\n"
        "grid_size: 64\n",
        encoding="utf-8",
    )
    config = load_run_config(path)
    assert config.mode == "linearized"
    assert config.grid_size == 64
    assert config.targets().branches == AxisAssignment("e", "o", "o")


def test_frequency_style_targets():
    """Targets can be given directly as ω and σ."""
    config = RunConfig(omega_s=2.4e15, omega_i=1.3e15, sigma_s=1e12, sigma_i=2e11)
    targets = config.targets(branches=AxisAssignment("e", "o", "o"))
    assert targets.sigma_i == 2e11
    assert targets.branches.code == "e/o/o"


@pytest.mark.parametrize(
    ("values", "match"),
    [
        ({}, "neither"),
        ({"omega_s": 2.4e15, "signal_wavelength": 8e-7}, "both"),
        ({"omega_s": 2.4e15, "omega_i": 1.3e15}, "missing"),
    ],
)
def test_target_style_errors(values, match):
    """Exactly one complete target style must be given."""
    with pytest.raises(ConfigurationError, match=match):
        RunConfig(**values).targets()


@pytest.mark.parametrize(
    ("values", "match"),
    [
        ({"grid_size": 8}, ">= 16"),
        ({"grid_size": True}, "integer"),
        ({"span_sigma": 0.0}, "span_sigma"),
        ({"mode": "quadratic"}, "Unknown mode"),
        ({"convention": "c/lc^2"}, "convention"),
        ({"branches": "o/o"}, "pump/signal/idler"),
        ({"branches_z": "q/o/o"}, "branches_z"),
    ],
)
def test_invalid_values(values, match):
    """Invalid settings are rejected when the config is built."""
    with pytest.raises(ConfigurationError, match=match):
        RunConfig(**values)


def test_unknown_file_key(tmp_path):
    """Unknown keys in a config file are rejected."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"grid": 64}), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="Unknown configuration keys"):
        load_run_config(path)


def test_duplicate_wavelength_keys(tmp_path):
    """The same wavelength in two units is ambiguous."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"signal_wavelength": 8e-7, "signal_wavelength_nm": 800}), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="more than once"):
        load_run_config(path)


def test_invalid_json(tmp_path):
    """Malformed JSON is a configuration error."""
    path = tmp_path / "run.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="not valid JSON"):
        load_run_config(path)


def test_flags_override_file(tmp_path):
    """Non-None overrides win over file values; None leaves them alone."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({**REFERENCE_FILE, "grid_size": 64, "mode": "linearized"}), encoding="utf-8")
    config = load_run_config(path).merged({"grid_size": 128, "mode": None})
    assert config.grid_size == 128
    assert config.mode == "linearized"


def test_merged_rejects_unknown_keys():
    """Overrides must name config fields."""
    with pytest.raises(ConfigurationError, match="Unknown configuration keys"):
        RunConfig().merged({"colour": "blue"})


def test_material_directory_from_environment(tmp_path, monkeypatch):
    """The environment variable adds a database directory searched first."""
    (tmp_path / "custom.json").write_text(json.dumps(_material_document("CUSTOM")), encoding="utf-8")
    monkeypatch.setenv(MATERIALS_ENV_VAR, str(tmp_path))
    assert material_directories()[0] == tmp_path
    assert resolve_material("custom").name == "CUSTOM"
    assert resolve_material().name == "BBO"


def test_material_file_from_environment(tmp_path, monkeypatch):
    """An environment variable naming a file selects that material by default."""
    path = tmp_path / "custom.json"
    path.write_text(json.dumps(_material_document("CUSTOM")), encoding="utf-8")
    monkeypatch.setenv(MATERIALS_ENV_VAR, str(path))
    assert resolve_material().name == "CUSTOM"


def test_unknown_material(monkeypatch):
    """Unknown material names raise a database error."""
    monkeypatch.delenv(MATERIALS_ENV_VAR, raising=False)
    with pytest.raises(MaterialDatabaseError, match="available"):
        resolve_material("UNOBTAINIUM")
