"""
Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 physics/domain failure, 4 I/O failure.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import pandas as pd

from biphoton_design import calibration
from biphoton_design.biphoton import (
    FrequencyGrid,
    jsa_closed_form,
    jsa_from_pump,
    map_pump_to_photon_coords,
    marginals,
    pump_overlay,
    recipe_pump,
    schmidt_analysis,
)
from biphoton_design.config import JSA_MODES, RunConfig, load_run_config, material_directories, resolve_material
from biphoton_design.dispersion import list_materials, load_material_json, validate_reference_indices
from biphoton_design.errors import CalibrationError, PhysicsError
from biphoton_design.export import (
    jsa_metadata,
    metadata_path,
    read_json_document,
    read_jsa_csv,
    write_grid_csv,
    write_jsa_csv,
    write_jsa_parquet,
    write_json_document,
)
from biphoton_design.polarization import entangled_design
from biphoton_design.pump import COHERENCE_CONVENTIONS, PumpRecipe, design_recipe, recipe_from_dict, recipe_to_dict

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_PHYSICS = 3
EXIT_IO = 4


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Translate library exceptions into coloured messages and exit codes."""
    ctx = click.get_current_context()
    try:
        yield
    except PhysicsError as exc:
        click.secho(f"Error: {exc}", fg="red", err=True)
        ctx.exit(EXIT_PHYSICS)
    except (ValueError, TypeError, KeyError) as exc:
        click.secho(f"Error: {exc}", fg="red", err=True)
        ctx.exit(EXIT_INPUT)
    except OSError as exc:
        click.secho(f"I/O error: {exc}", fg="red", err=True)
        ctx.exit(EXIT_IO)


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("biphoton_design").setLevel(level)


@click.group()
@click.option("-v", "--verbose", count=True, help="Log progress (-v) or debug detail (-vv).")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors.")
def cli(verbose: int, quiet: bool) -> None:
    """Design pump pulses for frequency-uncorrelated photon pairs."""
    _configure_logging(verbose, quiet)


# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------

def _target_options(func: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option("-c", "--config", "config_path", type=click.Path(path_type=Path), help="JSON or YAML run configuration."),
        click.option("--material", help="Material name or database file."),
        click.option("--reference-targets", "use_reference", is_flag=True, help="Use the reference BBO targets (0.8 μm/1 mm, 1.5 μm/1 cm)."),
        click.option("--signal-wavelength-nm", type=float, help="Signal center wavelength (nm)."),
        click.option("--idler-wavelength-nm", type=float, help="Idler center wavelength (nm)."),
        click.option("--signal-coherence-length", type=float, help="Signal coherence length (m)."),
        click.option("--idler-coherence-length", type=float, help="Idler coherence length (m)."),
        click.option("--omega-s", type=float, help="Signal center frequency (rad/s)."),
        click.option("--omega-i", type=float, help="Idler center frequency (rad/s)."),
        click.option("--sigma-s", type=float, help="Signal amplitude bandwidth (rad/s)."),
        click.option("--sigma-i", type=float, help="Idler amplitude bandwidth (rad/s)."),
        click.option("--branches", help="Pump/signal/idler branches, e.g. 'e/o/o'."),
        click.option("--convention", type=click.Choice(sorted(COHERENCE_CONVENTIONS)), help="Coherence-length convention."),
        click.option("-o", "--out", "output_dir", type=click.Path(path_type=Path), help="Output directory."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _build_config(config_path: Path | None, use_reference: bool, **flags: Any) -> RunConfig:
    """Defaults < config file < flags."""
    config = RunConfig()
    if config_path is not None:
        config = load_run_config(config_path, config)
    if use_reference:
        config = config.merged(
            {
                "signal_wavelength": calibration.REFERENCE_SIGNAL_WAVELENGTH,
                "idler_wavelength": calibration.REFERENCE_IDLER_WAVELENGTH,
                "signal_coherence_length": calibration.REFERENCE_SIGNAL_COHERENCE,
                "idler_coherence_length": calibration.REFERENCE_IDLER_COHERENCE,
            }
        )
    for photon in ("signal", "idler"):
        value = flags.pop(f"{photon}_wavelength_nm", None)
        if value is not None:
            flags[f"{photon}_wavelength"] = value * 1e-9
    return config.merged(flags)


def _print_recipes(recipes: dict[str, PumpRecipe]) -> None:
    rows = {
        "A (1e12 rad/s)": [r.A / 1e12 for r in recipes.values()],
        "B (1e3 rad/m)": [r.B / 1e3 for r in recipes.values()],
        "C (1e-9 s/m)": [r.C / 1e-9 for r in recipes.values()],
        "theta (deg)": [r.theta_deg for r in recipes.values()],
    }
    frame = pd.DataFrame(
        {label: [f"{value:.3g}" for value in values] for label, values in rows.items()},
        index=list(recipes),
    ).T
    click.echo(frame.to_string())


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@cli.command()
def materials() -> None:
    """List the materials in the database."""
    with _exit_codes():
        for name, path in sorted(list_materials(material_directories()).items()):
            material = load_material_json(path)
            problems = validate_reference_indices(material)
            status = "reference indices OK" if not problems else f"{len(problems)} reference mismatches"
            chi = ", ".join(f"{label}={value * 1e12:g} pm/V" for label, value in sorted(material.chi2.items()))
            click.echo(f"{name}: {material.source} [{chi}] ({status})")


@cli.command()
@_target_options
@click.option("--entangled", is_flag=True, help="Design both pump polarization components.")
@click.option("--branches-y", help="Branches of the y-polarized pathway.")
@click.option("--branches-z", help="Branches of the z-polarized pathway.")
@click.option("--phi", type=float, help="Relative pump phase (rad).")
def design(config_path: Path | None, use_reference: bool, entangled: bool, **flags: Any) -> None:
    """Derive the pump recipe (A, B, C, θ) for the requested spectra."""
    with _exit_codes():
        config = _build_config(config_path, use_reference, **flags)
        material = resolve_material(config.material)
        output_dir = config.output_dir
        if entangled:
            entangled_result = entangled_design(
                config.targets(),
                material,
                config.branches_y,
                config.branches_z,
                phi=config.phi,
                convention=config.convention if config.uses_wavelengths else None,
            )
            path = write_json_document(entangled_result.to_dict(), output_dir / "entangled_design.json")
            _print_recipes({"z": entangled_result.recipe_z, "y": entangled_result.recipe_y})
            click.echo(f"power ratio P_z/P_y = {entangled_result.power_ratio:.6g}")
        else:
            recipe = design_recipe(
                config.targets(),
                material,
                convention=config.convention if config.uses_wavelengths else None,
            )
            path = write_json_document(recipe_to_dict(recipe), output_dir / "recipe.json")
            _print_recipes({config.branches.code: recipe})
        click.secho(f"Wrote {path}", fg="green")


def _load_recipe(path: Path, pathway: str) -> PumpRecipe:
    document = read_json_document(path)
    if "recipe_y" in document:
        return recipe_from_dict(document[f"recipe_{pathway}"])
    return recipe_from_dict(document)


@cli.command()
@_target_options
@click.option("--recipe", "recipe_path", type=click.Path(path_type=Path), help="Recipe or entangled design JSON.")
@click.option("--pathway", type=click.Choice(["y", "z"]), default="z", show_default=True, help="Pathway of an entangled design.")
@click.option("--grid-size", type=int, help="Points per axis [default: 256].")
@click.option("--span-sigma", type=float, help="Half-width in units of σ [default: 5].")
@click.option("--mode", type=click.Choice(list(JSA_MODES)), help="Dispersion mode [default: full].")
@click.option("--overlay", is_flag=True, help="Also write the pump envelope in photon coordinates.")
@click.option("--parquet", is_flag=True, help="Also write a long-format Parquet grid.")
def jsa(
    config_path: Path | None,
    use_reference: bool,
    recipe_path: Path | None,
    pathway: str,
    overlay: bool,
    parquet: bool,
    **flags: Any,
) -> None:
    """Simulate the joint spectral amplitude and write it as CSV plus metadata."""
    with _exit_codes():
        config = _build_config(config_path, use_reference, **flags)
        if recipe_path is not None:
            recipe = _load_recipe(recipe_path, pathway)
            material = resolve_material(config.material or recipe.material or None)
        else:
            material = resolve_material(config.material)
            recipe = design_recipe(
                config.targets(),
                material,
                convention=config.convention if config.uses_wavelengths else None,
            )
        targets = recipe.targets
        grid = FrequencyGrid.centered(targets, n=config.grid_size, span_sigma=config.span_sigma)

        if config.mode == "closed-form":
            amplitude = jsa_closed_form(targets, grid)
        else:
            amplitude = jsa_from_pump(
                recipe_pump(recipe),
                material,
                targets.branches,
                grid,
                mode=config.mode,
                centers=(targets.omega_s, targets.omega_i),
            )
        report = schmidt_analysis(amplitude)
        signal, idler = marginals(amplitude)

        csv_path = write_jsa_csv(amplitude, config.output_dir / "jsa.csv")
        document = jsa_metadata(
            amplitude,
            recipe=recipe_to_dict(recipe),
            schmidt=report.to_dict(),
            signal=signal.to_dict(),
            idler=idler.to_dict(),
        )
        if overlay:
            overlay_path = write_grid_csv(grid, pump_overlay(recipe, grid), config.output_dir / "pump_overlay.csv")
            document["overlay"] = overlay_path.name
        if parquet:
            document["parquet"] = write_jsa_parquet(amplitude, config.output_dir / "jsa.parquet").name
        write_json_document(document, metadata_path(csv_path))

        click.echo(f"Schmidt number K = {report.schmidt_number:.10g}")
        click.echo(f"Pearson correlation = {report.correlation:.3g}")
        click.secho(f"Wrote {csv_path}", fg="green")


@cli.command()
@click.argument("csv_path", type=click.Path(path_type=Path))
@click.option("-o", "--out", "output_path", type=click.Path(path_type=Path), help="Write the analysis as JSON.")
def analyze(csv_path: Path, output_path: Path | None) -> None:
    """Schmidt and marginal analysis of an existing JSA grid CSV."""
    with _exit_codes():
        amplitude = read_jsa_csv(csv_path)
        report = schmidt_analysis(amplitude)
        signal, idler = marginals(amplitude)
        click.echo(f"Schmidt number K = {report.schmidt_number:.10g}")
        click.echo(f"purity = {report.purity:.10g}")
        click.echo(f"entropy = {report.entropy:.6g} bits")
        click.echo(f"Pearson correlation = {report.correlation:.3g}")
        click.echo(f"signal center = {signal.center:.10g} rad/s, std = {signal.std:.6g} rad/s")
        click.echo(f"idler center = {idler.center:.10g} rad/s, std = {idler.std:.6g} rad/s")
        if output_path is not None:
            write_json_document(
                {"schmidt": report.to_dict(), "marginals": {"signal": signal.to_dict(), "idler": idler.to_dict()}},
                output_path,
            )


@cli.command("map-coords")
@_target_options
@click.option("--recipe", "recipe_path", type=click.Path(path_type=Path), help="Recipe or entangled design JSON.")
@click.option("--pathway", type=click.Choice(["y", "z"]), default="z", show_default=True)
@click.option("--k", "k", type=float, help="Pump wavevector component (rad/m) [default: k_p/n_p].")
@click.option("--omega", type=float, help="Pump frequency (rad/s) [default: ω_p].")
def map_coords(
    config_path: Path | None,
    use_reference: bool,
    recipe_path: Path | None,
    pathway: str,
    k: float | None,
    omega: float | None,
    **flags: Any,
) -> None:
    """Map a pump point (k, ω) to the photon frequencies it addresses."""
    with _exit_codes():
        config = _build_config(config_path, use_reference, **flags)
        if recipe_path is not None:
            recipe = _load_recipe(recipe_path, pathway)
        else:
            recipe = design_recipe(config.targets(), resolve_material(config.material))
        k = recipe.k_center if k is None else k
        omega = recipe.omega_p if omega is None else omega
        omega_s, omega_i = map_pump_to_photon_coords(recipe, k, omega)
        click.echo(f"omega_s = {omega_s:.17g}")
        click.echo(f"omega_i = {omega_i:.17g}")


@cli.command("reproduce-table1")
@click.option("--material", help="Material name or database file [default: BBO].")
@click.option("--branch-space", type=click.Choice(list(calibration.BRANCH_SPACES)), default="optic-axis", show_default=True)
@click.option("-o", "--out", "output_dir", type=click.Path(path_type=Path), default=Path("."), show_default=True)
def reproduce_reference_table(material: str | None, branch_space: str, output_dir: Path) -> None:
    """Calibrate against the published BBO pump parameters."""
    ctx = click.get_current_context()
    with _exit_codes():
        resolved = resolve_material(material)
        try:
            result = calibration.reproduce_reference(resolved, branch_space=branch_space)
        except CalibrationError as exc:
            if exc.best is not None:
                click.echo(exc.best.display_frame().to_string(index=False))
            click.secho(f"Error: {exc}", fg="red", err=True)
            ctx.exit(EXIT_PHYSICS)
        click.echo(f"calibration: {result.candidate.label}")
        click.echo(result.display_frame().to_string(index=False))
        click.echo(f"best constant factors: A x{result.factors['A']:.4g}, B x{result.factors['B']:.4g}")
        path = calibration.save_calibration(result, output_dir / "calibration.json")
        click.secho(f"Wrote {path}", fg="green")


def main() -> None:
    """Console-script entry point."""
    cli(prog_name="biphoton-design")


if __name__ == "__main__":
    main()
