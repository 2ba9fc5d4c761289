"""
Machine-readable output of designs and joint spectra.

JSA grids go to CSV (first row the ω_s axis, first column the ω_i axis,
body |φ|, every float with 17 significant digits) with a sidecar JSON
metadata document. A long-format Parquet export is available with the
optional ``parquet`` extra.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterator, Mapping
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from biphoton_design.biphoton import FrequencyGrid, JointSpectralAmplitude

logger = logging.getLogger(__name__)

CORNER_LABEL = "omega_i\\omega_s"
FLOAT_FORMAT = "%.17g"
LONG_COLUMNS = ("omega_s", "omega_i", "amplitude")


def _import_pyarrow_parquet() -> Any:
    """Import pyarrow.parquet lazily to keep the dependency optional."""
    try:
        import pyarrow.parquet as pq
    except ImportError as exc:  # pragma: no cover - environment dependent
        raise ImportError(
            "Parquet export requires the optional dependency. "
            "Install with: pip install 'biphoton-design[parquet]'"
        ) from exc
    return pq


def _import_pyarrow() -> Any:
    """Import pyarrow lazily for table conversion support."""
    try:
        import pyarrow as pa
    except ImportError as exc:  # pragma: no cover - environment dependent
        raise ImportError(
            "Parquet export requires the optional dependency. "
            "Install with: pip install 'biphoton-design[parquet]'"
        ) from exc
    return pa


def _output_path(path: str | Path, name: str = "path") -> Path:
    if not isinstance(path, (str, Path)):
        raise TypeError(f"{name} must be a str or pathlib.Path")
    output = Path(path).expanduser()
    output.parent.mkdir(parents=True, exist_ok=True)
    return output


def _labels(axis: NDArray[np.float64]) -> list[str]:
    return [FLOAT_FORMAT % value for value in axis]


def grid_frame(grid: FrequencyGrid, values: NDArray[np.float64]) -> pd.DataFrame:
    """Wide frame with ω_i rows and ω_s columns, labels pre-formatted."""
    frame = pd.DataFrame(values, index=_labels(grid.omega_i), columns=_labels(grid.omega_s))
    frame.index.name = CORNER_LABEL
    return frame


def write_grid_csv(grid: FrequencyGrid, values: NDArray[np.float64], path: str | Path) -> Path:
    """Write a grid of values in the JSA CSV layout."""
    output = _output_path(path)
    grid_frame(grid, values).to_csv(output, float_format=FLOAT_FORMAT)
    logger.debug("Wrote %dx%d grid to %s", *grid.shape, output)
    return output


def write_jsa_csv(jsa: JointSpectralAmplitude, path: str | Path) -> Path:
    """Write |φ| on the JSA grid as CSV."""
    return write_grid_csv(jsa.grid, np.abs(jsa.values), path)


def read_jsa_csv(path: str | Path, provenance: str = "imported") -> JointSpectralAmplitude:
    """Read a CSV written by :func:`write_jsa_csv`.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        ConfigurationError: If the axes are not valid frequency axes.
    """
    csv_path = Path(path).expanduser()
    if not csv_path.exists():
        raise FileNotFoundError(f"JSA grid does not exist: {csv_path}")
    frame = pd.read_csv(csv_path, index_col=0, float_precision="round_trip")
    grid = FrequencyGrid(
        omega_s=frame.columns.astype(float).to_numpy(),
        omega_i=frame.index.astype(float).to_numpy(),
    )
    return JointSpectralAmplitude(grid=grid, values=frame.to_numpy(dtype=float), provenance=provenance)


def write_json_document(document: Mapping[str, Any], path: str | Path) -> Path:
    """Write a JSON document with sorted keys and a trailing newline."""
    output = _output_path(path)
    output.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return output


def read_json_document(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).expanduser().read_text(encoding="utf-8"))


def metadata_path(csv_path: str | Path) -> Path:
    """Sidecar metadata path for a grid CSV (``name.csv`` → ``name.json``)."""
    return Path(csv_path).with_suffix(".json")


def jsa_metadata(
    jsa: JointSpectralAmplitude,
    *,
    recipe: Mapping[str, Any] | None = None,
    schmidt: Mapping[str, Any] | None = None,
    signal: Mapping[str, float] | None = None,
    idler: Mapping[str, float] | None = None,
    extra: Mapping[str, Any] | None = None,
) -> dict[str, Any]:
    """Assemble the sidecar document for a JSA grid."""
    document: dict[str, Any] = {
        "provenance": jsa.provenance,
        "grid": jsa.grid.to_dict(),
        "values": "abs(phi)",
    }
    if recipe is not None:
        document["recipe"] = dict(recipe)
    if schmidt is not None:
        document["schmidt"] = dict(schmidt)
    if signal is not None or idler is not None:
        document["marginals"] = {"signal": dict(signal or {}), "idler": dict(idler or {})}
    if extra:
        document.update(extra)
    return document


def _check_rows_per_chunk(rows_per_chunk: int) -> None:
    if isinstance(rows_per_chunk, bool) or not isinstance(rows_per_chunk, int):
        raise TypeError("rows_per_chunk must be an integer")
    if rows_per_chunk < 1:
        raise ValueError("rows_per_chunk must be >= 1")


def jsa_row_chunks(jsa: JointSpectralAmplitude, rows_per_chunk: int = 64) -> Iterator[pd.DataFrame]:
    """Yield long-format ``omega_s, omega_i, amplitude`` frames, ``rows_per_chunk`` ω_i rows each."""
    _check_rows_per_chunk(rows_per_chunk)
    omega_s = jsa.grid.omega_s
    for start in range(0, jsa.grid.omega_i.size, rows_per_chunk):
        block = jsa.values[start : start + rows_per_chunk]
        omega_i = jsa.grid.omega_i[start : start + rows_per_chunk]
        yield pd.DataFrame(
            {
                "omega_s": np.tile(omega_s, omega_i.size),
                "omega_i": np.repeat(omega_i, omega_s.size),
                "amplitude": block.ravel(),
            }
        )


def write_jsa_parquet(
    jsa: JointSpectralAmplitude,
    path: str | Path,
    *,
    rows_per_chunk: int = 64,
    compression: str = "snappy",
) -> Path:
    """Long-format Parquet export of a JSA (signed amplitudes).

    One float64 row per grid cell, ω_i-major, written ``rows_per_chunk`` ω_i
    rows at a time so the full long frame is never materialized. The schema
    metadata carries the provenance and the ``(N_i, N_s)`` grid shape.

    Raises:
        TypeError: If ``jsa``, ``path``, ``compression`` or ``rows_per_chunk``
            has the wrong type.
        ValueError: If ``compression`` is empty or ``rows_per_chunk`` < 1.
        ImportError: If ``pyarrow`` is not installed.
    """
    if not isinstance(jsa, JointSpectralAmplitude):
        raise TypeError("jsa must be a JointSpectralAmplitude")
    if not isinstance(compression, str):
        raise TypeError("compression must be a string")
    if not compression:
        raise ValueError("compression must not be empty")
    _check_rows_per_chunk(rows_per_chunk)
    output = _output_path(path)

    pq = _import_pyarrow_parquet()
    pa = _import_pyarrow()
    schema = pa.schema(
        [(name, pa.float64()) for name in LONG_COLUMNS],
        metadata={"provenance": jsa.provenance, "shape": json.dumps(list(jsa.grid.shape))},
    )
    with pq.ParquetWriter(str(output), schema, compression=compression) as writer:
        for chunk in jsa_row_chunks(jsa, rows_per_chunk):
            writer.write_table(pa.Table.from_pandas(chunk, schema=schema, preserve_index=False))
    logger.debug("Wrote %s JSA to %s", jsa.provenance, output)
    return output


__all__ = [
    "CORNER_LABEL",
    "grid_frame",
    "write_grid_csv",
    "write_jsa_csv",
    "read_jsa_csv",
    "write_json_document",
    "read_json_document",
    "metadata_path",
    "jsa_metadata",
    "jsa_row_chunks",
    "write_jsa_parquet",
]
