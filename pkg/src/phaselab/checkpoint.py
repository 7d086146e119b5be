"""Binary checkpoints and reproducible CSV emission.

Checkpoint layout: magic bytes b"CPW1", two little-endian uint32 values
(n_q, n_p), then the field values as float64 little-endian, row-major.
Complex fields (wave functions, density matrices) are stored as two
stacked real blocks (real part, then imaginary part), with the layout
noted in the JSON sidecar.  The sidecar <path>.json records the field
kind, grid bounds, and units so a checkpoint is self-describing.

CSV columns are formatted with repr(), which round-trips float64
exactly, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .core import (DensityMatrixField, Grid1D, PhaseField, Units,
                   ValidationError, WaveField, construct_grid)

MAGIC = b"CPW1"

Field = Union[PhaseField, WaveField, DensityMatrixField]

_KINDS = {PhaseField: "phase", WaveField: "wave",
          DensityMatrixField: "density_matrix"}


def _header(field: Field, units: Units) -> dict:
    g = field.grid
    kind = _KINDS[type(field)]
    meta = {
        "kind": kind,
        "n_q": g.n_q, "n_p": g.n_q,
        "q_min": g.q_min, "q_max": g.q_max,
        "sigma": g.sigma,
        "units": {"sigma": units.sigma, "mass": units.mass,
                  "k_boltzmann": units.k_boltzmann},
        "dtype": "float64-le",
        "layout": "row-major",
    }
    if np.iscomplexobj(field.values):
        meta["complex"] = "two stacked real blocks: real part then imag part"
    if isinstance(field, PhaseField):
        meta["classical"] = field.classical
    if isinstance(field, WaveField):
        meta["norm_target"] = field.norm_target
    return meta


def save_checkpoint(field: Field, path: Union[str, Path],
                    units: Units = Units()) -> None:
    """Write the field to <path> plus a JSON sidecar <path>.json."""
    path = Path(path)
    vals = np.asarray(field.values)
    if np.iscomplexobj(vals):
        payload = np.concatenate([vals.real[None], vals.imag[None]], axis=0)
    else:
        payload = vals[None] if vals.ndim == 1 else vals
    n_q = field.grid.n_q
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", n_q, n_q))
        fh.write(np.ascontiguousarray(payload, dtype="<f8").tobytes())
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(_header(field, units), indent=2) + "\n")


def load_checkpoint(path: Union[str, Path]) -> tuple[Field, Units]:
    """Read a checkpoint written by save_checkpoint."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    if not sidecar.exists():
        raise ValidationError(f"missing sidecar {sidecar}")
    meta = json.loads(sidecar.read_text())
    raw = path.read_bytes()
    if raw[:4] != MAGIC:
        raise ValidationError(f"{path}: bad magic {raw[:4]!r}")
    n_q, n_p = struct.unpack("<II", raw[4:12])
    if n_q != meta["n_q"] or n_p != meta["n_p"]:
        raise ValidationError(f"{path}: header/sidecar shape mismatch")
    data = np.frombuffer(raw[12:], dtype="<f8")
    units = Units(**meta["units"])
    grid = construct_grid(n_q, (meta["q_min"], meta["q_max"]), meta["sigma"])
    kind = meta["kind"]
    if kind == "phase":
        vals = data.reshape(n_q, n_q)
        field: Field = PhaseField(grid, vals,
                                  classical=meta.get("classical", False))
    elif kind == "wave":
        vals = data.reshape(2, n_q)
        field = WaveField(grid, vals[0] + 1j * vals[1],
                          norm_target=meta.get("norm_target", 1.0))
    elif kind == "density_matrix":
        vals = data.reshape(2, n_q, n_q)
        field = DensityMatrixField(grid, vals[0] + 1j * vals[1])
    else:
        raise ValidationError(f"{path}: unknown field kind {kind!r}")
    return field, units


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips the float64 exactly."""
    return repr(float(x))


def write_csv(path: Union[str, Path], header: Sequence[str],
              rows: Sequence[Sequence[float]]) -> None:
    """Write numeric rows with exact float64 round-trip formatting."""
    lines = [",".join(header)]
    ncol = len(header)
    for row in rows:
        if len(row) != ncol:
            raise ValidationError(
                f"row has {len(row)} fields, header has {ncol}")
        lines.append(",".join(format_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path: Union[str, Path]) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV written by write_csv; returns (header, array)."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise ValidationError(f"{path}: empty CSV")
    header = text[0].split(",")
    if len(text) == 1:
        return header, np.empty((0, len(header)))
    data = np.array([[float(v) for v in line.split(",")]
                     for line in text[1:]])
    if data.shape[1] != len(header):
        raise ValidationError(f"{path}: ragged CSV")
    return header, data
