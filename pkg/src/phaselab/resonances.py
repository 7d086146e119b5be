"""Resonance mass-width systematics.

Hadron resonances with width Gamma and mass M cluster around straight
lines M = s*Gamma + C with a common slope s ~ 2.1 and a family-dependent
intercept (different for mesons and baryons).  Since the lifetime is
tau = hbar/Gamma and hbar/M sets an elementary time scale for a particle
of mass M, the slope bound expresses tau >= 2.1 * hbar/M for every
record on or above the line.

This module loads resonance tables from CSV, fits the line (free slope
or slope pinned at 2.1), and evaluates the lifetime ratio M/Gamma per
record.  Two small reference tables are bundled with the package.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .core import ValidationError

DEFAULT_SLOPE = 2.1
#: widths (MeV) below which records fall outside the linear window
MESON_WIDTH_MIN = 8.43
BARYON_WIDTH_MIN = 15.6

_REQUIRED = ("name", "class", "jpc", "mass_mev", "width_mev")
_OPTIONAL = ("mass_err", "width_err")


@dataclass(frozen=True)
class ResonanceRecord:
    name: str
    family: str                 # "meson" or "baryon"
    jpc: str
    mass: float                 # MeV
    width: float                # MeV
    mass_err: Optional[float] = None
    width_err: Optional[float] = None

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValidationError(f"{self.name}: mass must be positive")
        if self.width <= 0.0:
            raise ValidationError(f"{self.name}: width must be positive")
        if self.family not in ("meson", "baryon"):
            raise ValidationError(
                f"{self.name}: class must be meson or baryon, got {self.family!r}")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept_C: float          # MeV
    rms_residual: float         # MeV
    n_records: int
    width_threshold: float      # MeV
    weighted: bool = False

    def predict(self, width: float) -> float:
        return predict_mass(width, self.slope, self.intercept_C)


def predict_mass(width: float, slope: float = DEFAULT_SLOPE,
                 intercept_C: float = 1222.0) -> float:
    """Mass estimate slope*width + C (MeV)."""
    if width <= 0.0:
        raise ValidationError("width must be positive")
    return slope * width + intercept_C


def load_resonances(path: Union[str, Path]) -> list[ResonanceRecord]:
    """Read a resonance table from CSV.

    Expected header: name,class,jpc,mass_mev,width_mev with optional
    mass_err,width_err columns.  Malformed rows raise with the offending
    line number; an empty file returns [] with a warning.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            warnings.warn(f"{path}: empty file, no records loaded")
            return []
        missing = [c for c in _REQUIRED if c not in reader.fieldnames]
        if missing:
            raise ValidationError(
                f"{path}: missing required columns {missing}")
        records = []
        for row in reader:
            line = reader.line_num
            try:
                mass = float(row["mass_mev"])
                width = float(row["width_mev"])
            except (TypeError, ValueError) as exc:
                raise ValidationError(
                    f"{path}:{line}: non-numeric mass/width: {exc}") from exc

            def _err(col):
                raw = row.get(col)
                if raw is None or raw.strip() == "":
                    return None
                try:
                    return float(raw)
                except ValueError as exc:
                    raise ValidationError(
                        f"{path}:{line}: non-numeric {col}: {exc}") from exc

            try:
                records.append(ResonanceRecord(
                    name=row["name"].strip(),
                    family=row["class"].strip(),
                    jpc=row["jpc"].strip(),
                    mass=mass, width=width,
                    mass_err=_err("mass_err"), width_err=_err("width_err")))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{line}: {exc}") from exc
    if not records:
        warnings.warn(f"{path}: no data rows found")
    return records


def _bundled(name: str) -> list[ResonanceRecord]:
    ref = resources.files("phaselab") / "data" / name
    with resources.as_file(ref) as p:
        return load_resonances(p)


def bundled_mesons() -> list[ResonanceRecord]:
    return _bundled("mesons.csv")


def bundled_baryons() -> list[ResonanceRecord]:
    return _bundled("baryons.csv")


def fit_line(records: Sequence[ResonanceRecord], mode: str = "fixed_slope",
             width_min: float = 0.0, slope: float = DEFAULT_SLOPE,
             weighted: Optional[bool] = None) -> FitResult:
    """Least squares of mass on width over records with width >= width_min.

    mode "fixed_slope" fits only the intercept (slope pinned, default
    2.1); mode "free" fits both parameters.  When weighted is None the
    fit uses 1/mass_err^2 weights if every selected record carries a
    mass error, otherwise uniform weights; pass True/False to force.
    """
    if mode not in ("fixed_slope", "free"):
        raise ValidationError(f"unknown fit mode {mode!r}")
    sel = [r for r in records if r.width >= width_min]
    need = 1 if mode == "fixed_slope" else 2
    if len(sel) < need:
        raise ValidationError(
            f"need at least {need} records above width_min={width_min}, "
            f"got {len(sel)}")
    M = np.array([r.mass for r in sel])
    G = np.array([r.width for r in sel])
    if weighted is None:
        weighted = all(r.mass_err is not None and r.mass_err > 0 for r in sel)
    if weighted:
        errs = [r.mass_err for r in sel]
        if any(e is None or e <= 0 for e in errs):
            raise ValidationError("weighted fit requires positive mass_err "
                                  "on every record")
        w = 1.0 / np.array(errs) ** 2
    else:
        w = np.ones_like(M)

    if mode == "fixed_slope":
        C = float(np.sum(w * (M - slope * G)) / np.sum(w))
        s = slope
    else:
        # weighted normal equations for M = s*G + C
        A = np.stack([G, np.ones_like(G)], axis=1)
        sw = np.sqrt(w)
        coef, *_ = np.linalg.lstsq(A * sw[:, None], M * sw, rcond=None)
        s, C = float(coef[0]), float(coef[1])
    res = M - (s * G + C)
    rms = float(np.sqrt(np.mean(res ** 2)))
    return FitResult(slope=s, intercept_C=C, rms_residual=rms,
                     n_records=len(sel), width_threshold=width_min,
                     weighted=bool(weighted))


def lifetime_ratio(record: ResonanceRecord) -> tuple[float, bool]:
    """M/Gamma for one record, with a flag when the ratio drops below 2.1.

    In natural units M/Gamma is the lifetime measured in units of the
    elementary time hbar/M, so values below the fit slope violate the
    lower bound encoded by the line.
    """
    ratio = record.mass / record.width
    return ratio, ratio < DEFAULT_SLOPE


def fit_report(records: Sequence[ResonanceRecord], result: FitResult) -> dict:
    """JSON-ready report: fit parameters plus per-record residuals."""
    rows = []
    for r in records:
        if r.width < result.width_threshold:
            continue
        pred = result.predict(r.width)
        ratio, viol = lifetime_ratio(r)
        rows.append({"name": r.name, "class": r.family,
                     "width_mev": r.width, "mass_mev": r.mass,
                     "predicted_mass_mev": pred,
                     "residual_mev": r.mass - pred,
                     "lifetime_ratio": ratio,
                     "bound_violation": viol})
    return {"slope": result.slope, "intercept_C": result.intercept_C,
            "rms_residual": result.rms_residual,
            "n_records": result.n_records,
            "width_threshold": result.width_threshold,
            "weighted": result.weighted,
            "records": rows}


def write_report(report: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")
