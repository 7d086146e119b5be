"""Scenario-driven command line front end.

One config file (TOML or JSON) describes one scenario: which experiment
to run, the grid, the potential, the initial state, time stepping, and
where outputs go.  Outputs are deterministic: CSVs use exact float64
round-trip formatting and any randomness requires an explicit seed, so
re-running a spec reproduces files byte for byte.

Subcommands:
    run <spec>                    execute one scenario
    batch <dir> [--jobs N]        run every spec file in a directory
    fit-resonances <csv> [...]    mass-width line fit with report JSON
    plot <csv> --out <svg>        render a CSV time series as SVG

Exit codes: 0 success, 2 validation error, 3 runtime solver failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import checkpoint as ckpt
from . import svgplot
from .classical import LiouvillePropagator, gaussian_coherent_state
from .coherence import coherence_residual
from .core import (GaussianCoherentParams, Grid1D, GridError, PhaseField,
                   PotentialSpec, ThermalParams, Units, ValidationError,
                   WaveField, construct_grid, evaluate_potential)
from .quantum import (SplitOperatorPropagator, gaussian_packet,
                      glauber_wavefunction, stationary_states)
from .resonances import (DEFAULT_SLOPE, bundled_baryons, bundled_mesons,
                         fit_line, fit_report, load_resonances, write_report)
from .thermal import (FokkerPlanckPropagator, boltzmann_equilibrium,
                      relative_entropy)
from .transforms import entropy, moments, wigner

EXPERIMENTS = ("wigner", "evolve-classical", "evolve-quantum",
               "coherence-scan", "thermal", "fit-resonances", "eigens")

OUTPUT_ROOT_ENV = "PHASELAB_OUTPUT_ROOT"

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3


@dataclass
class ScenarioSpec:
    """Validated scenario configuration (one config file = one run)."""

    experiment: str
    name: str = "scenario"
    grid: dict = field(default_factory=dict)
    potential: dict = field(default_factory=dict)
    initial_state: dict = field(default_factory=dict)
    time: dict = field(default_factory=dict)
    thermal: dict = field(default_factory=dict)
    units: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    eigens: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(
                f"unknown experiment {self.experiment!r}; "
                f"choose one of {EXPERIMENTS}")


def load_spec(path: Path) -> ScenarioSpec:
    """Parse a TOML or JSON scenario file into a validated ScenarioSpec."""
    text = path.read_bytes()
    if path.suffix == ".json":
        data = json.loads(text)
    else:
        try:
            data = tomllib.loads(text.decode())
        except tomllib.TOMLDecodeError:
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                raise ValidationError(f"{path}: neither valid TOML nor JSON")
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top level must be a table/object")
    known = {f.name for f in dataclasses.fields(ScenarioSpec)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"{path}: unknown keys {sorted(unknown)}")
    if "experiment" not in data:
        raise ValidationError(f"{path}: missing required key 'experiment'")
    spec = ScenarioSpec(**data)
    if not spec.output.get("dir"):
        spec.output["dir"] = os.environ.get(OUTPUT_ROOT_ENV, "out")
    if spec.name == "scenario":
        spec.name = path.stem
    return spec


def _build_units(spec: ScenarioSpec) -> Units:
    u = spec.units
    return Units(sigma=float(u.get("sigma", 1.0)),
                 mass=float(u.get("mass", 1.0)),
                 k_boltzmann=float(u.get("k_boltzmann", 1.0)))


def _build_grid(spec: ScenarioSpec, units: Units) -> Grid1D:
    g = spec.grid
    if "n_q" not in g:
        raise ValidationError("grid.n_q is required")
    n_q = int(g["n_q"])
    if "q_min" in g or "q_max" in g:
        span = (float(g["q_min"]), float(g["q_max"]))
    else:
        half = 0.5 * float(g.get("q_span", 16.0))
        span = (-half, half)
    return construct_grid(n_q, span, units.sigma)


def _build_potential(spec: ScenarioSpec, units: Units) -> PotentialSpec:
    p = dict(spec.potential) or {"kind": "free"}
    kind = p.pop("kind", "polynomial")
    if kind == "free":
        return PotentialSpec.free()
    if kind == "harmonic":
        return PotentialSpec.harmonic(float(p.get("omega", 1.0)), units.mass)
    if kind == "polynomial":
        coeffs = [float(p.get(f"c{i}", 0.0)) for i in range(5)]
        return PotentialSpec.polynomial(*coeffs)
    raise ValidationError(f"unknown potential kind {kind!r}")


def _build_wave(spec: ScenarioSpec, grid: Grid1D, units: Units) -> WaveField:
    st = spec.initial_state
    kind = st.get("kind", "glauber")
    if kind == "glauber":
        omega = float(st.get("omega", 1.0))
        b = units.sigma / (units.mass * omega)
        params = GaussianCoherentParams(
            a=units.sigma * units.mass * omega, b=b,
            X=float(st.get("center", 0.0)),
            Y=float(st.get("momentum", 0.0)),
            omega=omega, mass=units.mass)
        return glauber_wavefunction(params, units, grid)
    if kind == "packet":
        return gaussian_packet(grid,
                               center=float(st.get("center", 0.0)),
                               width_a=float(st.get("width", 1.0)),
                               momentum=float(st.get("momentum", 0.0)),
                               sigma=units.sigma)
    if kind == "random":
        if spec.seed is None:
            raise ValidationError("random initial state needs an explicit "
                                  "top-level seed")
        rng = np.random.default_rng(spec.seed)
        raw = rng.standard_normal(grid.n_q) + 1j * rng.standard_normal(grid.n_q)
        envelope = np.exp(-(grid.q / (0.25 * (grid.q_max - grid.q_min))) ** 2)
        vals = raw * envelope
        vals /= np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dq)
        return WaveField(grid, vals)
    raise ValidationError(f"unknown initial state kind {kind!r}")


def _build_phase_field(spec: ScenarioSpec, grid: Grid1D,
                       units: Units) -> PhaseField:
    st = spec.initial_state
    kind = st.get("kind", "glauber")
    if kind in ("glauber", "packet", "random"):
        return wigner(_build_wave(spec, grid, units))
    if kind == "gaussian-phase":
        wq = float(st.get("width_q", 1.0))
        wp = float(st.get("width_p", 1.0))
        q0 = float(st.get("center", 0.0))
        p0 = float(st.get("momentum", 0.0))
        gq = np.exp(-((grid.q - q0) / wq) ** 2 / 2)
        gp = np.exp(-((grid.p - p0) / wp) ** 2 / 2)
        vals = np.outer(gq, gp)
        vals /= vals.sum() * grid.cell_area()
        return PhaseField(grid, vals, classical=True)
    raise ValidationError(f"unknown initial state kind {kind!r}")


def _time_params(spec: ScenarioSpec) -> tuple[float, float, int]:
    t = spec.time
    t_final = float(t.get("t_final", 1.0))
    dt = float(t.get("dt", 1e-3))
    sample_every = int(t.get("sample_every", max(1, int(round(t_final / dt)) // 50)))
    if t_final <= 0 or dt <= 0:
        raise ValidationError("time.t_final and time.dt must be positive")
    return t_final, dt, sample_every


def _out_dir(spec: ScenarioSpec) -> Path:
    d = Path(spec.output["dir"])
    d.mkdir(parents=True, exist_ok=True)
    return d


def _series_row(t: float, f: PhaseField, V: PotentialSpec,
                units: Units) -> list[float]:
    m = moments(f, V, units)
    try:
        s = entropy(f, units)
    except ValidationError:
        s = float("nan")
    return [t, m.mass, m.mean_q, m.mean_p, m.mean_H, s]


def run_scenario(spec: ScenarioSpec) -> list[Path]:
    """Execute one scenario; returns the files written."""
    units = _build_units(spec)
    outputs: list[Path] = []
    out = _out_dir(spec)
    name = spec.name

    if spec.experiment == "fit-resonances":
        table = spec.fit.get("table", "")
        if table == "mesons":
            records = bundled_mesons()
        elif table == "baryons":
            records = bundled_baryons()
        elif table:
            records = load_resonances(table)
        else:
            records = bundled_mesons() + bundled_baryons()
        result = fit_line(records,
                          mode=spec.fit.get("mode", "fixed_slope"),
                          width_min=float(spec.fit.get("width_min", 0.0)),
                          slope=float(spec.fit.get("slope", DEFAULT_SLOPE)))
        report_path = out / f"{name}_fit.json"
        write_report(fit_report(records, result), report_path)
        svg_path = out / f"{name}_fit.svg"
        svgplot.plot_resonances(np.array([r.width for r in records]),
                                np.array([r.mass for r in records]),
                                result.intercept_C, svg_path,
                                slope=result.slope)
        return [report_path, svg_path]

    grid = _build_grid(spec, units)
    V = _build_potential(spec, units)

    if spec.experiment == "wigner":
        psi = _build_wave(spec, grid, units)
        f = wigner(psi)
        cp = out / f"{name}_wigner.cpw"
        ckpt.save_checkpoint(f, cp, units)
        marg_path = out / f"{name}_marginals.csv"
        rows = [[grid.q[i],
                 float(f.values[i].sum() * grid.dp),
                 float(np.abs(psi.values[i]) ** 2)] for i in range(grid.n_q)]
        ckpt.write_csv(marg_path, ["q", "density_from_wigner", "density_from_psi"],
                       rows)
        return [cp, cp.with_name(cp.name + ".json"), marg_path]

    if spec.experiment == "eigens":
        count = int(spec.eigens.get("count", 8))
        pairs = stationary_states(V, units, count, grid)
        csv_path = out / f"{name}_eigens.csv"
        ckpt.write_csv(csv_path, ["level", "energy"],
                       [[float(i), p.energy] for i, p in enumerate(pairs)])
        outputs.append(csv_path)
        for i, p in enumerate(pairs):
            cp = out / f"{name}_state{i:03d}.cpw"
            ckpt.save_checkpoint(p.state, cp, units)
            outputs.append(cp)
        return outputs

    t_final, dt, sample_every = _time_params(spec)
    n_steps = max(1, int(round(t_final / dt)))

    if spec.experiment == "coherence-scan":
        psi = _build_wave(spec, grid, units)
        report = coherence_residual(psi, V, t_final, dt, units)
        csv_path = out / f"{name}_residual.csv"
        ckpt.write_csv(csv_path, ["t", "residual", "moyal_norm"],
                       [[t, r, m] for t, r, m in
                        zip(report.times, report.residual_norm,
                            report.moyal_estimate)])
        svg_path = out / f"{name}_residual.svg"
        header, data = ckpt.read_csv(csv_path)
        svgplot.plot_series(header[:2], data[:, :2], svg_path, kind="line")
        return [csv_path, svg_path]

    if spec.experiment == "evolve-classical":
        f = _build_phase_field(spec, grid, units)
        prop = LiouvillePropagator(grid, V, dt, units)
        rows = [_series_row(0.0, f, V, units)]
        prop_run = prop.run(f, n_steps, sample_every,
                            observer=lambda i, g: rows.append(
                                _series_row(i * dt, g, V, units)))
        csv_path = out / f"{name}_series.csv"
        ckpt.write_csv(csv_path,
                       ["t", "mass", "mean_q", "mean_p", "mean_H", "entropy"],
                       rows)
        cp = out / f"{name}_final.cpw"
        ckpt.save_checkpoint(prop_run, cp, units)
        return [csv_path, cp]

    if spec.experiment == "evolve-quantum":
        psi = _build_wave(spec, grid, units)
        prop = SplitOperatorPropagator(grid, V, dt, units)
        rows = [_series_row(0.0, wigner(psi), V, units)]
        final = prop.run(psi, n_steps, sample_every,
                         observer=lambda i, w: rows.append(
                             _series_row(i * dt, wigner(w), V, units)))
        csv_path = out / f"{name}_series.csv"
        ckpt.write_csv(csv_path,
                       ["t", "mass", "mean_q", "mean_p", "mean_H", "entropy"],
                       rows)
        cp = out / f"{name}_final.cpw"
        ckpt.save_checkpoint(final, cp, units)
        return [csv_path, cp]

    if spec.experiment == "thermal":
        tp = ThermalParams(gamma=float(spec.thermal.get("gamma", 1.0)),
                           temperature=float(spec.thermal.get("temperature", 1.0)),
                           k_boltzmann=units.k_boltzmann)
        f = _build_phase_field(spec, grid, units)
        f_eq = boltzmann_equilibrium(V, tp.beta, units, grid)
        prop = FokkerPlanckPropagator(grid, V, tp, dt, units)
        rows = [_series_row(0.0, f, V, units)
                + [relative_entropy(f, f_eq)]]
        final = prop.run(f, n_steps, sample_every,
                         observer=lambda i, g: rows.append(
                             _series_row(i * dt, g, V, units)
                             + [relative_entropy(g, f_eq)]))
        csv_path = out / f"{name}_series.csv"
        ckpt.write_csv(csv_path,
                       ["t", "mass", "mean_q", "mean_p", "mean_H",
                        "entropy", "relative_entropy"], rows)
        cp = out / f"{name}_final.cpw"
        ckpt.save_checkpoint(final, cp, units)
        return [csv_path, cp]

    raise ValidationError(f"unhandled experiment {spec.experiment!r}")


def _run_spec_path(path_str: str) -> tuple[str, int, str]:
    """Worker for batch mode: returns (path, exit code, message)."""
    path = Path(path_str)
    try:
        spec = load_spec(path)
    except (ValidationError, GridError, OSError) as exc:
        return path_str, EXIT_VALIDATION, str(exc)
    try:
        files = run_scenario(spec)
    except (ValidationError, GridError) as exc:
        return path_str, EXIT_VALIDATION, str(exc)
    except Exception as exc:  # solver failures: partial outputs flagged
        return path_str, EXIT_RUNTIME, f"runtime failure: {exc}"
    return path_str, EXIT_OK, f"{len(files)} files"


def _cmd_run(args) -> int:
    _, code, msg = _run_spec_path(args.spec)
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    print(f"{args.spec}: {msg}", file=stream)
    return code


def _cmd_batch(args) -> int:
    root = Path(args.directory)
    specs = sorted(str(p) for p in root.iterdir()
                   if p.suffix in (".toml", ".json"))
    if not specs:
        print(f"{root}: no .toml/.json specs found", file=sys.stderr)
        return EXIT_VALIDATION
    worst = EXIT_OK
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_spec_path, specs))
    else:
        results = [_run_spec_path(s) for s in specs]
    for path, code, msg in results:
        print(f"{path}: exit {code}: {msg}",
              file=sys.stdout if code == EXIT_OK else sys.stderr)
        worst = max(worst, code)
    return worst


def _cmd_fit(args) -> int:
    try:
        records = load_resonances(args.csv)
        mode = "free" if args.free else "fixed_slope"
        result = fit_line(records, mode=mode, width_min=args.width_min,
                          slope=args.slope)
    except (ValidationError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    report = fit_report(records, result)
    if args.out:
        write_report(report, args.out)
    else:
        json.dump(report, sys.stdout, indent=2)
        print()
    if args.svg:
        sel = [r for r in records if r.width >= args.width_min]
        svgplot.plot_resonances(np.array([r.width for r in sel]),
                                np.array([r.mass for r in sel]),
                                result.intercept_C, args.svg,
                                slope=result.slope)
    return EXIT_OK


def _cmd_plot(args) -> int:
    try:
        header, data = ckpt.read_csv(args.csv)
        svgplot.plot_series(header, data, args.out, kind=args.kind)
    except (ValidationError, OSError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaselab",
        description="phase-space dynamics scenarios, fits, and plots")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario spec (TOML/JSON)")
    p_run.add_argument("spec")
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch", help="run every spec in a directory")
    p_batch.add_argument("directory")
    p_batch.add_argument("--jobs", type=int, default=1)
    p_batch.set_defaults(func=_cmd_batch)

    p_fit = sub.add_parser("fit-resonances",
                           help="mass-width line fit on a resonance CSV")
    p_fit.add_argument("csv")
    p_fit.add_argument("--slope", type=float, default=DEFAULT_SLOPE)
    p_fit.add_argument("--width-min", type=float, default=0.0)
    p_fit.add_argument("--free", action="store_true",
                       help="fit slope too instead of pinning it")
    p_fit.add_argument("--out", help="write report JSON here")
    p_fit.add_argument("--svg", help="write a scatter/overlay SVG here")
    p_fit.set_defaults(func=_cmd_fit)

    p_plot = sub.add_parser("plot", help="render a numeric CSV as SVG")
    p_plot.add_argument("csv")
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--kind", choices=("line", "scatter"),
                        default="line")
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
