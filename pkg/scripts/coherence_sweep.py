#!/usr/bin/env python3
"""Quartic coherence-breakdown sweep.

Runs the two-solver comparison (semi-Lagrangian transport vs split-operator
wave evolution) for a family of quartic couplings and for a sigma sweep at
fixed coupling, then writes the residual tables and an SVG overview.

Usage: python3 scripts/coherence_sweep.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np

from phaselab import GaussianCoherentParams, PotentialSpec, Units, construct_grid
from phaselab.coherence import coherence_residual
from phaselab.quantum import gaussian_packet, glauber_wavefunction
from phaselab.checkpoint import write_csv
from phaselab.svgplot import plot_series


def quartic(c4):
    return PotentialSpec.polynomial(0.0, 0.0, 0.5, 0.0, c4)


def main(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    units = Units()
    grid = construct_grid(256, (-12.0, 12.0), 1.0)
    psi = glauber_wavefunction(
        GaussianCoherentParams(a=1.0, b=1.0, X=2.0), units, grid)

    rows = []
    for c4 in (0.0, 0.01, 0.03, 0.1):
        rep = coherence_residual(psi, quartic(c4), 1.0, 1e-3, units,
                                 n_samples=20)
        for t, r in zip(rep.times, rep.residual_norm):
            rows.append([c4, t, r])
        print(f"c4={c4:<5g} final residual {rep.final_residual:.3e}")
    write_csv(outdir / "quartic_sweep.csv", ["c4", "t", "residual"],
              np.array(rows))

    # residual rate scales with sigma^2 at short times
    tau = 0.05
    sig_rows = []
    for sigma, span in ((0.5, 16.0), (1.0, 16.0), (2.0, 24.0)):
        g = construct_grid(256, (-span / 2, span / 2), sigma)
        pkt = gaussian_packet(g, 2.0, sigma ** 2 / 2.0, 0.0, sigma)
        rep = coherence_residual(pkt, quartic(0.1), tau, 1e-3,
                                 Units(sigma=sigma), n_samples=1)
        rate = rep.final_residual / tau
        sig_rows.append([sigma, rate, rate / sigma ** 2])
        print(f"sigma={sigma:<4g} rate {rate:.3e}  rate/sigma^2 "
              f"{rate / sigma ** 2:.3e}")
    write_csv(outdir / "sigma_sweep.csv",
              ["sigma", "rate", "rate_over_sigma2"], np.array(sig_rows))

    arr = np.array(rows)
    c4_values = (0.0, 0.01, 0.03, 0.1)
    t = arr[arr[:, 0] == 0.0][:, 1]
    table = np.column_stack(
        [t] + [arr[arr[:, 0] == c4][:, 2] for c4 in c4_values])
    plot_series(["t"] + [f"c4={c4:g}" for c4 in c4_values], table,
                outdir / "quartic_sweep.svg")
    print(f"wrote {outdir}/quartic_sweep.csv, sigma_sweep.csv, "
          f"quartic_sweep.svg")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/coherence"))
