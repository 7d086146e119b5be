"""Side-by-side classical/quantum evolution of Wigner functions.

A Wigner function evolved by the classical Liouville flow stays equal to
the Wigner function of the propagated wave function exactly when the
potential is polynomial of degree <= 2.  Beyond that the leading gap is
the third-derivative term

    dW_quantum/dt - dW_classical/dt = (sigma^2 / 24) V'''(q) d^3W/dp^3 + ...

These runs quantify the residual, its growth, and that leading estimate.
The "coherence residual" norm is the relative L2 over the whole grid,
recorded in every report header (the choice is this package's convention:
it is insensitive to the sign structure of Wigner tails).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .classical import LiouvillePropagator
from .core import PhaseField, PotentialSpec, Units, ValidationError, WaveField
from .quantum import SplitOperatorPropagator
from .transforms import wigner

__all__ = [
    "CoherenceReport",
    "coherence_residual",
    "moyal_correction",
    "superposition_check",
]

RESIDUAL_NORM_CONVENTION = "relative-L2-whole-grid"


@dataclass(frozen=True)
class CoherenceReport:
    """Residual time series of a two-solver comparison run."""

    times: np.ndarray = field(repr=False)
    residual_norm: np.ndarray = field(repr=False)
    potential_degree: int
    moyal_estimate: np.ndarray = field(repr=False)
    norm_convention: str = RESIDUAL_NORM_CONVENTION

    @property
    def final_residual(self) -> float:
        return float(self.residual_norm[-1])

    def max_residual(self) -> float:
        return float(self.residual_norm.max())


def _relative_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def third_p_derivative(f: PhaseField) -> np.ndarray:
    """d^3/dp^3 by multiplication with (-ik)^3 in the k representation."""
    g = f.grid
    shifted = sfft.ifftshift(f.values.astype(complex), axes=1)
    kappa = 2.0 * np.pi * sfft.fftfreq(g.n_q, g.dp)
    out = sfft.ifft((1j * kappa[None, :]) ** 3 * sfft.fft(shifted, axis=1), axis=1)
    return np.real(sfft.fftshift(out, axes=1))


def moyal_correction(W: PhaseField, V: PotentialSpec,
                     units: Units = Units()) -> PhaseField:
    """(sigma^2/24) V'''(q) d^3W/dp^3, the leading classical/quantum gap.

    Zero field for potentials of degree < 3 (there is no gap to estimate).
    """
    if V.kind != "polynomial":
        raise ValidationError("moyal correction needs a polynomial potential")
    if V.degree < 3:
        return W.with_values(np.zeros_like(W.values), classical=False)
    c0, c1 = V.third_derivative_coeffs()
    vppp = c0 + c1 * W.grid.q
    vals = (units.sigma ** 2 / 24.0) * vppp[:, None] * third_p_derivative(W)
    return W.with_values(vals, classical=False)


def coherence_residual(psi0: WaveField, V: PotentialSpec, t_final: float,
                       dt: float, units: Units = Units(),
                       n_samples: int = 20) -> CoherenceReport:
    """Evolve W[psi0] classically and psi0 quantum-mechanically; compare.

    residual(t) = ||W_classical(t) - W[psi(t)]||_2 / ||W[psi(t)]||_2 at
    n_samples checkpoints.  moyal_estimate carries the relative norm of
    the leading correction evaluated on W[psi(t)] at the same times.
    """
    grid = psi0.grid
    n_steps = max(1, int(round(t_final / dt)))
    sample_every = max(1, n_steps // n_samples)
    cls = LiouvillePropagator(grid, V, dt, units)
    qm = SplitOperatorPropagator(grid, V, dt, units)

    # quantum snapshots are cheap to hold (1D); collect them first, then a
    # single classical sweep compares in lockstep.
    snapshots: dict[int, np.ndarray] = {}
    qm.run(psi0, n_steps, sample_every,
           observer=lambda i, psi: snapshots.__setitem__(i, psi.values))
    if n_steps not in snapshots:
        final = qm.run(psi0, n_steps)
        snapshots[n_steps] = final.values

    times, residuals, moyal = [], [], []

    def compare(i: int, f: PhaseField) -> None:
        if i not in snapshots:
            return
        w_q = wigner(psi0.with_values(snapshots[i]))
        times.append(i * dt)
        residuals.append(_relative_l2(f.values, w_q.values))
        if V.kind == "polynomial" and V.degree >= 3:
            m = moyal_correction(w_q, V, units)
            moyal.append(float(np.linalg.norm(m.values)
                               / np.linalg.norm(w_q.values)))
        else:
            moyal.append(0.0)

    final_cls = cls.run(wigner(psi0), n_steps, sample_every, observer=compare)
    if not times or times[-1] < n_steps * dt:
        compare(n_steps, final_cls)
    return CoherenceReport(times=np.asarray(times),
                           residual_norm=np.asarray(residuals),
                           potential_degree=V.degree,
                           moyal_estimate=np.asarray(moyal))


def superposition_check(psi1: WaveField, psi2: WaveField, V: PotentialSpec,
                        t: float, dt: float, units: Units = Units()) -> float:
    """Residual of W[psi1 + psi2] (interference terms included) under the
    classical flow against the Wigner function of the TDSE-evolved sum.

    Returns the maximum relative L2 residual over the run.
    """
    psi1.grid.require_same(psi2.grid, "superposed states")
    total = psi1.values + psi2.values
    norm = float(np.sum(np.abs(total) ** 2) * psi1.grid.dq)
    psi_sum = WaveField(psi1.grid, total, norm_target=norm)
    report = coherence_residual(psi_sum, V, t, dt, units)
    return report.max_residual()
