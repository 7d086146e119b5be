"""Integral transforms and functionals connecting f, f~, psi and rho.

The centered discrete transform pair used everywhere:

    f~(q, k_J) = dp * sum_M f(q, p_M) exp(+i k_J p_M)
    f(q, p_M)  = dk/(2 pi) * sum_J f~(q, k_J) exp(-i k_J p_M)

with J, M = -n/2 .. n/2-1 and dp*dk = 2 pi / n, so the pair is exactly
inverse on the grid.  The Wigner transform builds the correlation
psi(q + sigma k/2) psi*(q - sigma k/2) on the twice-upsampled grid (the
grid guarantees sigma*k_J/2 = J*dq/2, a half-node shift) and applies
the second line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .core import (
    DensityMatrixField,
    Grid1D,
    MomentumFourierField,
    PhaseField,
    PotentialSpec,
    Units,
    ValidationError,
    WaveField,
    evaluate_potential,
)

__all__ = [
    "MomentSet",
    "fourier_momentum",
    "inverse_fourier_momentum",
    "wigner",
    "wigner_of_operator",
    "moments",
    "overlap",
    "wave_overlap",
    "entropy",
    "complete_set_sum",
]


def _centered_fft(values: np.ndarray, axis: int = 1) -> np.ndarray:
    """sum_J v_J exp(-2 pi i J M / n) with centered index conventions."""
    return sfft.fftshift(sfft.fft(sfft.ifftshift(values, axes=axis), axis=axis),
                         axes=axis)


def _centered_ifft(values: np.ndarray, axis: int = 1) -> np.ndarray:
    """(1/n) sum_M v_M exp(+2 pi i J M / n), centered."""
    return sfft.fftshift(sfft.ifft(sfft.ifftshift(values, axes=axis), axis=axis),
                         axes=axis)


def fourier_momentum(f: PhaseField) -> MomentumFourierField:
    """f~(q, k) = int dp e^{ikp} f(q, p) on the conjugate k grid."""
    g = f.grid
    vals = _centered_ifft(f.values.astype(complex), axis=1) * (g.dp * g.n_q)
    return MomentumFourierField(g, vals)


def inverse_fourier_momentum(ft: MomentumFourierField) -> PhaseField:
    """Exact inverse of fourier_momentum; imaginary residue must be tiny."""
    g = ft.grid
    vals = _centered_fft(ft.values, axis=1) * (g.dk / (2.0 * np.pi))
    imag = np.abs(vals.imag).max()
    scale = max(np.abs(vals.real).max(), 1e-300)
    if imag > 1e-9 * scale:
        raise ValidationError("inverse transform produced a non-real field")
    return PhaseField(g, vals.real)


def _upsample2(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Band-limited interpolation onto the twice-finer grid.

    Centered spectral zero padding; the Nyquist coefficient is split
    symmetrically between +/- so real inputs stay real.
    """
    v = np.asarray(values, dtype=complex)
    n = v.shape[axis]
    spec = sfft.fftshift(sfft.fft(sfft.ifftshift(v, axes=axis), axis=axis),
                         axes=axis)
    shape = list(v.shape)
    shape[axis] = 2 * n
    padded = np.zeros(shape, dtype=complex)
    lo = n // 2  # centered band [-n/2, n/2) lands at [lo, lo + n)
    sl = [slice(None)] * v.ndim

    def at(idx):
        s = sl.copy()
        s[axis] = idx
        return tuple(s)

    padded[at(slice(lo, lo + n))] = spec
    nyq = padded[at(lo)].copy()
    padded[at(lo)] = 0.5 * nyq
    padded[at(lo + n)] = 0.5 * nyq
    out = sfft.fftshift(sfft.ifft(sfft.ifftshift(padded, axes=axis),
                                  axis=axis), axes=axis)
    return 2.0 * out


def _half_shift_correlation(upsampled: np.ndarray) -> np.ndarray:
    """corr[i, J + n/2] = V[2i + J] * conj(V[2i - J]), zero outside the box.

    V is the wave field on the half-node grid (2n points); index 2i is
    the original node q_i and the +/-J offsets realize the sigma*k_J/2
    half shifts exactly.  Out-of-range points contribute zero rather
    than wrapping, so localized states produce no half-box ghost image.
    """
    n2 = upsampled.shape[0]
    n = n2 // 2
    i = np.arange(n)[:, None]
    J = (np.arange(n) - n // 2)[None, :]
    plus = 2 * i + J
    minus = 2 * i - J
    valid = (plus >= 0) & (plus < n2) & (minus >= 0) & (minus < n2)
    corr = (upsampled[np.clip(plus, 0, n2 - 1)]
            * np.conj(upsampled[np.clip(minus, 0, n2 - 1)]))
    corr[~valid] = 0.0
    return corr


def wigner(psi: WaveField, sigma: float | None = None) -> PhaseField:
    """Wigner transform of a wave field onto its conjugate phase grid.

    f(q,p) = 1/(2 pi) int dk e^{-ikp} psi(q + sigma k/2) psi*(q - sigma k/2)
    """
    g = psi.grid
    if sigma is not None and abs(sigma - g.sigma) > 1e-12 * g.sigma:
        raise ValidationError(
            f"sigma={sigma} incompatible with the grid sigma={g.sigma}")
    corr = _half_shift_correlation(_upsample2(psi.values))
    w = _centered_fft(corr, axis=1) * (g.dk / (2.0 * np.pi))
    return PhaseField(g, w.real)


def wigner_of_operator(rho: DensityMatrixField, sigma: float | None = None) -> PhaseField:
    """Linear Wigner transform of a density matrix (Hermitian input only)."""
    g = rho.grid
    if sigma is not None and abs(sigma - g.sigma) > 1e-12 * g.sigma:
        raise ValidationError(
            f"sigma={sigma} incompatible with the grid sigma={g.sigma}")
    n = g.n_q
    up = _upsample2(_upsample2(rho.values, axis=0), axis=1)
    i = np.arange(n)[:, None]
    J = (np.arange(n) - n // 2)[None, :]
    plus = 2 * i + J
    minus = 2 * i - J
    valid = (plus >= 0) & (plus < 2 * n) & (minus >= 0) & (minus < 2 * n)
    corr = up[np.clip(plus, 0, 2 * n - 1), np.clip(minus, 0, 2 * n - 1)]
    corr[~valid] = 0.0
    w = _centered_fft(corr, axis=1) * (g.dk / (2.0 * np.pi))
    return PhaseField(g, w.real)


@dataclass(frozen=True)
class MomentSet:
    """Low-order moments of a phase-space distribution."""

    density: np.ndarray = field(repr=False)
    current: np.ndarray = field(repr=False)
    mean_q: float
    mean_p: float
    mean_p2: float
    mean_H: float
    mass: float


def moments(f: PhaseField, V: PotentialSpec | None = None,
            units: Units = Units()) -> MomentSet:
    """Densities n(q), j(q) and (q, p, p^2, H) means by direct p-integration.

    H = p^2/2m + V; for f = wigner(psi) this reproduces <psi|H|psi>.
    """
    g = f.grid
    w = f.values
    dqdp = g.cell_area()
    density = w.sum(axis=1) * g.dp
    p_row = w @ g.p
    current = p_row * g.dp / units.mass
    mass = float(w.sum() * dqdp)
    mean_q = float((density @ g.q) * g.dq)
    mean_p = float(p_row.sum() * dqdp)
    mean_p2 = float((w @ (g.p ** 2)).sum() * dqdp)
    mean_H = mean_p2 / (2.0 * units.mass)
    if V is not None:
        vq = evaluate_potential(V, g)
        mean_H += float((density * vq).sum() * g.dq)
    return MomentSet(density=density, current=current, mean_q=mean_q,
                     mean_p=mean_p, mean_p2=mean_p2, mean_H=mean_H, mass=mass)


def overlap(f1: PhaseField, f2: PhaseField) -> float:
    """Phase-space overlap integral (f1, f2) = int f1 f2 dq dp.

    For Wigner inputs this equals |<psi1|psi2>|^2 / (2 pi sigma).
    """
    f1.grid.require_same(f2.grid, "overlap operands")
    return float(np.sum(f1.values * f2.values) * f1.grid.cell_area())


def wave_overlap(psi1: WaveField, psi2: WaveField) -> complex:
    """<psi1|psi2> = int psi1* psi2 dq."""
    psi1.grid.require_same(psi2.grid, "wave fields")
    return complex(np.vdot(psi1.values, psi2.values) * psi1.grid.dq)


def entropy(f: PhaseField, units: Units) -> float:
    """S/k_B = -int (dq dp / h) (h f) ln(h f), h = 2 pi sigma.

    Points with f <= 0 contribute zero.  A negativity mass above 1e-8
    signals a non-classical (Wigner-like) input and is rejected.
    """
    if f.negativity_mass() > 1e-8:
        raise ValidationError(
            "entropy defined only for classical (non-negative) distributions")
    mass = f.mass
    if abs(mass - 1.0) > 1e-6:
        raise ValidationError(f"entropy expects a unit-normalized field, got {mass}")
    h = units.h_cell
    vals = f.values
    pos = vals > 0.0
    integrand = np.zeros_like(vals)
    hv = h * vals[pos]
    integrand[pos] = vals[pos] * np.log(hv)
    return float(-np.sum(integrand) * f.grid.cell_area())


def gram_matrix(states: list[WaveField]) -> np.ndarray:
    mat = np.array([s.values for s in states])
    return (mat.conj() @ mat.T) * states[0].grid.dq


def complete_set_sum(eigenstates: list[WaveField], point: tuple[float, float],
                     sigma: float | None = None, gram_tol: float = 1e-6) -> float:
    """sum_lambda W_lambda(q, p) over the supplied orthonormal set.

    Evaluates the shift correlation with nearest-node products, averaging
    the two splittings when the shift sigma*k_J/2 falls between nodes.
    Per state this agrees with wigner() to O(dq^2), but every product
    pairs original grid nodes, so for a complete discrete basis the
    completeness relation sum psi(a) psi*(b) = delta_ab/dq collapses the
    k sum exactly and the result is 1/(2 pi sigma) to roundoff.
    Truncated continuum-like sets oscillate around that value instead of
    converging pointwise; pass the full basis for the sum rule.  Raises
    if the Gram matrix deviates from identity beyond gram_tol.
    """
    if not eigenstates:
        raise ValidationError("need at least one state")
    g = eigenstates[0].grid
    if sigma is not None and abs(sigma - g.sigma) > 1e-12 * g.sigma:
        raise ValidationError("sigma incompatible with the state grid")
    gram = gram_matrix(eigenstates)
    dev = np.abs(gram - np.eye(len(eigenstates))).max()
    if dev > gram_tol:
        raise ValidationError(f"states not orthonormal (Gram deviation {dev:.2e})")
    iq = g.index_of_q(point[0])
    ip = g.index_of_p(point[1])
    n = g.n_q
    J = np.arange(n) - n // 2
    h1 = (J + 1) // 2           # ceil(J/2) toward +inf for odd J
    h2 = J - h1                 # the complementary split
    phase = np.exp(-2j * np.pi * J * (ip - n // 2) / n)
    total = 0.0 + 0.0j
    for a_off, b_off in ((h1, h2), (h2, h1)):
        a = iq + a_off
        b = iq - b_off
        valid = (a >= 0) & (a < n) & (b >= 0) & (b < n)
        for state in eigenstates:
            v = state.values
            corr = v[np.clip(a, 0, n - 1)] * np.conj(v[np.clip(b, 0, n - 1)])
            corr[~valid] = 0.0
            total += 0.5 * np.sum(corr * phase)
    return float(np.real(total) * g.dk / (2.0 * np.pi))
