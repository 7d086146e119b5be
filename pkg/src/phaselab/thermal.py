"""Finite-temperature transport.

Classical side: Kramers/Fokker-Planck evolution

    df/dt + (p/m) df/dq - V' df/dp = gamma d/dp [ (p/m) f + (1/beta) df/dp ]

split as Liouville(dt/2) . friction-diffusion(dt) . Liouville(dt/2).  The
momentum substep is a Chang-Cooper flux discretization advanced by
Crank-Nicolson: it conserves mass exactly (telescoping fluxes, zero-flux
ends) and annihilates the discrete Maxwellian exactly, so the Boltzmann
density is stationary to splitting accuracy.

Quantum side: the density-matrix transport equation

    i s drho/dt = [H, rho] + (gamma/2m) [q, {p, rho}'] - (i gamma kT / s) [q, [q, rho]]

advanced as U(dt/2) . friction(dt/2) . decoherence(dt) . friction(dt/2) . U(dt/2).
In the (a, b) position representation the decoherence double commutator is
diagonal, exp(-gamma kT (a-b)^2 dt / s^2) per element (this exact factor
anchors the step), and the friction term is the advection
-(gamma/2m)(a-b)(d_a - d_b) rho, integrated semi-Lagrangian along its
contracting characteristics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
import scipy.linalg
from scipy.ndimage import map_coordinates

from .classical import LiouvillePropagator
from .core import (
    DensityMatrixField,
    Grid1D,
    PhaseField,
    PotentialSpec,
    ThermalParams,
    Units,
    ValidationError,
    evaluate_potential,
    potential_derivative,
)
from .transforms import fourier_momentum

__all__ = [
    "QuantumEqParams",
    "FokkerPlanckPropagator",
    "fokker_planck_step",
    "boltzmann_equilibrium",
    "fp_fourier_sides",
    "fp_fourier_residual",
    "QfpPropagator",
    "qfp_step",
    "quantum_equilibrium",
    "nonlinear_qfp_step",
    "relative_entropy",
]


@dataclass(frozen=True)
class QuantumEqParams:
    """Chemical-potential-like shift alpha and statistics sign."""

    alpha: float
    statistics: str  # "fermi" or "bose"
    beta: float

    def __post_init__(self):
        if self.statistics not in ("fermi", "bose"):
            raise ValidationError("statistics must be 'fermi' or 'bose'")
        if self.beta <= 0:
            raise ValidationError("beta must be positive")

    @property
    def sign(self) -> float:
        return 1.0 if self.statistics == "fermi" else -1.0


def _chang_cooper_generator(grid: Grid1D, tp: ThermalParams,
                            units: Units) -> np.ndarray:
    """Tridiagonal generator L (diagonals stacked for solve_banded).

    Flux G_{j+1/2} = A [(1-d) f_{j+1} + d f_j] + D (f_{j+1} - f_j)/dp with
    A = gamma p_half / m, D = gamma/beta and the Chang-Cooper weight
    d = 1/w - 1/(e^w - 1), w = beta p_half dp / m.  G vanishes identically
    on f ~ exp(-beta p^2/2m) because p_{j+1}^2 - p_j^2 = 2 p_half dp.
    """
    n = grid.n_p
    dp = grid.dp
    m = units.mass
    gamma = tp.gamma
    beta = tp.beta
    p_half = 0.5 * (grid.p[:-1] + grid.p[1:])
    A = gamma * p_half / m
    D = gamma / beta
    w = beta * p_half * dp / m
    with np.errstate(over="ignore"):
        delta = np.where(np.abs(w) > 1e-8,
                         1.0 / np.where(w == 0, 1.0, w) - 1.0 / np.expm1(w),
                         0.5 - w / 12.0)
    lower = A * delta - D / dp          # coefficient of f_j in G_{j+1/2}
    upper = A * (1.0 - delta) + D / dp  # coefficient of f_{j+1} in G_{j+1/2}
    L = np.zeros((3, n))
    # df_j/dt = (G_{j+1/2} - G_{j-1/2}) / dp, zero-flux ends
    L[1, :-1] += lower / dp
    L[0, 1:] += upper / dp          # superdiagonal entries L[j, j+1]
    L[1, 1:] -= upper / dp
    L[2, :-1] -= lower / dp         # subdiagonal entries L[j+1, j]
    return L


class FokkerPlanckPropagator:
    """Strang-split Kramers stepper on a PhaseField."""

    def __init__(self, grid: Grid1D, V: PotentialSpec, tp: ThermalParams,
                 dt: float, units: Units = Units()):
        if dt <= 0:
            raise ValidationError("dt must be positive")
        self.grid = grid
        self.dt = float(dt)
        self.tp = tp
        self.units = units
        diffusion_cfl = tp.gamma * tp.kt * dt / grid.dp ** 2
        if diffusion_cfl > 20.0:
            raise ValidationError(
                f"diffusion number {diffusion_cfl:.1f} too large even for the "
                f"implicit step; reduce dt")
        self._liouville = LiouvillePropagator(grid, V, dt / 2.0, units)
        L = _chang_cooper_generator(grid, tp, units)
        eye = np.zeros_like(L)
        eye[1] = 1.0
        self._lhs = eye - 0.5 * dt * L    # Crank-Nicolson
        self._rhs = eye + 0.5 * dt * L

    def _friction_diffusion(self, vals: np.ndarray) -> np.ndarray:
        # vals indexed [q, p]; solve per q column -> operate on transposed
        rhs = _banded_matvec(self._rhs, vals.T)
        out = scipy.linalg.solve_banded((1, 1), self._lhs, rhs)
        return out.T

    def step_field(self, f: PhaseField) -> PhaseField:
        self.grid.require_same(f.grid, "fokker-planck state")
        vals = self._liouville.step(f.values)
        vals = self._friction_diffusion(vals)
        vals = self._liouville.step(vals)
        floor = vals.min()
        if floor < -1e-10 * max(1.0, vals.max()):
            raise ValidationError(
                f"negative density {floor:.3e} beyond tolerance")
        return f.with_values(np.maximum(vals, 0.0) if floor < 0 else vals,
                             classical=True)

    def run(self, f: PhaseField, n_steps: int, sample_every: int = 0,
            observer=None) -> PhaseField:
        state = f
        for i in range(1, n_steps + 1):
            state = self.step_field(state)
            if observer is not None and sample_every and i % sample_every == 0:
                observer(i, state)
        return state


def _banded_to_dense(banded: np.ndarray) -> np.ndarray:
    n = banded.shape[1]
    dense = np.diag(banded[1])
    dense += np.diag(banded[0, 1:], k=1)
    dense += np.diag(banded[2, :-1], k=-1)
    return dense


def _banded_matvec(banded: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y = B x for a (1,1)-banded B in solve_banded layout; x is (n, ...)."""
    y = banded[1][:, None] * x
    y[:-1] += banded[0, 1:][:, None] * x[1:]
    y[1:] += banded[2, :-1][:, None] * x[:-1]
    return y


def fokker_planck_step(f: PhaseField, V: PotentialSpec, tp: ThermalParams,
                       dt: float, units: Units = Units()) -> PhaseField:
    prop = FokkerPlanckPropagator(f.grid, V, tp, dt, units)
    return prop.step_field(f)


def boltzmann_equilibrium(V: PotentialSpec, beta: float, units: Units,
                          grid: Grid1D) -> PhaseField:
    """f_e = exp(-beta H)/Z normalized to 1 on the grid.

    Rejects potentials whose Boltzmann weight does not decay on the grid
    (tail mass above 1e-8 of the total along either border).
    """
    if beta <= 0:
        raise ValidationError("beta must be positive")
    vq = evaluate_potential(V, grid)
    ham = vq[:, None] + grid.p[None, :] ** 2 / (2.0 * units.mass)
    w = np.exp(-beta * (ham - ham.min()))
    total = w.sum()
    border = w[0, :].sum() + w[-1, :].sum() + w[:, 0].sum() + w[:, -1].sum()
    if border > 1e-8 * total:
        raise ValidationError(
            "exp(-beta H) does not decay on the grid (non-normalizable "
            "or under-resolved equilibrium)")
    return PhaseField(grid, w / (total * grid.cell_area()), classical=True)


def relative_entropy(f: PhaseField, f_eq: PhaseField) -> float:
    """Kullback-Leibler divergence int f ln(f/f_eq) dq dp (clipped at f<=0)."""
    f.grid.require_same(f_eq.grid, "relative entropy operands")
    a = f.values
    b = f_eq.values
    mask = (a > 0) & (b > 0)
    out = np.zeros_like(a)
    out[mask] = a[mask] * np.log(a[mask] / b[mask])
    return float(out.sum() * f.grid.cell_area())


def _spectral_derivative(vals: np.ndarray, d: float, axis: int) -> np.ndarray:
    n = vals.shape[axis]
    kappa = 2.0 * np.pi * sfft.fftfreq(n, d)
    shape = [1, 1]
    shape[axis] = n
    ft = sfft.fft(vals, axis=axis)
    return sfft.ifft(1j * kappa.reshape(shape) * ft, axis=axis)


def fp_fourier_sides(f: PhaseField, V: PotentialSpec, tp: ThermalParams,
                     units: Units = Units()) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the momentum-Fourier Fokker-Planck identity.

    Left: the transform of df/dt computed with (q, p)-space spectral
    operators.  Right: the (q, k)-space form
        (i/m) d_k d_q f~ - i k V' f~ - (gamma/m) k d_k f~ - gamma kT k^2 f~.
    """
    g = f.grid
    m = units.mass
    vprime = potential_derivative(V, g)[:, None]
    vals = f.values.astype(complex)
    dfdq = _spectral_derivative(vals, g.dq, axis=0)
    dfdp = _spectral_derivative(vals, g.dp, axis=1)
    pf = g.p[None, :] * vals
    drift = _spectral_derivative(pf / m, g.dp, axis=1)
    diff = _spectral_derivative(dfdp, g.dp, axis=1)
    dfdt = (-g.p[None, :] / m * dfdq + vprime * dfdp
            + tp.gamma * (drift + diff / tp.beta))
    lhs = _transform_complex(dfdt, g)

    ft = fourier_momentum(f).values
    k = g.k[None, :]
    dft_dq = _spectral_derivative(ft, g.dq, axis=0)
    dft_dk = _spectral_derivative_centered_k(ft, g)
    rhs = (1j / m) * _spectral_derivative_centered_k(dft_dq, g) \
        - 1j * k * vprime * ft \
        - (tp.gamma / m) * k * dft_dk \
        - tp.gamma * tp.kt * k ** 2 * ft
    return lhs, rhs


def _transform_complex(vals: np.ndarray, g: Grid1D) -> np.ndarray:
    """Momentum Fourier transform of a complex (q, p) array."""
    shifted = sfft.ifftshift(vals, axes=1)
    ft = sfft.ifft(shifted, axis=1)
    return sfft.fftshift(ft, axes=1) * (g.dp * g.n_q)

def _spectral_derivative_centered_k(vals: np.ndarray, g: Grid1D) -> np.ndarray:
    """d/dk along the centered k axis (axis 1)."""
    shifted = sfft.ifftshift(vals, axes=1)
    kappa = 2.0 * np.pi * sfft.fftfreq(g.n_q, g.dk)
    out = sfft.ifft(1j * kappa[None, :] * sfft.fft(shifted, axis=1), axis=1)
    return sfft.fftshift(out, axes=1)


def fp_fourier_residual(f: PhaseField, V: PotentialSpec, tp: ThermalParams,
                        units: Units = Units()) -> float:
    """L2 mismatch of the two fp_fourier_sides routes, term-normalized.

    Near-stationary fields make both sides cancel to roughly zero, so
    the mismatch is scaled by the magnitudes of the individual operator
    terms rather than by the (possibly vanishing) sums.
    """
    lhs, rhs = fp_fourier_sides(f, V, tp, units)
    g = f.grid
    ft = fourier_momentum(f).values
    k = g.k[None, :]
    vprime = potential_derivative(V, g)[:, None]
    dft_dq = _spectral_derivative(ft, g.dq, axis=0)
    scale = (np.linalg.norm(_spectral_derivative_centered_k(dft_dq, g)) / units.mass
             + np.linalg.norm(k * vprime * ft)
             + tp.gamma / units.mass * np.linalg.norm(k * _spectral_derivative_centered_k(ft, g))
             + tp.gamma * tp.kt * np.linalg.norm(k ** 2 * ft))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(lhs - rhs) / scale)


class QfpPropagator:
    """Quantum Fokker-Planck stepper on a DensityMatrixField."""

    def __init__(self, grid: Grid1D, V: PotentialSpec, tp: ThermalParams,
                 dt: float, units: Units = Units()):
        if dt <= 0:
            raise ValidationError("dt must be positive")
        self.grid = grid
        self.dt = float(dt)
        self.tp = tp
        self.units = units
        n = grid.n_q
        s = units.sigma
        kappa = 2.0 * np.pi * sfft.fftfreq(n, grid.dq)
        vq = evaluate_potential(V, grid)
        # unitary half-step factors (Strang inside the half-step as well)
        h = dt / 2.0
        self._expv = np.exp(-0.5j * h * vq / s)
        self._expt = np.exp(-1j * h * s * kappa ** 2 / (2.0 * units.mass))
        # friction semi-Lagrangian source coordinates for a dt/2 substep
        shrink = np.exp(-tp.gamma * (dt / 2.0) / units.mass)
        idx = np.arange(n, dtype=float)
        ia, ib = np.meshgrid(idx, idx, indexing="ij")
        u = ia - ib
        v = ia + ib
        self._coords = np.array([(v + u * shrink) / 2.0, (v - u * shrink) / 2.0])
        # exact decoherence multiplier for the full dt
        qdiff = grid.q[:, None] - grid.q[None, :]
        self._deco = np.exp(-tp.gamma * tp.kt * qdiff ** 2 * dt / s ** 2)

    def _unitary_half(self, rho: np.ndarray) -> np.ndarray:
        # rho -> U rho U^dagger with U = expV/2 . expT . expV/2
        rho = self._expv[:, None] * rho * np.conj(self._expv)[None, :]
        rho = sfft.ifft(self._expt[:, None] * sfft.fft(rho, axis=0), axis=0)
        rho = sfft.fft(np.conj(self._expt)[None, :] * sfft.ifft(rho, axis=1), axis=1)
        return self._expv[:, None] * rho * np.conj(self._expv)[None, :]

    def _friction_half(self, rho: np.ndarray) -> np.ndarray:
        if self.tp.gamma == 0.0:
            return rho
        re = map_coordinates(rho.real, self._coords, order=3, mode="nearest")
        im = map_coordinates(rho.imag, self._coords, order=3, mode="nearest")
        return re + 1j * im

    def step(self, rho: np.ndarray) -> np.ndarray:
        rho = self._unitary_half(rho)
        rho = self._friction_half(rho)
        if self.tp.gamma != 0.0:
            rho = self._deco * rho
        rho = self._friction_half(rho)
        rho = self._unitary_half(rho)
        return 0.5 * (rho + rho.conj().T)

    def run(self, rho: DensityMatrixField, n_steps: int, sample_every: int = 0,
            observer=None, trace_tol: float = 1e-8) -> DensityMatrixField:
        self.grid.require_same(rho.grid, "density matrix")
        vals = rho.values
        tr0 = np.real(np.trace(vals)) * self.grid.dq
        for i in range(1, n_steps + 1):
            prev = np.real(np.trace(vals)) * self.grid.dq
            vals = self.step(vals)
            tr = np.real(np.trace(vals)) * self.grid.dq
            if abs(tr - prev) > trace_tol * max(abs(tr0), 1.0):
                raise ValidationError(
                    f"trace drift {abs(tr - prev):.3e} per step at step {i}")
            if observer is not None and sample_every and i % sample_every == 0:
                observer(i, rho.with_values(vals))
        return rho.with_values(vals)


def qfp_step(rho: DensityMatrixField, V: PotentialSpec, tp: ThermalParams,
             dt: float, units: Units = Units()) -> DensityMatrixField:
    prop = QfpPropagator(rho.grid, V, tp, dt, units)
    return rho.with_values(prop.step(rho.values))


def quantum_equilibrium(params: QuantumEqParams, units: Units,
                        grid: Grid1D) -> DensityMatrixField:
    """Free-particle Bose/Fermi equilibrium in the position representation.

    Plane waves on the periodic box are the momentum eigenbasis; the
    operator is diagonal there with occupation 1/(exp(beta E + alpha) +/- 1).
    The returned trace equals the occupation sum (not normalized to 1).
    """
    n = grid.n_q
    L = grid.length
    kappa = 2.0 * np.pi * sfft.fftfreq(n, grid.dq)
    energies = (units.sigma * kappa) ** 2 / (2.0 * units.mass)
    x = params.beta * energies + params.alpha
    if params.statistics == "bose" and x.min() <= 1e-12:
        raise ValidationError(
            "bose occupation pole: need beta E + alpha > 0 on every mode")
    occ = 1.0 / (np.exp(x) + params.sign)
    # rho(a,b) = (1/L) sum_j occ_j exp(i kappa_j (a - b)): circulant via FFT
    row = sfft.ifft(occ) * n / L  # row[r] = (1/L) sum_j occ_j e^{2 pi i j r / n}
    ia = np.arange(n)
    vals = row[(ia[:, None] - ia[None, :]) % n]
    vals = 0.5 * (vals + vals.conj().T)
    return DensityMatrixField(grid, vals)


def occupations(f: DensityMatrixField) -> np.ndarray:
    """Eigen-occupations of the operator kernel (dq measure)."""
    return np.linalg.eigvalsh(f.values * f.grid.dq)


def _apply_kinetic_left(vals: np.ndarray, kin: np.ndarray) -> np.ndarray:
    return sfft.ifft(kin[:, None] * sfft.fft(vals, axis=0), axis=0)


def _apply_kinetic_right(vals: np.ndarray, kin: np.ndarray) -> np.ndarray:
    return sfft.fft(kin[None, :] * sfft.ifft(vals, axis=1), axis=1)


def nonlinear_qfp_step(f: DensityMatrixField, tp: ThermalParams, dt: float,
                       statistics: str, units: Units = Units(),
                       check_occupations: bool = False) -> DensityMatrixField:
    """RK4 step of the free-particle transport with friction operand f(1 -+ f).

    The Bose/Fermi equilibria are exact stationary points: in the momentum
    representation p g (1 -+ g) = -(m/beta) dg/dp, so the friction flux
    cancels the diffusion term identically.
    """
    if statistics not in ("fermi", "bose"):
        raise ValidationError("statistics must be 'fermi' or 'bose'")
    sign = 1.0 if statistics == "fermi" else -1.0
    g = f.grid
    n = g.n_q
    s = units.sigma
    m = units.mass
    kappa = 2.0 * np.pi * sfft.fftfreq(n, g.dq)
    kin = (s * kappa) ** 2 / (2.0 * m)
    # Minimum-image separation: the free-particle kernels are periodic in
    # (a - b), so the raw coordinate difference would be discontinuous at the
    # wrap seam and break the friction/diffusion balance there.
    raw = g.q[:, None] - g.q[None, :]
    qdiff = (raw + 0.5 * g.length) % g.length - 0.5 * g.length
    deco = tp.gamma * tp.kt / s ** 2

    def rhs(mat: np.ndarray) -> np.ndarray:
        comm = _apply_kinetic_left(mat, kin) - _apply_kinetic_right(mat, kin)
        G = mat - sign * (mat @ mat) * g.dq
        da = _spectral_derivative(G, g.dq, axis=0)
        db = _spectral_derivative(G, g.dq, axis=1)
        friction = -(tp.gamma / (2.0 * m)) * qdiff * (da - db)
        return -1j / s * comm + friction - deco * qdiff ** 2 * mat

    v = f.values
    k1 = rhs(v)
    k2 = rhs(v + 0.5 * dt * k1)
    k3 = rhs(v + 0.5 * dt * k2)
    k4 = rhs(v + dt * k3)
    out = v + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    out = 0.5 * (out + out.conj().T)
    result = DensityMatrixField(g, out)
    if check_occupations and statistics == "fermi":
        occ = occupations(result)
        if occ.min() < -1e-6 or occ.max() > 1.0 + 1e-6:
            raise ValidationError(
                f"fermi occupations left [0, 1]: [{occ.min():.3e}, {occ.max():.3e}]")
    return result
