"""Classical phase-space transport: Liouville flow and action waves.

The Liouville solver is semi-Lagrangian with Strang splitting:

    shear(dt/2 in q by p/m) . kick(dt in p by -V') . shear(dt/2 in q)

Both substeps are spectral shifts (exact for band-limited data), so mass
is conserved to roundoff and the free / linear-potential flows are exact
up to interpolation.  Interpolation in p is spectral as well: the kick is
a uniform per-column shift and the transported fields decay well inside
the monitored p window, so the periodic wrap is harmless and the shear
steps stay error-free.  (A cubic stencil was tried first and its per-step
interpolation bias dominated the coherence residuals.)
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft

from .core import (
    ActionWaveState,
    GaussianCoherentParams,
    Grid1D,
    PhaseField,
    PotentialSpec,
    Units,
    ValidationError,
    evaluate_potential,
    potential_derivative,
)

__all__ = [
    "CflError",
    "CausticError",
    "LiouvillePropagator",
    "liouville_step",
    "action_wave_step",
    "embed_action_wave",
    "gaussian_coherent_state",
    "gaussian_profile",
]


class CflError(ValidationError):
    """Step rejected: too large a (dt * force / dp) shift per kick."""


class CausticError(ValidationError):
    """Action-wave evolution halted: grad S about to fold over."""


def gaussian_profile(x: np.ndarray, center: float, width: float) -> np.ndarray:
    """g(x) = exp(-(x - center)^2 / width) / sqrt(pi * width), unit integral."""
    return np.exp(-((x - center) ** 2) / width) / np.sqrt(np.pi * width)


class LiouvillePropagator:
    """Reusable Strang-split semi-Lagrangian Liouville stepper.

    Owns precomputed shift phases for a fixed (grid, V, dt, units); `run`
    merges interior half-shears so a step costs two spectral shift pairs.
    """

    def __init__(self, grid: Grid1D, V: PotentialSpec, dt: float,
                 units: Units = Units(), cfl_limit: float = 4.0):
        if dt <= 0:
            raise ValidationError("dt must be positive")
        self.grid = grid
        self.V = V
        self.dt = float(dt)
        self.units = units
        vprime = potential_derivative(V, grid)
        shift_cells = dt * np.abs(vprime).max() / grid.dp
        if shift_cells > cfl_limit:
            raise CflError(
                f"kick shift {shift_cells:.2f} cells exceeds the limit "
                f"{cfl_limit}; reduce dt below "
                f"{cfl_limit * grid.dp / max(np.abs(vprime).max(), 1e-300):.3e}")
        n = grid.n_q
        kq = 2.0 * np.pi * sfft.rfftfreq(n, grid.dq)
        kp = 2.0 * np.pi * sfft.rfftfreq(n, grid.dp)
        m = units.mass
        # shear: f(q, p) <- f(q - p dt/m, p); kick: f(q, p) <- f(q, p + V' dt)
        self._half_shear = np.exp(-1j * np.outer(kq, grid.p) * (dt / (2.0 * m)))
        self._full_shear = self._half_shear ** 2
        self._kick = np.exp(1j * np.outer(vprime * dt, kp))

    def _apply_shear(self, vals: np.ndarray, phase: np.ndarray) -> np.ndarray:
        ft = sfft.rfft(vals, axis=0)
        ft *= phase
        return sfft.irfft(ft, axis=0, n=self.grid.n_q)

    def _apply_kick(self, vals: np.ndarray) -> np.ndarray:
        ft = sfft.rfft(vals, axis=1)
        ft *= self._kick
        return sfft.irfft(ft, axis=1, n=self.grid.n_q)

    def step(self, vals: np.ndarray) -> np.ndarray:
        vals = self._apply_shear(vals, self._half_shear)
        vals = self._apply_kick(vals)
        return self._apply_shear(vals, self._half_shear)

    def run(self, f: PhaseField, n_steps: int, sample_every: int = 0,
            observer=None) -> PhaseField:
        """Advance n_steps; call observer(step_index, PhaseField) at samples.

        Interior half-shears are merged; the state handed to the observer
        is always a completed Strang step.
        """
        self.grid.require_same(f.grid, "liouville state")
        vals = f.values
        open_shear = False
        for i in range(1, n_steps + 1):
            if not open_shear:
                vals = self._apply_shear(vals, self._half_shear)
            vals = self._apply_kick(vals)
            sample = observer is not None and sample_every and i % sample_every == 0
            if sample or i == n_steps:
                vals = self._apply_shear(vals, self._half_shear)
                open_shear = False
                if sample:
                    observer(i, f.with_values(vals))
            else:
                vals = self._apply_shear(vals, self._full_shear)
                open_shear = True
        return f.with_values(vals)


def liouville_step(f: PhaseField, V: PotentialSpec, dt: float,
                   units: Units = Units()) -> PhaseField:
    """One Strang-split Liouville step (see LiouvillePropagator for loops)."""
    prop = LiouvillePropagator(f.grid, V, dt, units)
    return f.with_values(prop.step(f.values))


def _derivative_fd4(arr: np.ndarray, dx: float) -> np.ndarray:
    """4th-order centered first derivative, one-sided near the edges.

    Used for S(q), which is generally not periodic (a linear S encodes a
    momentum boost), so a spectral derivative would ring.
    """
    d = np.empty_like(arr)
    d[2:-2] = (arr[:-4] - 8 * arr[1:-3] + 8 * arr[3:-1] - arr[4:]) / (12 * dx)
    # 4th-order one-sided stencils at the boundary
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * dx)
    for i in (0, 1):
        d[i] = np.dot(c, arr[i:i + 5])
        d[len(arr) - 1 - i] = -np.dot(c, arr[len(arr) - 5 - i:len(arr) - i][::-1])
    return d


def grad_S(state: ActionWaveState) -> np.ndarray:
    return _derivative_fd4(state.S, state.grid.dq)


def action_wave_step(state: ActionWaveState, V: PotentialSpec, dt: float,
                     units: Units = Units(),
                     caustic_threshold: float = 0.5) -> ActionWaveState:
    """Advance (n, S) one RK4 step of continuity + Hamilton-Jacobi.

        dS/dt = -(grad S)^2 / 2m - V,   dn/dt = -d/dq (n grad S / m)

    Raises CausticError (with the current |S''| scale) before grad S can
    fold into a multi-valued branch; multi-branch tracking is out of scope.
    """
    g = state.grid
    m = units.mass
    vq = evaluate_potential(V, g)
    dq = g.dq

    curvature = np.abs(_derivative_fd4(grad_S(state), dq)).max()
    if curvature * dt / m >= caustic_threshold:
        raise CausticError(
            f"caustic guard tripped: max|S''| dt/m = {curvature * dt / m:.3f} "
            f">= {caustic_threshold}; breakdown time scale ~ "
            f"{m / max(curvature, 1e-300):.3e}")

    def rhs(n, S):
        sp = _derivative_fd4(S, dq)
        dn = -_derivative_fd4(n * sp / m, dq)
        dS = -sp ** 2 / (2.0 * m) - vq
        return dn, dS

    n0, S0 = state.n, state.S
    k1n, k1S = rhs(n0, S0)
    k2n, k2S = rhs(n0 + 0.5 * dt * k1n, S0 + 0.5 * dt * k1S)
    k3n, k3S = rhs(n0 + 0.5 * dt * k2n, S0 + 0.5 * dt * k2S)
    k4n, k4S = rhs(n0 + dt * k3n, S0 + dt * k3S)
    n1 = n0 + dt / 6.0 * (k1n + 2 * k2n + 2 * k3n + k4n)
    S1 = S0 + dt / 6.0 * (k1S + 2 * k2S + 2 * k3S + k4S)
    return ActionWaveState(g, np.maximum(n1, 0.0), S1)


def embed_action_wave(state: ActionWaveState, width_b: float) -> PhaseField:
    """Regularize the action distribution: f(q,p) = n(q) g(p; grad S(q), b).

    The Gaussian kernel replaces delta(p - grad S); as b -> 0 its moments
    converge to the action-distribution ones, but b must stay resolved:
    b >= 4 dp^2 is required.
    """
    g = state.grid
    if width_b <= 0:
        raise ValidationError("width_b must be positive")
    if width_b < 4.0 * g.dp ** 2:
        raise ValidationError(
            f"width_b={width_b} under-resolved: need >= 4 dp^2 = {4 * g.dp ** 2}")
    sp = grad_S(state)
    kernel = np.exp(-((g.p[None, :] - sp[:, None]) ** 2) / width_b)
    vals = state.n[:, None] * kernel / np.sqrt(np.pi * width_b)
    return PhaseField(g, vals, classical=True)


def gaussian_coherent_state(params: GaussianCoherentParams, t: float,
                            grid: Grid1D) -> PhaseField:
    """Closed-form coherent Gaussian g^X(t)(q) g^Y(t)(p) for harmonic V.

    Requires the coherence condition b/a = (m omega)^2; the center follows
    the classical trajectory analytically.
    """
    params.check_coherence()
    X, Y = params.center_at(t)
    vals = np.outer(gaussian_profile(grid.q, X, params.a),
                    gaussian_profile(grid.p, Y, params.b))
    return PhaseField(grid, vals, classical=True)
