"""Grids, fields, potentials and unit conventions shared by every solver.

Everything here is plain immutable-after-construction data.  Operations
elsewhere take these types and return new instances; nothing mutates in
place, so scenario scans can run in parallel without shared state.

Conventions (d = 1 throughout):
  * natural units by default: m = sigma = k_B = 1,
  * phase-space arrays are indexed [q, p] (axis 0 = position),
  * the k grid (Fourier conjugate of p) satisfies sigma * dk = dq so the
    half-shifts q +/- sigma*k/2 land on half nodes of the twice-upsampled
    position grid,
  * the p grid is the discrete Fourier conjugate of the k grid
    (dp * dk = 2*pi / n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

__all__ = [
    "GridError",
    "ValidationError",
    "Units",
    "Grid1D",
    "construct_grid",
    "PhaseField",
    "MomentumFourierField",
    "WaveField",
    "ActionWaveState",
    "DensityMatrixField",
    "PotentialSpec",
    "evaluate_potential",
    "potential_derivative",
    "ThermalParams",
    "GaussianCoherentParams",
]


class GridError(ValueError):
    """Raised for an inconsistent or unsupported grid request."""


class ValidationError(ValueError):
    """Raised when a field or parameter set violates its invariants."""


@dataclass(frozen=True)
class Units:
    """Global constants: quantization scale sigma, particle mass, k_B."""

    sigma: float = 1.0
    mass: float = 1.0
    k_boltzmann: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValidationError("sigma must be positive")
        if self.mass <= 0:
            raise ValidationError("mass must be positive")
        if self.k_boltzmann <= 0:
            raise ValidationError("k_boltzmann must be positive")

    @property
    def h_cell(self) -> float:
        """Elementary cell area h = 2*pi*sigma (d = 1)."""
        return 2.0 * np.pi * self.sigma


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Conjugate-consistent (q, p) grid for one degree of freedom.

    n_q == n_p == n; q, k and p axes are all centered so that index n//2
    sits at the axis origin (k = 0, p-axis center).
    """

    n_q: int
    q_min: float
    q_max: float
    sigma: float
    q: np.ndarray = field(repr=False, compare=False)
    k: np.ndarray = field(repr=False, compare=False)
    p: np.ndarray = field(repr=False, compare=False)
    dq: float
    dk: float
    dp: float

    @property
    def n_p(self) -> int:
        return self.n_q

    @property
    def length(self) -> float:
        return self.q_max - self.q_min

    def same_as(self, other: "Grid1D") -> bool:
        return (
            self.n_q == other.n_q
            and self.q_min == other.q_min
            and self.q_max == other.q_max
            and self.sigma == other.sigma
        )

    def require_same(self, other: "Grid1D", what: str = "fields") -> None:
        if not self.same_as(other):
            raise GridError(f"{what} live on different grids")

    def index_of_q(self, q: float) -> int:
        i = int(round((q - self.q_min) / self.dq))
        if not (0 <= i < self.n_q):
            raise GridError(f"q={q} outside the grid")
        return i

    def index_of_p(self, p: float) -> int:
        i = int(round(p / self.dp)) + self.n_q // 2
        if not (0 <= i < self.n_q):
            raise GridError(f"p={p} outside the grid")
        return i

    def cell_area(self) -> float:
        return self.dq * self.dp


def construct_grid(n_q: int, q_span: tuple[float, float], sigma: float) -> Grid1D:
    """Build a Wigner-compatible grid.

    dq = span/n, dk = dq/sigma (so sigma*k/2 shifts land on half nodes,
    resolved exactly on a twice-upsampled field) and dp = 2*pi/(n*dk).
    With this choice dq*dp = 2*pi*sigma/n: the grid holds exactly n
    elementary cells h = 2*pi*sigma, so a full discrete basis has
    phase-space density 1/h.  Raises GridError for a non-power-of-two
    n_q or a degenerate span.
    """
    if not _is_power_of_two(int(n_q)):
        raise GridError(f"n_q must be a power of two, got {n_q}")
    q_min, q_max = float(q_span[0]), float(q_span[1])
    if not q_max > q_min:
        raise GridError("q_span must be nondegenerate (q_max > q_min)")
    if sigma <= 0:
        raise GridError("sigma must be positive")
    n = int(n_q)
    dq = (q_max - q_min) / n
    dk = dq / sigma
    dp = 2.0 * np.pi / (n * dk)
    q = q_min + dq * np.arange(n)
    centered = np.arange(n) - n // 2
    k = dk * centered
    p = dp * centered
    # Wigner compatibility: sigma*k_j must equal (j - n/2)*dq.
    if not np.allclose(sigma * k, centered * dq, rtol=1e-12, atol=0):
        raise GridError("Wigner shift compatibility violated")
    return Grid1D(n_q=n, q_min=q_min, q_max=q_max, sigma=float(sigma),
                  q=q, k=k, p=p, dq=dq, dk=dk, dp=dp)


@dataclass(frozen=True)
class PhaseField:
    """Real distribution f(q, p); may be negative unless flagged classical."""

    grid: Grid1D
    values: np.ndarray = field(repr=False, compare=False)
    classical: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_q, self.grid.n_p):
            raise ValidationError(
                f"values shape {v.shape} does not match grid "
                f"({self.grid.n_q}, {self.grid.n_p})")
        if not np.all(np.isfinite(v)):
            raise ValidationError("phase field contains non-finite values")
        if self.classical and v.min() < -1e-12 * max(1.0, abs(v).max()):
            raise ValidationError("classical phase field has negative values")
        object.__setattr__(self, "values", v)

    @property
    def mass(self) -> float:
        """Total integral dq dp sum(f)."""
        return float(self.values.sum() * self.grid.cell_area())

    def negativity_mass(self) -> float:
        neg = self.values[self.values < 0.0]
        return float(-neg.sum() * self.grid.cell_area())

    def with_values(self, values: np.ndarray, classical: bool | None = None) -> "PhaseField":
        return PhaseField(self.grid, values,
                          self.classical if classical is None else classical)


@dataclass(frozen=True)
class MomentumFourierField:
    """Complex f~(q, k), the momentum Fourier transform of a PhaseField."""

    grid: Grid1D
    values: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_q, self.grid.n_p):
            raise ValidationError("f~ shape does not match grid")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class WaveField:
    """Complex psi(q) with target norm N = dq * sum |psi|^2."""

    grid: Grid1D
    values: np.ndarray = field(repr=False, compare=False)
    norm_target: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_q,):
            raise ValidationError("psi shape does not match grid")
        object.__setattr__(self, "values", v)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dq)

    def check_norm(self, tol: float = 1e-10) -> None:
        if abs(self.norm - self.norm_target) > tol * max(1.0, self.norm_target):
            raise ValidationError(
                f"norm {self.norm} drifted from target {self.norm_target}")

    def with_values(self, values: np.ndarray) -> "WaveField":
        return WaveField(self.grid, values, self.norm_target)


@dataclass(frozen=True)
class ActionWaveState:
    """Density n(q) >= 0 and action S(q); only grad S is physical."""

    grid: Grid1D
    n: np.ndarray = field(repr=False, compare=False)
    S: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        S = np.asarray(self.S, dtype=float)
        if n.shape != (self.grid.n_q,) or S.shape != (self.grid.n_q,):
            raise ValidationError("action wave arrays do not match grid")
        if n.min() < -1e-12 * max(1.0, n.max()):
            raise ValidationError("density n must be non-negative")
        object.__setattr__(self, "n", np.maximum(n, 0.0))
        object.__setattr__(self, "S", S)

    @property
    def mass(self) -> float:
        return float(self.n.sum() * self.grid.dq)


@dataclass(frozen=True)
class DensityMatrixField:
    """Complex Hermitian rho(a, b) on the position grid."""

    grid: Grid1D
    values: np.ndarray = field(repr=False, compare=False)
    check_trace: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        n = self.grid.n_q
        if v.shape != (n, n):
            raise ValidationError("rho shape does not match grid")
        scale = max(1.0, np.abs(v).max())
        if np.abs(v - v.conj().T).max() > 1e-9 * scale:
            raise ValidationError("rho is not Hermitian")
        object.__setattr__(self, "values", v)
        if self.check_trace and abs(self.trace - 1.0) > 1e-10:
            raise ValidationError(f"trace {self.trace} differs from 1")

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.values)) * self.grid.dq)

    @property
    def purity(self) -> float:
        """Tr rho^2 with the dq operator measure."""
        v = self.values
        return float(np.real(np.sum(v * v.conj().T)) * self.grid.dq ** 2)

    def with_values(self, values: np.ndarray) -> "DensityMatrixField":
        return DensityMatrixField(self.grid, values, check_trace=False)


_MAX_POLY_DEGREE = 4


@dataclass(frozen=True)
class PotentialSpec:
    """Polynomial (c0..c4) or tabulated potential.

    The polynomial degree drives coherence expectations: Wigner functions
    stay exact Liouville solutions only for degree <= 2.
    """

    coeffs: tuple[float, ...] | None = None
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if (self.coeffs is None) == (self.values is None):
            raise ValidationError("specify exactly one of coeffs or values")
        if self.coeffs is not None:
            c = tuple(float(x) for x in self.coeffs)
            if len(c) > _MAX_POLY_DEGREE + 1:
                raise ValidationError("polynomial potentials support degree <= 4")
            c = c + (0.0,) * (_MAX_POLY_DEGREE + 1 - len(c))
            object.__setattr__(self, "coeffs", c)
        else:
            object.__setattr__(self, "values",
                               np.asarray(self.values, dtype=float))

    @classmethod
    def polynomial(cls, *coeffs: float) -> "PotentialSpec":
        return cls(coeffs=tuple(coeffs))

    @classmethod
    def harmonic(cls, omega: float = 1.0, mass: float = 1.0) -> "PotentialSpec":
        return cls(coeffs=(0.0, 0.0, 0.5 * mass * omega ** 2))

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls(coeffs=(0.0,))

    @classmethod
    def tabulated(cls, values: np.ndarray) -> "PotentialSpec":
        return cls(values=values)

    @property
    def kind(self) -> str:
        return "polynomial" if self.coeffs is not None else "tabulated"

    @property
    def degree(self) -> int:
        if self.coeffs is None:
            return -1  # tabulated: degree unknown, treated as non-polynomial
        deg = 0
        for i, c in enumerate(self.coeffs):
            if c != 0.0:
                deg = i
        return deg

    def third_derivative_coeffs(self) -> tuple[float, float]:
        """(constant, linear) coefficients of V''' for a polynomial spec."""
        if self.coeffs is None:
            raise ValidationError("V''' needs a polynomial potential")
        c3, c4 = self.coeffs[3], self.coeffs[4]
        return 6.0 * c3, 24.0 * c4


def evaluate_potential(spec: PotentialSpec, grid: Grid1D) -> np.ndarray:
    """Sample V at the grid nodes."""
    if spec.kind == "tabulated":
        if spec.values.shape != (grid.n_q,):
            raise ValidationError(
                f"tabulated potential length {spec.values.shape[0]} "
                f"!= n_q {grid.n_q}")
        return spec.values.copy()
    q = grid.q
    v = np.zeros_like(q)
    for i, c in enumerate(spec.coeffs):
        if c != 0.0:
            v += c * q ** i
    return v


def potential_derivative(spec: PotentialSpec, grid: Grid1D) -> np.ndarray:
    """V'(q) at the grid nodes (analytic for polynomials, spectral otherwise)."""
    if spec.kind == "polynomial":
        q = grid.q
        v = np.zeros_like(q)
        for i, c in enumerate(spec.coeffs):
            if i >= 1 and c != 0.0:
                v += i * c * q ** (i - 1)
        return v
    vals = evaluate_potential(spec, grid)
    kappa = 2.0 * np.pi * np.fft.fftfreq(grid.n_q, grid.dq)
    return np.real(np.fft.ifft(1j * kappa * np.fft.fft(vals)))


@dataclass(frozen=True)
class ThermalParams:
    """Friction gamma and temperature T; beta = 1/(k_B T)."""

    gamma: float
    temperature: float
    k_boltzmann: float = 1.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValidationError("gamma must be >= 0")
        if self.temperature <= 0:
            raise ValidationError("temperature must be positive")

    @property
    def beta(self) -> float:
        return 1.0 / (self.k_boltzmann * self.temperature)

    @property
    def kt(self) -> float:
        return self.k_boltzmann * self.temperature


@dataclass(frozen=True)
class GaussianCoherentParams:
    """Widths (a, b), center (X, Y) and frequency omega of a coherent Gaussian.

    Coherence requires b/a = (m*omega)^2; the effective quantization scale
    is sqrt(a*b).
    """

    a: float
    b: float
    X: float = 0.0
    Y: float = 0.0
    omega: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValidationError("widths a, b must be positive")

    @property
    def sigma_effective(self) -> float:
        return float(np.sqrt(self.a * self.b))

    def check_coherence(self, tol: float = 1e-12) -> None:
        target = (self.mass * self.omega) ** 2
        if abs(self.b / self.a - target) > tol * max(1.0, target):
            raise ValidationError(
                f"coherence condition b/a = (m*omega)^2 violated: "
                f"{self.b / self.a} vs {target}")

    def center_at(self, t: float) -> tuple[float, float]:
        """Harmonic trajectory of the center: Xdot = Y/m, Ydot = -m w^2 X."""
        w = self.omega
        c, s = np.cos(w * t), np.sin(w * t)
        X = self.X * c + (self.Y / (self.mass * w)) * s
        Y = self.Y * c - self.mass * w * self.X * s
        return float(X), float(Y)
