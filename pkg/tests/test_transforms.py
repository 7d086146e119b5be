import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phaselab import (
    DensityMatrixField,
    GaussianCoherentParams,
    PotentialSpec,
    Units,
    ValidationError,
    WaveField,
    construct_grid,
)
from phaselab.classical import gaussian_coherent_state
from phaselab.quantum import glauber_wavefunction, stationary_states
from phaselab.transforms import (
    complete_set_sum,
    entropy,
    fourier_momentum,
    inverse_fourier_momentum,
    moments,
    overlap,
    wave_overlap,
    wigner,
    wigner_of_operator,
)

from conftest import band_limited_wave

UNITS = Units()


def random_wave(grid, seed):
    return WaveField(grid, band_limited_wave(grid, np.random.default_rng(seed)))


class TestWignerBasics:
    def test_real_valued(self, grid128):
        psi = random_wave(grid128, 0)
        W = wigner(psi)
        assert W.values.dtype == float

    @given(seed=st.integers(min_value=0, max_value=2 ** 31))
    @settings(max_examples=15, deadline=None)
    def test_mass_is_norm(self, seed):
        grid = construct_grid(128, (-8.0, 8.0), 1.0)
        psi = random_wave(grid, seed)
        assert wigner(psi).mass == pytest.approx(psi.norm, abs=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2 ** 31))
    @settings(max_examples=15, deadline=None)
    def test_q_marginal_is_density(self, seed):
        grid = construct_grid(128, (-8.0, 8.0), 1.0)
        psi = random_wave(grid, seed)
        marg = wigner(psi).values.sum(axis=1) * grid.dp
        assert np.abs(marg - np.abs(psi.values) ** 2).max() < 1e-12

    def test_sigma_mismatch_rejected(self, grid128):
        psi = random_wave(grid128, 1)
        with pytest.raises(ValidationError):
            wigner(psi, sigma=2.0)

    def test_translation_covariance(self, grid128):
        """Shifting psi by whole cells shifts W along q by the same cells."""
        psi = random_wave(grid128, 2)
        shift = 5
        w0 = wigner(psi).values
        w1 = wigner(psi.with_values(np.roll(psi.values, shift))).values
        interior = slice(16, -16)
        assert np.abs(np.roll(w0, shift, axis=0)[interior]
                      - w1[interior]).max() < 1e-10


class TestOverlap:
    @given(seed=st.integers(min_value=0, max_value=2 ** 31))
    @settings(max_examples=10, deadline=None)
    def test_pair_identity(self, seed):
        grid = construct_grid(128, (-8.0, 8.0), 1.0)
        rng = np.random.default_rng(seed)
        psi1 = WaveField(grid, band_limited_wave(grid, rng))
        psi2 = WaveField(grid, band_limited_wave(grid, rng))
        lhs = overlap(wigner(psi1), wigner(psi2))
        rhs = abs(wave_overlap(psi1, psi2)) ** 2 / (2.0 * np.pi * grid.sigma)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_self_overlap_purity_scale(self, grid128):
        psi = random_wave(grid128, 3)
        assert overlap(wigner(psi), wigner(psi)) == pytest.approx(
            1.0 / (2.0 * np.pi), rel=1e-8)


class TestFourierMomentum:
    def test_roundtrip(self, grid128):
        psi = random_wave(grid128, 4)
        W = wigner(psi)
        back = inverse_fourier_momentum(fourier_momentum(W))
        assert np.abs(back.values - W.values).max() < 1e-12


class TestOperatorTransform:
    def test_pure_state_matches_wave_transform(self, grid128):
        psi = random_wave(grid128, 5)
        rho = DensityMatrixField(grid128, np.outer(psi.values, psi.values.conj()))
        assert np.abs(wigner_of_operator(rho).values
                      - wigner(psi).values).max() < 1e-12

    def test_linear_in_mixture(self, grid128):
        psi1 = random_wave(grid128, 6)
        psi2 = random_wave(grid128, 7)
        rho = DensityMatrixField(
            grid128,
            0.3 * np.outer(psi1.values, psi1.values.conj())
            + 0.7 * np.outer(psi2.values, psi2.values.conj()))
        mix = 0.3 * wigner(psi1).values + 0.7 * wigner(psi2).values
        assert np.abs(wigner_of_operator(rho).values - mix).max() < 1e-12


class TestGaussianCoherent:
    def test_product_form(self, grid256):
        par = GaussianCoherentParams(a=1.0, b=1.0, X=1.0, Y=-0.5)
        psi = glauber_wavefunction(par, UNITS, grid256)
        W = wigner(psi)
        target = gaussian_coherent_state(par, 0.0, grid256)
        assert np.abs(W.values - target.values).max() < 1e-10

    def test_entropy_value(self, grid256):
        par = GaussianCoherentParams(a=1.0, b=1.0)
        f = gaussian_coherent_state(par, 0.0, grid256)
        assert entropy(f, UNITS) == pytest.approx(1.0 - np.log(2.0), abs=1e-12)

    def test_entropy_rejects_negative_field(self, grid256):
        psi0 = glauber_wavefunction(
            GaussianCoherentParams(a=1.0, b=1.0, X=2.0), UNITS, grid256)
        psi1 = glauber_wavefunction(
            GaussianCoherentParams(a=1.0, b=1.0, X=-2.0), UNITS, grid256)
        cat = psi0.with_values((psi0.values + psi1.values) / np.sqrt(2.0))
        cat = cat.with_values(cat.values / np.sqrt(cat.norm))
        with pytest.raises(ValidationError, match="classical"):
            entropy(wigner(cat), UNITS)

    def test_entropy_needs_unit_mass(self, grid256):
        f = gaussian_coherent_state(GaussianCoherentParams(a=1.0, b=1.0), 0.0, grid256)
        with pytest.raises(ValidationError):
            entropy(f.with_values(2.0 * f.values), UNITS)


class TestMoments:
    def test_energy_matches_expectation(self, grid256):
        V = PotentialSpec.harmonic(1.0)
        pairs = stationary_states(V, UNITS, 5, grid256)
        for lam, pair in enumerate(pairs):
            mo = moments(wigner(pair.state), V, UNITS)
            assert mo.mean_H == pytest.approx(pair.energy, rel=1e-8)

    def test_center_of_packet(self, grid256):
        par = GaussianCoherentParams(a=1.0, b=1.0, X=1.5, Y=-0.75)
        mo = moments(wigner(glauber_wavefunction(par, UNITS, grid256)), units=UNITS)
        assert mo.mean_q == pytest.approx(1.5, abs=1e-10)
        assert mo.mean_p == pytest.approx(-0.75, abs=1e-10)
        assert mo.mass == pytest.approx(1.0, abs=1e-12)


class TestCompleteSetSum:
    def test_full_basis_reaches_cell_density(self, grid64):
        """A complete discrete basis fills phase space at density 1/h."""
        pairs = stationary_states(PotentialSpec.harmonic(1.0), UNITS, 64, grid64)
        states = [p.state for p in pairs]
        val = complete_set_sum(states, (0.0, 0.0))
        assert val == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-12)
        # the sum rule holds at off-center points as well
        val2 = complete_set_sum(states, (grid64.q[10], grid64.p[43]))
        assert val2 == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-12)

    def test_single_state_matches_wigner(self, grid64):
        pairs = stationary_states(PotentialSpec.harmonic(1.0), UNITS, 1, grid64)
        state = pairs[0].state
        iq = grid64.n_q // 2
        ip = grid64.n_q // 2
        val = complete_set_sum([state], (grid64.q[iq], grid64.p[ip]))
        ref = wigner(state).values[iq, ip]
        # node-symmetrized quadrature vs upsampled correlation: close but
        # not identical discretizations of the same half-shift product
        assert val == pytest.approx(ref, rel=1e-2)

    def test_non_orthonormal_rejected(self, grid64):
        pairs = stationary_states(PotentialSpec.harmonic(1.0), UNITS, 2, grid64)
        bad = pairs[0].state.with_values(1.1 * pairs[0].state.values)
        with pytest.raises(ValidationError):
            complete_set_sum([bad, pairs[1].state], (0.0, 0.0))

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            complete_set_sum([], (0.0, 0.0))
