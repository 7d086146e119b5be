import numpy as np
import pytest

from phaselab import (
    GaussianCoherentParams,
    PotentialSpec,
    Units,
    ValidationError,
    construct_grid,
)
from phaselab.quantum import (
    SplitOperatorPropagator,
    gaussian_packet,
    glauber_wavefunction,
    stationary_states,
    tdse_step,
)
from phaselab.transforms import wave_overlap

UNITS = Units()


class TestPropagator:
    def test_norm_conserved(self, grid128):
        psi = glauber_wavefunction(
            GaussianCoherentParams(a=1.0, b=1.0, X=1.0), UNITS, grid128)
        prop = SplitOperatorPropagator(grid128, PotentialSpec.harmonic(1.0), 1e-3, UNITS)
        out = prop.run(psi, 2000)
        assert out.norm == pytest.approx(1.0, abs=1e-12)

    def test_eigenstate_accumulates_phase_only(self, grid128):
        V = PotentialSpec.harmonic(1.0)
        pair = stationary_states(V, UNITS, 3, grid128)[2]
        prop = SplitOperatorPropagator(grid128, V, 1e-3, UNITS)
        out = prop.run(pair.state, 1000)
        ov = wave_overlap(pair.state, out)
        assert abs(ov) == pytest.approx(1.0, abs=1e-8)
        # phase advance is -E t / sigma
        expected = np.exp(-1j * pair.energy * 1.0 / UNITS.sigma)
        assert ov == pytest.approx(expected, abs=1e-4)

    def test_fourth_order_beats_second(self, grid128):
        V = PotentialSpec.harmonic(1.0)
        psi = glauber_wavefunction(
            GaussianCoherentParams(a=1.0, b=1.0, X=1.5), UNITS, grid128)
        X, Y = GaussianCoherentParams(a=1.0, b=1.0, X=1.5).center_at(0.5)
        ref = glauber_wavefunction(
            GaussianCoherentParams(a=1.0, b=1.0, X=X, Y=Y), UNITS, grid128)

        def error(order):
            prop = SplitOperatorPropagator(grid128, V, 1e-2, UNITS, order=order)
            out = prop.run(psi, 50)
            return 1.0 - abs(wave_overlap(ref, out))

        assert error(4) < error(2) / 10.0

    def test_phase_wrap_guard(self, grid128):
        with pytest.raises(ValidationError, match="wrap guard"):
            SplitOperatorPropagator(
                grid128, PotentialSpec.polynomial(0, 0, 0, 0, 100.0), 1.0, UNITS)

    def test_single_step_helper(self, grid128):
        psi = glauber_wavefunction(
            GaussianCoherentParams(a=1.0, b=1.0), UNITS, grid128)
        out = tdse_step(psi, PotentialSpec.free(), 1e-3, UNITS)
        assert out.norm == pytest.approx(1.0, abs=1e-13)


class TestStationaryStates:
    def test_harmonic_spectrum(self, grid128):
        pairs = stationary_states(PotentialSpec.harmonic(1.0), UNITS, 10, grid128)
        for lam, pair in enumerate(pairs):
            assert pair.energy == pytest.approx(
                UNITS.sigma * (lam + 0.5), rel=1e-9)

    def test_orthonormal(self, grid128):
        pairs = stationary_states(PotentialSpec.harmonic(1.0), UNITS, 6, grid128)
        mat = np.array([p.state.values for p in pairs])
        gram = (mat.conj() @ mat.T) * grid128.dq
        assert np.abs(gram - np.eye(6)).max() < 1e-10

    def test_count_bounded(self, grid64):
        with pytest.raises(ValidationError):
            stationary_states(PotentialSpec.harmonic(1.0), UNITS, 65, grid64)

    def test_quartic_ground_state_positive_energy(self, grid128):
        V = PotentialSpec.polynomial(0, 0, 0.5, 0, 0.1)
        pairs = stationary_states(V, UNITS, 3, grid128)
        assert pairs[0].energy > 0.5 * UNITS.sigma  # above the harmonic value
        assert pairs[1].energy > pairs[0].energy


class TestPackets:
    def test_glauber_requires_coherent_widths(self, grid128):
        with pytest.raises(ValidationError):
            glauber_wavefunction(
                GaussianCoherentParams(a=1.0, b=2.0), UNITS, grid128)

    def test_glauber_sigma_must_match(self, grid128):
        par = GaussianCoherentParams(a=2.0, b=2.0)  # sigma_eff = 2
        with pytest.raises(ValidationError):
            glauber_wavefunction(par, UNITS, grid128)

    def test_packet_norm_and_center(self, grid256):
        psi = gaussian_packet(grid256, 1.0, 0.5, 2.0, 1.0)
        assert psi.norm == pytest.approx(1.0, abs=1e-10)
        dens = np.abs(psi.values) ** 2
        assert float((dens * grid256.q).sum() * grid256.dq) == pytest.approx(
            1.0, abs=1e-10)

    def test_packet_width_validated(self, grid256):
        with pytest.raises(ValidationError):
            gaussian_packet(grid256, 0.0, -1.0, 0.0, 1.0)
