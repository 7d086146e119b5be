import numpy as np
import pytest

from phaselab import Units, construct_grid


@pytest.fixture
def units():
    return Units()


@pytest.fixture
def grid64():
    return construct_grid(64, (-8.0, 8.0), 1.0)


@pytest.fixture
def grid128():
    return construct_grid(128, (-8.0, 8.0), 1.0)


@pytest.fixture
def grid256():
    return construct_grid(256, (-12.0, 12.0), 1.0)


def band_limited_wave(grid, rng, envelope_frac=16.0, band_frac=8):
    """Random normalized wave with spectrum well inside the grid band.

    White-noise fields alias at the Nyquist mode and spoil spectral
    identities, and envelope tails reaching the box edge break the
    zero-padded shift correlation; these draws keep both under control.
    """
    n = grid.n_q
    L = grid.length
    coeffs = np.zeros(n, dtype=complex)
    band = n // band_frac
    idx = (np.arange(-band, band + 1)) % n
    coeffs[idx] = rng.standard_normal(2 * band + 1) + 1j * rng.standard_normal(2 * band + 1)
    vals = np.fft.ifft(coeffs) * n
    vals *= np.exp(-grid.q ** 2 / (2.0 * (L / envelope_frac) ** 2))
    vals /= np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dq)
    return vals
