import numpy as np
import pytest

from euleralign.spectral import SpectralField, dealias, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(grid, rng, ncomp=0, amplitude=1.0):
    """Band-limited random real field (2/3 truncated, zero Nyquist issues)."""
    shape = grid.shape if ncomp == 0 else (ncomp,) + grid.shape
    f = SpectralField.from_samples(grid, amplitude * rng.standard_normal(shape))
    return dealias(f)


def smooth_field(grid, rng, ncomp=0, amplitude=1.0):
    """Random field with a Gaussian spectral envelope decayed to ~1e-22 at
    the dealias cutoff, so products of pairs stay spectrally resolved."""
    f = random_field(grid, rng, ncomp)
    kcut = (grid.points // 3) * 2.0 * np.pi / grid.length
    ell = 7.0 / kcut
    envelope = np.exp(-((grid.kmag * ell) ** 2))
    coeffs = f.coeffs * envelope
    g = SpectralField(grid, coeffs)
    peak = np.max(np.abs(g.values()))
    return SpectralField(grid, coeffs * (amplitude / peak))


@pytest.fixture
def grid1d():
    return make_grid(1, 64, 2.0 * np.pi)


@pytest.fixture
def grid2d():
    return make_grid(2, 32, 2.0 * np.pi)
