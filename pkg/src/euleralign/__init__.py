"""Pseudo-spectral Euler-alignment solver and Fourier-side decay analysis."""

from .green import GreenSample, Regime, classify_regime, eigenvalues, green_matrix
from .params import PhysParams
from .rates import RateTable, rate_table
from .spectral import Grid, SpectralField, make_grid

__version__ = "0.1.0"

__all__ = [
    "PhysParams",
    "Grid",
    "SpectralField",
    "make_grid",
    "GreenSample",
    "Regime",
    "classify_regime",
    "eigenvalues",
    "green_matrix",
    "RateTable",
    "rate_table",
    "__version__",
]
