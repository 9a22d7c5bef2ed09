"""Periodic-box spectral core: grids, real fields, Fourier multipliers.

Conventions used throughout the package:

* A field on the box [0, L)^N is stored by its discrete Fourier
  coefficients c_k with f(x) = sum_k c_k exp(i xi_k . x), where
  xi_k = 2*pi*k/L and k runs over the numpy fftfreq ordering
  {0, 1, ..., n/2-1, -n/2, ..., -1} per axis.
* Lambda = (-Delta)^{1/2} is the multiplier |xi|.  Negative-order
  multipliers set the xi = 0 coefficient to zero.
* The compressible scalar is v = Lambda^{-1} div u, so that
  u = -grad Lambda^{-1} v + P u with the Leray projector
  P = Id - grad Delta^{-1} div.
* Quadrature: uniform-grid trapezoid (exact for trigonometric
  polynomials) for L1/Linf, Parseval for L2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "SpectralField",
    "make_grid",
    "fractional_laplacian",
    "fourier_multiplier",
    "gradient",
    "divergence",
    "inverse_riesz_div",
    "leray_project",
    "compressible_from_v",
    "sobolev_norm",
    "dealias",
    "lebesgue_norms",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with precomputed wavenumber arrays.

    dimension : 1 or 2
    points    : points per axis (even, >= 8)
    length    : physical box length per axis
    """

    dimension: int
    points: int
    length: float

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.points < 8 or self.points % 2 != 0:
            raise ValueError(f"points per axis must be even and >= 8, got {self.points}")
        if not self.length > 0:
            raise ValueError(f"box length must be positive, got {self.length}")

        n, L = self.points, float(self.length)
        dx = L / n
        k1 = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)  # {0,..,n/2-1,-n/2,..,-1} * 2pi/L
        x1 = dx * np.arange(n)

        axes = tuple(np.array(k1) for _ in range(self.dimension))
        mesh = np.meshgrid(*axes, indexing="ij")
        kvec = np.stack(mesh)                      # (N, n, ..., n)
        kmag = np.sqrt(np.sum(kvec**2, axis=0))

        # ik multipliers for odd derivatives zero the unpaired Nyquist mode
        # so real fields stay real (see fft-deriv folklore).
        kd1 = k1.copy()
        kd1[n // 2] = 0.0
        daxes = tuple(np.array(kd1) for _ in range(self.dimension))
        dmesh = np.meshgrid(*daxes, indexing="ij")
        kderiv = np.stack(dmesh)

        kcut = n // 3
        idx = np.fft.fftfreq(n, d=1.0 / n)  # integer mode indices
        keep1 = np.abs(idx) <= kcut
        masks = np.meshgrid(*(keep1 for _ in range(self.dimension)), indexing="ij")
        dealias_mask = np.logical_and.reduce(masks)

        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "kvec", kvec)
        object.__setattr__(self, "kmag", kmag)
        object.__setattr__(self, "kderiv", kderiv)
        object.__setattr__(self, "dealias_mask", dealias_mask)

    @property
    def shape(self):
        return (self.points,) * self.dimension

    @property
    def num_points(self) -> int:
        return self.points**self.dimension

    @property
    def volume(self) -> float:
        return float(self.length) ** self.dimension

    def coords(self):
        """Physical coordinate arrays, shape (N, n, ..., n)."""
        mesh = np.meshgrid(*(self.x1 for _ in range(self.dimension)), indexing="ij")
        return np.stack(mesh)


def make_grid(dimension: int, points_per_axis: int, box_length: float) -> Grid:
    """Build a periodic grid; rejects odd/tiny point counts and L <= 0."""
    return Grid(dimension, points_per_axis, box_length)


@dataclass
class SpectralField:
    """Real scalar or vector field stored by Fourier coefficients.

    coeffs has shape grid.shape for a scalar and (m, *grid.shape) for a
    vector field with m components.  Physical samples are materialized
    lazily and cached; fields are treated as immutable values.
    """

    grid: Grid
    coeffs: np.ndarray
    _values: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def is_vector(self) -> bool:
        return self.coeffs.ndim == self.grid.dimension + 1

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0] if self.is_vector else 1

    @classmethod
    def from_samples(cls, grid: Grid, values: np.ndarray) -> "SpectralField":
        values = np.asarray(values, dtype=np.float64)
        spatial_axes = tuple(range(-grid.dimension, 0))
        coeffs = np.fft.fftn(values, axes=spatial_axes) / grid.num_points
        return cls(grid, coeffs, values.copy())

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int = 0) -> "SpectralField":
        shape = grid.shape if ncomp == 0 else (ncomp,) + grid.shape
        return cls(grid, np.zeros(shape, dtype=np.complex128))

    def values(self) -> np.ndarray:
        """Physical samples (inverse transform, cached)."""
        if self._values is None:
            spatial_axes = tuple(range(-self.grid.dimension, 0))
            phys = np.fft.ifftn(self.coeffs * self.grid.num_points, axes=spatial_axes)
            self._values = np.ascontiguousarray(phys.real)
        return self._values

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    def mean(self):
        """Box average(s): the zero-mode coefficient."""
        zero = (slice(None),) + (0,) * self.grid.dimension if self.is_vector else (0,) * self.grid.dimension
        return np.real(self.coeffs[zero])

    def integral(self):
        return self.mean() * self.grid.volume

    def l2(self) -> float:
        """L2 norm over the box, via Parseval."""
        return float(np.sqrt(self.grid.volume * np.sum(np.abs(self.coeffs) ** 2)))

    def hermitian_defect(self) -> float:
        """Max |c(-k) - conj(c(k))|; zero for real fields."""
        spatial_axes = tuple(range(-self.grid.dimension, 0))
        flipped = self.coeffs.copy()
        for ax in spatial_axes:
            flipped = np.flip(flipped, axis=ax)
            flipped = np.roll(flipped, 1, axis=ax)
        return float(np.max(np.abs(flipped - np.conj(self.coeffs))))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


def fourier_multiplier(f: SpectralField, mult: np.ndarray) -> SpectralField:
    """Apply a scalar multiplier array (shape grid.shape) to every component."""
    return f.with_coeffs(f.coeffs * mult)


def fractional_laplacian(f: SpectralField, beta: float) -> SpectralField:
    """Lambda^beta f: multiplier |xi|^beta, with 0^0 = 1 so beta = 0 is the identity."""
    if beta < 0:
        raise ValueError(f"order must be >= 0, got {beta}")
    mult = f.grid.kmag**beta if beta > 0 else np.ones_like(f.grid.kmag)
    return fourier_multiplier(f, mult)


def riesz_power(f: SpectralField, power: float) -> SpectralField:
    """|xi|^power with the zero mode set to zero; valid for any real power."""
    kmag = f.grid.kmag
    mult = np.zeros_like(kmag)
    nz = kmag > 0
    mult[nz] = kmag[nz] ** power
    return fourier_multiplier(f, mult)


def gradient(f: SpectralField) -> SpectralField:
    """Spectral gradient of a scalar field; returns an N-component field."""
    coeffs = 1j * f.grid.kderiv * f.coeffs[np.newaxis]
    return SpectralField(f.grid, coeffs)


def divergence(u: SpectralField) -> SpectralField:
    """Spectral divergence of a vector field."""
    coeffs = np.sum(1j * u.grid.kderiv * u.coeffs, axis=0)
    return SpectralField(u.grid, coeffs)


def inverse_riesz_div(u: SpectralField) -> SpectralField:
    """v = Lambda^{-1} div u, the compressible scalar; v(0-mode) = 0."""
    grid = u.grid
    div_hat = np.sum(1j * grid.kderiv * u.coeffs, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        v_hat = np.where(grid.kmag > 0, div_hat / grid.kmag, 0.0)
    return SpectralField(grid, v_hat)


def compressible_from_v(v: SpectralField) -> SpectralField:
    """-grad Lambda^{-1} v, the compressible velocity carried by v."""
    grid = v.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(grid.kmag > 0, 1.0 / grid.kmag, 0.0)
    coeffs = -1j * grid.kderiv * (scale * v.coeffs)[np.newaxis]
    return SpectralField(grid, coeffs)


def leray_project(u: SpectralField) -> SpectralField:
    """P u = (I - xi xi^T/|xi|^2) u per mode; the zero mode passes through."""
    grid = u.grid
    kdotu = np.sum(grid.kvec * u.coeffs, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        k2 = grid.kmag**2
        factor = np.where(k2 > 0, kdotu / np.where(k2 > 0, k2, 1.0), 0.0)
    coeffs = u.coeffs - grid.kvec * factor[np.newaxis]
    return SpectralField(grid, coeffs)


def sobolev_norm(f: SpectralField, s: float, homogeneous: bool = True) -> float:
    """H^s norm: (sum |xi|^{2s} |c|^2)^{1/2} or with weight (1+|xi|^2)^s.

    Parseval weights included, so s = 0 homogeneous equals the L2 norm.
    """
    if s < 0:
        raise ValueError(f"order must be >= 0, got {s}")
    kmag = f.grid.kmag
    if homogeneous:
        weight = kmag ** (2.0 * s) if s > 0 else np.ones_like(kmag)
    else:
        weight = (1.0 + kmag**2) ** s
    total = np.sum(weight * np.abs(f.coeffs) ** 2)
    return float(np.sqrt(f.grid.volume * total))


def dealias(f: SpectralField) -> SpectralField:
    """2/3-rule truncation: zero every coefficient with an axis index |k| > n/3."""
    return f.with_coeffs(f.coeffs * f.grid.dealias_mask)


def lebesgue_norms(f: SpectralField):
    """(L1, L2, Linf) norms; L1/Linf from physical samples, L2 via Parseval."""
    vals = f.values()
    if f.is_vector:
        mag = np.sqrt(np.sum(vals**2, axis=0))
    else:
        mag = np.abs(vals)
    w = f.grid.volume / f.grid.num_points
    return float(np.sum(mag) * w), f.l2(), float(np.max(mag))
