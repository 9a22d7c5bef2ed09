"""Initial-data factories: periodized Gaussian bumps with prescribed
amplitude, mean density deviation, and net momentum."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import SimState
from .params import PhysParams
from .spectral import Grid, SpectralField, dealias

__all__ = ["ScenarioSpec", "preset", "make_initial", "PRESETS"]


@dataclass(frozen=True)
class ScenarioSpec:
    """amplitude scales the density bump; velocity_amplitude defaults to it.
    mean_a / momentum prescribe exact conserved quantities (None keeps the
    bump's natural values).  width defaults to length/16."""

    name: str = "gaussian"
    amplitude: float = 0.01
    velocity_amplitude: float | None = None
    width: float | None = None
    mean_a: float | None = None
    momentum: tuple | None = None
    random_phases: bool = False


PRESETS = {
    # generic bump, natural mean and momentum
    "gaussian": ScenarioSpec(name="gaussian"),
    # nonzero conserved quantities, the optimality-hypothesis data
    "lower-bound": ScenarioSpec(name="lower-bound", mean_a=0.01, momentum="auto"),
    # both conserved quantities vanish exactly: the torus stand-in for
    # whole-space decay (bump spectrum kept, only the exact zero mode removed)
    "zero-mean": ScenarioSpec(name="zero-mean", mean_a=0.0, momentum="zero"),
}


def preset(name: str, amplitude: float = 0.01, **overrides) -> ScenarioSpec:
    if name not in PRESETS:
        raise ValueError(f"unknown scenario {name!r}; have {sorted(PRESETS)}")
    return replace(PRESETS[name], amplitude=amplitude, **overrides)


def _bump(grid: Grid, center_frac, width: float) -> np.ndarray:
    """Periodized Gaussian exp(-|x - c|^2 / (2 w^2)), images summed exactly."""
    coords = grid.coords()
    L = grid.length
    total = np.zeros(grid.shape)
    images = range(-2, 3)
    shifts = np.meshgrid(*([list(images)] * grid.dimension), indexing="ij")
    shifts = np.stack([s.ravel() for s in shifts], axis=1)
    for shift in shifts:
        r2 = np.zeros(grid.shape)
        for ax in range(grid.dimension):
            d = coords[ax] - center_frac[ax] * L - shift[ax] * L
            r2 += d * d
        total += np.exp(-r2 / (2.0 * width**2))
    return total


def _randomize_phases(field: SpectralField, rng) -> SpectralField:
    """Multiply the spectrum by the unit phases of white real noise.

    The phase function of a real field is odd in k, so realness survives;
    magnitudes (hence all the norms used for fits) are untouched.
    """
    noise = rng.standard_normal(field.grid.shape)
    nhat = np.fft.fftn(noise)
    phases = nhat / np.maximum(np.abs(nhat), 1e-300)
    return SpectralField(field.grid, field.coeffs * phases)


def make_initial(grid: Grid, p: PhysParams, scenario: ScenarioSpec,
                 seed: int = 0) -> SimState:
    """Build the initial state; raises if the bump violates positivity."""
    if scenario.amplitude <= 0:
        raise ValueError("amplitude must be positive")
    rng = np.random.default_rng(seed)
    width = scenario.width if scenario.width is not None else grid.length / 16.0
    vel_amp = (scenario.velocity_amplitude
               if scenario.velocity_amplitude is not None else scenario.amplitude)

    a = SpectralField.from_samples(
        grid, scenario.amplitude * _bump(grid, [0.4] * grid.dimension, width))
    u_comps = []
    for i in range(grid.dimension):
        center = [0.6 if ax == i else 0.55 for ax in range(grid.dimension)]
        u_comps.append(vel_amp * _bump(grid, center, width))
    u = SpectralField.from_samples(grid, np.stack(u_comps))

    if scenario.random_phases:
        a = _randomize_phases(a, rng)
        u = SpectralField(grid, np.stack(
            [_randomize_phases(SpectralField(grid, u.coeffs[i]), rng).coeffs
             for i in range(grid.dimension)]))

    a = dealias(a)
    u = dealias(u)

    if scenario.mean_a is not None:
        coeffs = a.coeffs.copy()
        coeffs[(0,) * grid.dimension] = scenario.mean_a
        a = SpectralField(grid, coeffs)

    momentum = scenario.momentum
    if momentum == "auto":
        momentum = tuple(0.01 for _ in range(grid.dimension))
    elif momentum == "zero":
        momentum = tuple(0.0 for _ in range(grid.dimension))
    if momentum is not None:
        rho = 1.0 + a.values()
        weight = grid.volume / grid.num_points
        current = np.sum(rho[np.newaxis] * u.values(),
                         axis=tuple(range(1, grid.dimension + 1))) * weight
        rho_total = float(np.sum(rho) * weight)
        shift = (np.asarray(momentum, dtype=float) - current) / rho_total
        coeffs = u.coeffs.copy()
        for i in range(grid.dimension):
            coeffs[(i,) + (0,) * grid.dimension] += shift[i]
        u = SpectralField(grid, coeffs)

    rho_min = float(np.min(1.0 + a.values()))
    if rho_min <= 0.5:
        raise ValueError(
            f"amplitude {scenario.amplitude} drives min density to {rho_min:.3f}")
    return SimState(0.0, a, u)
