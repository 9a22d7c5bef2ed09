"""Alignment hydrodynamics right-hand sides, pseudo-spectrally evaluated.

Three equivalent formulations of the same system around the equilibrium
(rho, u) = (1, 0):

* primitive (rho, u) with the momentum balance for rho*u,
* perturbation (a, u) with a = rho - 1, linear part mu Lambda^alpha u
  + gamma grad a made explicit,
* symmetrized (sigma, u) where sigma is the classical sound-variable
  change making the pressure coupling sqrt(gamma)-symmetric.

The nonlocal alignment force is evaluated in its commutator form
-mu rho (Lambda^alpha(rho u) - u Lambda^alpha rho); quadratic products
are formed pointwise in physical space and dealiased on re-transform.
States are kept band-limited (2/3 rule), which makes the force exactly
momentum-neutral in the discrete quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PhysParams
from .spectral import (
    SpectralField,
    dealias,
    divergence,
    fractional_laplacian,
    gradient,
    inverse_riesz_div,
    leray_project,
)

__all__ = [
    "PositivityError",
    "SigmaDomainError",
    "SimState",
    "alignment_term",
    "rhs_primitive",
    "rhs_perturbation",
    "rhs_sigma",
    "sigma_transform",
    "a_from_sigma",
    "vector_nonlinearity",
    "nonlinearities",
    "conserved",
]

RHO_MIN_DEFAULT = 1e-8


class PositivityError(RuntimeError):
    """Density dropped to or below the positivity floor."""


class SigmaDomainError(ValueError):
    """sigma left the invertibility range of the density change of variables."""


@dataclass
class SimState:
    """Time t with density deviation a = rho - 1 and velocity u on one grid."""

    t: float
    a: SpectralField
    u: SpectralField

    def __post_init__(self):
        if self.a.grid is not self.u.grid:
            raise ValueError("a and u must share one grid")

    @property
    def grid(self):
        return self.a.grid

    def rho_values(self, rho_min: float = RHO_MIN_DEFAULT) -> np.ndarray:
        rho = 1.0 + self.a.values()
        if np.min(rho) <= rho_min:
            raise PositivityError(
                f"min density {np.min(rho):.3e} at or below floor {rho_min:.1e} (t = {self.t:g})")
        return rho


def _product(grid, values) -> SpectralField:
    """Physical-space product back to a dealiased spectral field."""
    return dealias(SpectralField.from_samples(grid, values))


def _check_rho(rho_vals, rho_min):
    m = float(np.min(rho_vals))
    if m <= rho_min:
        raise PositivityError(f"min density {m:.3e} at or below floor {rho_min:.1e}")


def alignment_term(rho: SpectralField, u: SpectralField, p: PhysParams,
                   rho_min: float = RHO_MIN_DEFAULT) -> SpectralField:
    """-mu rho (Lambda^alpha(rho u) - u Lambda^alpha rho), dealiased products.

    Vanishes identically on consensus states (constant u) and reduces to
    -mu Lambda^alpha u at rho = 1.
    """
    grid = rho.grid
    rho_vals = rho.values()
    _check_rho(rho_vals, rho_min)
    u_vals = u.values()
    momentum = _product(grid, rho_vals[np.newaxis] * u_vals)
    lam_m = fractional_laplacian(momentum, p.alpha).values()
    lam_rho = fractional_laplacian(rho, p.alpha).values()
    inner = lam_m - u_vals * lam_rho[np.newaxis]
    return _product(grid, -p.mu * rho_vals[np.newaxis] * inner)


def rhs_primitive(rho: SpectralField, u: SpectralField, p: PhysParams,
                  rho_min: float = RHO_MIN_DEFAULT):
    """(d rho/dt, d(rho u)/dt): continuity and momentum balance.

    Momentum flux div(rho u x u), pressure gradient of rho^gamma, and the
    alignment force.
    """
    grid = rho.grid
    rho_vals = rho.values()
    _check_rho(rho_vals, rho_min)
    u_vals = u.values()

    m = _product(grid, rho_vals[np.newaxis] * u_vals)
    drho = -1.0 * divergence(m)

    m_vals = m.values()
    flux_rows = [
        divergence(_product(grid, m_vals[i][np.newaxis] * u_vals)).coeffs
        for i in range(grid.dimension)
    ]
    div_flux = SpectralField(grid, np.stack(flux_rows))

    pressure = _product(grid, rho_vals**p.gamma)
    dmom = -1.0 * div_flux - gradient(pressure) + alignment_term(rho, u, p, rho_min)
    return drho, dmom


def vector_nonlinearity(state: SimState, p: PhysParams,
                        rho_min: float = RHO_MIN_DEFAULT) -> SpectralField:
    """Quadratic-and-higher forcing of the velocity equation in (a, u) form:

    mu (u Lambda^alpha a - Lambda^alpha(a u)) - u.grad u
    - gamma (rho^{gamma-2} - 1) grad a.
    """
    grid = state.grid
    a_vals = state.a.values()
    rho_vals = 1.0 + a_vals
    _check_rho(rho_vals, rho_min)
    u_vals = state.u.values()

    au = _product(grid, a_vals[np.newaxis] * u_vals)
    commutator = (u_vals * fractional_laplacian(state.a, p.alpha).values()[np.newaxis]
                  - fractional_laplacian(au, p.alpha).values())

    grad_u = [gradient(SpectralField(grid, state.u.coeffs[i])).values()
              for i in range(grid.dimension)]
    advect = np.stack([
        np.sum(u_vals * grad_u[i], axis=0) for i in range(grid.dimension)
    ])

    grad_a = gradient(state.a).values()
    if p.gamma == 2.0:
        pressure_corr = np.zeros_like(grad_a)
    else:
        pressure_corr = p.gamma * (rho_vals ** (p.gamma - 2.0) - 1.0)[np.newaxis] * grad_a

    return _product(grid, p.mu * commutator - advect - pressure_corr)


def rhs_perturbation(state: SimState, p: PhysParams,
                     rho_min: float = RHO_MIN_DEFAULT):
    """Full (da/dt, du/dt) for the perturbation variables, linear part included."""
    grid = state.grid
    a_vals = state.a.values()
    _check_rho(1.0 + a_vals, rho_min)
    u_vals = state.u.values()

    au = _product(grid, a_vals[np.newaxis] * u_vals)
    da = -1.0 * divergence(state.u) - divergence(au)
    du = (-p.mu * fractional_laplacian(state.u, p.alpha)
          - p.gamma * gradient(state.a)
          + vector_nonlinearity(state, p, rho_min))
    return da, du


def sigma_transform(a: SpectralField, gamma: float) -> SpectralField:
    """Sound variable: ln(rho) at gamma = 1, else
    2 sqrt(gamma)/(gamma-1) (rho^{(gamma-1)/2} - 1); pointwise, exact round trip."""
    rho = 1.0 + a.values()
    if np.min(rho) <= 0.0:
        raise PositivityError(f"min density {np.min(rho):.3e} not positive")
    if gamma == 1.0:
        vals = np.log(rho)
    else:
        c = 2.0 * np.sqrt(gamma) / (gamma - 1.0)
        vals = c * (rho ** ((gamma - 1.0) / 2.0) - 1.0)
    return SpectralField.from_samples(a.grid, vals)


def a_from_sigma(sigma: SpectralField, gamma: float) -> SpectralField:
    """Inverse of sigma_transform; rejects sigma outside the invertible range."""
    s = sigma.values()
    if gamma == 1.0:
        vals = np.expm1(s)
    else:
        base = (gamma - 1.0) / (2.0 * np.sqrt(gamma)) * s + 1.0
        if np.min(base) <= 0.0:
            raise SigmaDomainError(
                f"(gamma-1) sigma / (2 sqrt(gamma)) + 1 reaches {np.min(base):.3e} <= 0")
        vals = base ** (2.0 / (gamma - 1.0)) - 1.0
    return SpectralField.from_samples(sigma.grid, vals)


def rhs_sigma(sigma: SpectralField, u: SpectralField, p: PhysParams,
              rho_min: float = RHO_MIN_DEFAULT):
    """(d sigma/dt, du/dt) of the symmetrized system.

    The alignment commutator is evaluated through a = a_from_sigma(sigma);
    the (gamma-1)/2 couplings vanish identically at gamma = 1.
    """
    grid = sigma.grid
    sg = p.sound_speed
    a = dealias(a_from_sigma(sigma, p.gamma))
    a_vals = a.values()
    _check_rho(1.0 + a_vals, rho_min)
    u_vals = u.values()
    s_vals = sigma.values()

    div_u = divergence(u)
    div_u_vals = div_u.values()
    grad_s = gradient(sigma).values()

    adv_sigma = np.sum(u_vals * grad_s, axis=0)
    dsig = (-sg * div_u
            - _product(grid, adv_sigma + 0.5 * (p.gamma - 1.0) * s_vals * div_u_vals))

    au = _product(grid, a_vals[np.newaxis] * u_vals)
    commutator = (u_vals * fractional_laplacian(a, p.alpha).values()[np.newaxis]
                  - fractional_laplacian(au, p.alpha).values())
    grad_u = [gradient(SpectralField(grid, u.coeffs[i])).values()
              for i in range(grid.dimension)]
    advect = np.stack([np.sum(u_vals * grad_u[i], axis=0) for i in range(grid.dimension)])
    sigma_push = 0.5 * (p.gamma - 1.0) * s_vals[np.newaxis] * grad_s

    du = (-p.mu * fractional_laplacian(u, p.alpha)
          - sg * gradient(sigma)
          + _product(grid, p.mu * commutator - advect - sigma_push))
    return dsig, du


def nonlinearities(state: SimState, p: PhysParams,
                   rho_min: float = RHO_MIN_DEFAULT):
    """Forcing triple (F, G, H) of the split linear system.

    F = -div(a u) drives the density channel, G = Lambda^{-1} div of the
    velocity forcing drives the compressible scalar, and H, its Leray
    projection, drives the solenoidal part (divergence-free by
    construction).
    """
    grid = state.grid
    a_vals = state.a.values()
    _check_rho(1.0 + a_vals, rho_min)
    au = _product(grid, a_vals[np.newaxis] * state.u.values())
    f = -1.0 * divergence(au)
    nl = vector_nonlinearity(state, p, rho_min)
    return f, inverse_riesz_div(nl), leray_project(nl)


def conserved(state: SimState):
    """(mass, momentum): box integrals of a and of (1 + a) u."""
    grid = state.grid
    mass = float(state.a.integral())
    weight = grid.volume / grid.num_points
    rho = 1.0 + state.a.values()
    mom = np.sum(rho[np.newaxis] * state.u.values(),
                 axis=tuple(range(1, grid.dimension + 1))) * weight
    return mass, mom
