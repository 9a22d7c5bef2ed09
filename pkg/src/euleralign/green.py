"""Exact Fourier-side objects of the linearized compressible pair.

Per mode xi, the pair (a_hat, v_hat) solves d/dt y = A y + forcing with

    A = [[0, -|xi|], [gamma*|xi|, -mu*|xi|^alpha]],

whose eigenvalues are

    l_pm = (-mu |xi|^alpha -+ sqrt(mu^2 |xi|^{2 alpha} - 4 gamma |xi|^2)) / 2.

The fundamental matrix G(t, xi) = exp(t A) changes character at the
discriminant zero |xi|^{1-alpha} = mu / (2 sqrt(gamma)): distinct real
eigenvalues below (low-frequency regime), a conjugate pair above
(high-frequency), and a Jordan block at equality (critical).  For
alpha = 1 the discriminant sign is |xi|-independent and follows
mu^2 - 4 gamma.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .kernels import green_entries
from .params import PhysParams

__all__ = [
    "Regime",
    "GreenSample",
    "eigenvalues",
    "classify_regime",
    "critical_radius",
    "green_matrix",
    "green_matrix_batch",
    "generator",
]

_REGIME_TOL = 1e-9


class Regime(enum.Enum):
    LOW_FREQUENCY = "LowFrequency"
    HIGH_FREQUENCY = "HighFrequency"
    CRITICAL = "Critical"


@dataclass(frozen=True)
class GreenSample:
    """G(t, xi) at one (t, |xi|): entries, eigenvalue pair, regime tag."""

    t: float
    xi: float
    g11: complex
    g12: complex
    g21: complex
    g22: complex
    lam_plus: complex
    lam_minus: complex
    regime: Regime

    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g21, self.g22]])


def eigenvalues(xi, p: PhysParams):
    """(l_plus, l_minus) per mode; l_plus carries the faster damping.

    Principal complex square root; both return (0, 0) at xi = 0.  The slow
    root is recovered from the product l_+ l_- = gamma |xi|^2, which avoids
    the cancellation of lam_bar + h when the roots are widely separated.
    """
    x = np.asarray(xi, dtype=np.float64)
    xa = np.where(x > 0, x, 1.0) ** p.alpha
    xa = np.where(x > 0, xa, 0.0)
    lam_bar = -0.5 * p.mu * xa
    disc = (p.mu * p.mu) * xa * xa - 4.0 * p.gamma * x * x
    h = 0.5 * np.sqrt(disc.astype(np.complex128))
    lam_plus = lam_bar - h
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_minus = np.where(x > 0, p.gamma * x * x / np.where(x > 0, lam_plus, 1.0), 0.0)
    if lam_plus.ndim == 0:
        return complex(lam_plus), complex(lam_minus)
    return lam_plus, lam_minus


def critical_radius(p: PhysParams) -> float:
    """|xi| where the discriminant vanishes: (mu/(2 sqrt(gamma)))^{1/(1-alpha)}.

    Infinite for alpha = 1 with mu^2 > 4 gamma (all modes real) and zero
    with mu^2 < 4 gamma (all modes oscillatory); those cases are handled
    by classify_regime directly.
    """
    ratio = p.mu / (2.0 * p.sound_speed)
    if p.alpha == 1.0:
        return np.inf if ratio > 1.0 else 0.0
    return float(ratio ** (1.0 / (1.0 - p.alpha)))


def classify_regime(xi, p: PhysParams):
    """Regime tag per mode, with a 1e-9 relative band flagged Critical.

    Compares |xi|^{1-alpha} against mu/(2 sqrt(gamma)); for alpha = 1 the
    left side is identically 1 so the tag follows the sign of
    mu^2 - 4 gamma for every mode.
    """
    x = np.asarray(xi, dtype=np.float64)
    threshold = p.mu / (2.0 * p.sound_speed)
    expo = 1.0 - p.alpha
    with np.errstate(divide="ignore"):
        lhs = np.where(x > 0, x, 1.0) ** expo
    if expo > 0:
        lhs = np.where(x > 0, lhs, 0.0)
    out = np.where(
        lhs < threshold * (1.0 - _REGIME_TOL),
        Regime.LOW_FREQUENCY,
        np.where(lhs > threshold * (1.0 + _REGIME_TOL),
                 Regime.HIGH_FREQUENCY, Regime.CRITICAL),
    )
    if out.ndim == 0:
        return out.item()
    return out


def green_matrix(t: float, xi: float, p: PhysParams) -> GreenSample:
    """G(t, xi) at a single (t, |xi|) with eigenvalues and regime tag."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    g11, g12, g21, g22 = (c.item() for c in green_entries(t, xi, p.alpha, p.mu, p.gamma))
    lp, lm = eigenvalues(xi, p)
    return GreenSample(float(t), float(xi), g11, g12, g21, g22,
                       complex(lp), complex(lm), classify_regime(xi, p))


def green_matrix_batch(t, xi, p: PhysParams):
    """Entry arrays (G11, G12, G21, G22) over broadcast (t, xi) grids."""
    return green_entries(t, xi, p.alpha, p.mu, p.gamma)


def generator(xi: float, p: PhysParams) -> np.ndarray:
    """The per-mode matrix A = [[0, -|xi|], [gamma |xi|, -mu |xi|^alpha]]."""
    x = float(xi)
    xa = x**p.alpha if x > 0 else 0.0
    return np.array([[0.0, -x], [p.gamma * x, -p.mu * xa]])
