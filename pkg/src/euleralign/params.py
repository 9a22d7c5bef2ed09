"""Model constants for the alignment hydrodynamics system."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysParams:
    """alpha: dissipation order in (0,1]; mu: alignment strength > 0;
    gamma: adiabatic exponent >= 1; dim: simulation dimension (1 or 2).

    Rate formulas elsewhere accept alpha over the full (0,2) and any
    integer dimension; this type carries the solver-facing constants.
    """

    alpha: float
    mu: float = 1.0
    gamma: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.gamma >= 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")

    @property
    def sound_speed(self) -> float:
        """Linear sound speed sqrt(gamma) at the reference density."""
        return float(self.gamma) ** 0.5
