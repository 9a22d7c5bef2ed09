"""Reference decay exponents for the alignment system.

All quantities decay like <t>^{-r} with <t> = 1 + t.  The two headline
exponents are

    r1 = N / (2(2-alpha)),   r2 = (N + 2(1-alpha)) / (2(2-alpha))

for alpha in (0,1] (density deviation and velocity in L2), merging into
the single fractional-heat rate r1 = r2 = N/(2 alpha) on (1,2).  The
formulas are plain field arithmetic, so exact inputs (ints, Fractions)
give exact outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["RateTable", "rate_table"]


@dataclass(frozen=True)
class RateTable:
    """Decay exponents for dimension N at order alpha.

    r1, r2            L2 rates of rho-1 and u.
    incompressible    L2 rate of the solenoidal velocity part, N/(2 alpha);
                      sharp only for alpha in [2N/(3N+2), 1] (pu_valid).
    linf              Linf rate of (rho-1, u), N/(2-alpha); alpha <= 1 only.
    grad_rho          L2 rate of grad rho and of Lambda^alpha u,
                      (N+2)/(2(2-alpha)); alpha <= 1 only.
    """

    dim: int
    alpha: object
    r1: object
    r2: object
    incompressible: object
    pu_valid: bool
    linf: object = None
    grad_rho: object = None


def rate_table(dim: int, alpha) -> RateTable:
    """Rate formulas at (N, alpha); alpha may be a Fraction for exactness.

    The open interval (0, 2) is the meaningful range; the closed endpoints
    are accepted and evaluate the formulas as formal limits (alpha = 0 is
    the damped-Euler limit, alpha = 2 the viscous one).
    """
    if dim < 1 or int(dim) != dim:
        raise ValueError(f"dimension must be a positive integer, got {dim}")
    if not 0 <= alpha <= 2:
        raise ValueError(f"alpha must lie in [0, 2], got {alpha}")
    if isinstance(alpha, int):
        alpha = Fraction(alpha)

    incompressible = dim / (2 * alpha) if alpha > 0 else None
    if alpha <= 1:
        r1 = dim / (2 * (2 - alpha))
        r2 = (dim + 2 * (1 - alpha)) / (2 * (2 - alpha))
        linf = dim / (2 - alpha)
        grad_rho = (dim + 2) / (2 * (2 - alpha))
    else:
        r1 = r2 = incompressible
        linf = None
        grad_rho = None

    lo = Fraction(2 * dim, 3 * dim + 2)
    pu_valid = bool(lo <= alpha <= 1)
    return RateTable(dim, alpha, r1, r2, incompressible, pu_valid, linf, grad_rho)
