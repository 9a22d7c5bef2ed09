"""Run diagnostics: norm records, conserved quantities, energy functionals,
decay-exponent fits against the reference rates, and box-size sensitivity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fitting import FitResult, fit_power, loglog_slope
from .model import SimState, conserved, sigma_transform
from .params import PhysParams
from .rates import rate_table
from .spectral import (
    SpectralField,
    fractional_laplacian,
    gradient,
    lebesgue_norms,
    leray_project,
    riesz_power,
    sobolev_norm,
)

__all__ = [
    "SERIES_COLUMNS",
    "DecaySeries",
    "FitResult",
    "collect_record",
    "energy_defaults",
    "energy_functionals",
    "conserved",
    "fit_decay",
    "reference_exponent",
    "lower_bound_envelope",
    "box_sensitivity",
]

SERIES_COLUMNS = (
    "t", "L1_a", "L2_a", "Linf_a", "L2_u", "Linf_u", "H1_a", "Hs_a", "Hs_u",
    "L2_Pu", "L2_Lam_alpha_u", "L2_grad_a", "mass", "mom_x", "mom_y", "Y", "Ytilde",
)


@dataclass
class DecaySeries:
    """Ordered diagnostic records with immutable run metadata.

    Every record carries the full SERIES_COLUMNS key set and times are
    strictly increasing.
    """

    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, record: dict):
        missing = set(SERIES_COLUMNS) - set(record)
        if missing:
            raise ValueError(f"record misses keys {sorted(missing)}")
        if self.records and record["t"] <= self.records[-1]["t"]:
            raise ValueError("record times must increase strictly")
        self.records.append(dict(record))

    @property
    def times(self) -> np.ndarray:
        return np.array([r["t"] for r in self.records])

    def values(self, key: str) -> np.ndarray:
        if key not in SERIES_COLUMNS:
            raise KeyError(f"unknown series quantity {key!r}")
        return np.array([r[key] for r in self.records])

    def __len__(self):
        return len(self.records)


def energy_defaults(p: PhysParams):
    """Admissible cross-term weights: half their stated ceilings."""
    sg = p.sound_speed
    d1 = 0.5 * min(1.0, p.mu / sg)
    d2 = 0.5 * min(1.0, sg / p.mu, p.mu / sg)
    return d1, d2


def energy_functionals(state: SimState, p: PhysParams, s: float,
                       delta1: float, delta2: float):
    """Cross-term energies (Y, Ytilde) at L2 and order-s levels.

    Y couples ||sigma||^2 + ||u||^2 with delta1 * <u, grad Lambda^{-alpha}
    sigma>; Ytilde couples the order-s pair with the order 2s+alpha-2
    cross term.  Interpolation constants are normalized to one and the
    zero mode of negative-order multipliers is zero.
    """
    if not (0.0 < delta1 <= 1.0 and 0.0 < delta2 <= 1.0):
        raise ValueError("delta weights must lie in (0, 1]")
    sigma = sigma_transform(state.a, p.gamma)
    grid = state.grid
    sg = p.sound_speed

    def cross(order: float) -> float:
        w = gradient(riesz_power(sigma, order))
        return float(grid.volume * np.real(np.sum(state.u.coeffs * np.conj(w.coeffs))))

    sig_l2 = sigma.l2()
    u_l2 = state.u.l2()
    y = ((1.0 + delta1 * p.mu / (2.0 * sg)) * sig_l2**2 + u_l2**2
         + delta1 * cross(-p.alpha))
    ytilde = (sobolev_norm(sigma, s) ** 2 + sobolev_norm(state.u, s) ** 2
              + delta2 * cross(2.0 * s + p.alpha - 2.0))
    return y, ytilde


def collect_record(state: SimState, p: PhysParams, s: float,
                   delta1: float, delta2: float) -> dict:
    """One diagnostics row over the exact SERIES_COLUMNS key set."""
    a, u = state.a, state.u
    l1_a, l2_a, linf_a = lebesgue_norms(a)
    _, l2_u, linf_u = lebesgue_norms(u)
    mass, mom = conserved(state)
    y, ytilde = energy_functionals(state, p, s, delta1, delta2)
    return {
        "t": state.t,
        "L1_a": l1_a,
        "L2_a": l2_a,
        "Linf_a": linf_a,
        "L2_u": l2_u,
        "Linf_u": linf_u,
        "H1_a": sobolev_norm(a, 1.0, homogeneous=False),
        "Hs_a": sobolev_norm(a, s),
        "Hs_u": sobolev_norm(u, s),
        "L2_Pu": leray_project(u).l2(),
        "L2_Lam_alpha_u": fractional_laplacian(u, p.alpha).l2(),
        "L2_grad_a": gradient(a).l2(),
        "mass": mass,
        "mom_x": float(mom[0]),
        "mom_y": float(mom[1]) if mom.size > 1 else 0.0,
        "Y": y,
        "Ytilde": ytilde,
    }


def reference_exponent(quantity: str, p: PhysParams, dim: int | None = None):
    """Reference decay exponent (negative) for a series quantity, or None."""
    tab = rate_table(dim or p.dim, p.alpha)
    mapping = {
        "L2_a": tab.r1,
        "L1_a": None,
        "L2_u": tab.r2,
        "Linf_a": tab.linf,
        "Linf_u": tab.linf,
        "L2_grad_a": tab.grad_rho,
        "L2_Lam_alpha_u": tab.grad_rho,
        "L2_Pu": tab.incompressible if tab.pu_valid else None,
    }
    rate = mapping.get(quantity)
    return None if rate is None else -float(rate)


def fit_decay(series: DecaySeries, quantity: str, window) -> FitResult:
    """Least-squares exponent of log(quantity) vs log(1+t) on the window."""
    p = PhysParams(alpha=series.metadata["alpha"], mu=series.metadata["mu"],
                   gamma=series.metadata["gamma"], dim=series.metadata["dim"])
    ref = reference_exponent(quantity, p)
    return fit_power(series.times, series.values(quantity), window, quantity, ref)


def lower_bound_envelope(series: DecaySeries, quantity: str, rate: float,
                         window=None, floor_frac: float = 0.05,
                         trend_tol: float = 0.02) -> dict:
    """Check value(t) <t>^{rate} keeps a positive floor and no downward trend.

    Requires the run's conserved quantities to be nonzero (the optimality
    hypothesis); a zero-mean or zero-momentum series is reported as a
    hypothesis violation, never as a pass.
    """
    t = series.times
    window = window or (float(t.min()), float(t.max()))
    sel = (t >= window[0]) & (t <= window[1])
    mass0 = series.values("mass")[0]
    mom0 = np.hypot(series.values("mom_x")[0], series.values("mom_y")[0])
    if abs(mass0) < 1e-14 or mom0 < 1e-14:
        return {"precondition_ok": False, "passed": False,
                "reason": "hypothesis violated: zero initial mass or momentum"}
    scaled = series.values(quantity)[sel] * (1.0 + t[sel]) ** rate
    floor = float(np.min(scaled) / np.max(scaled))
    tail = t[sel] >= t[sel][len(t[sel]) // 2]
    slope, _ = loglog_slope(t[sel][tail], scaled[tail])
    passed = floor >= floor_frac and slope >= -trend_tol
    return {"precondition_ok": True, "passed": bool(passed), "floor": floor,
            "trend": float(slope), "quantity": quantity, "rate": float(rate)}


def box_sensitivity(scenario, p: PhysParams, box_lengths, cfg, t_end: float,
                    points: int, quantity: str = "L2_a", seed: int = 0,
                    agree_tol: float = 0.05) -> dict:
    """Repeat one run per box length; the largest time at which fitted
    exponents from consecutive boxes agree within agree_tol bounds the
    trustworthy fit window (the torus stand-in for the whole space).
    """
    from .scenarios import make_initial
    from .stepper import run
    from .spectral import make_grid

    lengths = [float(L) for L in box_lengths]
    if len(lengths) < 2:
        raise ValueError("box sensitivity needs at least two box lengths")
    runs = []
    for L in lengths:
        grid = make_grid(p.dim, points, L)
        initial = make_initial(grid, p, scenario, seed=seed)
        runs.append(run(initial, cfg, p, t_end))

    t_candidates = np.geomspace(t_end / 20.0, t_end, 12)
    trust = None
    per_box = []
    for t_c in t_candidates:
        exps = []
        ok = True
        for series in runs:
            t = series.times
            sel = (t >= t_c / 1.5) & (t <= min(t_c * 1.5, t_end))
            if np.sum(sel) < 8:
                ok = False
                break
            slope, _ = loglog_slope(t[sel], series.values(quantity)[sel])
            exps.append(slope)
        if not ok:
            continue
        per_box.append({"t": float(t_c), "exponents": exps})
        agree = all(
            abs(exps[i] - exps[i + 1]) <= agree_tol * max(abs(exps[i + 1]), 1e-12)
            for i in range(len(exps) - 1)
        )
        if agree:
            trust = float(t_c)
        elif trust is not None:
            # first exit of the initial agreement stretch bounds the window;
            # deep in the box-dominated regime the slopes can re-cross
            break
    return {
        "box_lengths": lengths,
        "quantity": quantity,
        "trustworthy_t": trust,
        "fits": per_box,
        "series": runs,
    }
