"""Log-log regression of decay exponents against <t> = 1 + t."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FitResult", "loglog_slope", "fit_power"]


@dataclass(frozen=True)
class FitResult:
    quantity: str
    window: tuple
    exponent: float
    stderr: float
    reference: float | None = None
    rel_deviation: float | None = None


def loglog_slope(t, values):
    """OLS slope and standard error of log(values) against log(1 + t)."""
    t = np.asarray(t, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if t.size < 2:
        raise ValueError("need at least two samples to fit a slope")
    if np.any(v <= 0):
        raise ValueError("values must be positive for a log-log fit")
    x = np.log1p(t)
    y = np.log(v)
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    slope = np.sum((x - xbar) * (y - y.mean())) / sxx
    resid = y - (y.mean() + slope * (x - xbar))
    dof = max(t.size - 2, 1)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return float(slope), stderr


def fit_power(t, values, window, quantity="", reference=None) -> FitResult:
    """Fit within [t_min, t_max]; requires >= 8 points and positive values."""
    t = np.asarray(t, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    t_min, t_max = window
    sel = (t >= t_min) & (t <= t_max)
    if np.sum(sel) < 8:
        raise ValueError(
            f"fit window [{t_min}, {t_max}] holds {int(np.sum(sel))} samples, need >= 8")
    if np.any(v[sel] <= 0):
        raise ValueError("values must be positive inside the fit window")
    slope, stderr = loglog_slope(t[sel], v[sel])
    rel = None
    if reference is not None and reference != 0:
        rel = float(abs(slope - reference) / abs(reference))
    return FitResult(quantity, (float(t_min), float(t_max)), slope, stderr,
                     None if reference is None else float(reference), rel)
