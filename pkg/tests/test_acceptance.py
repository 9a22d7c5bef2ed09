"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with `pytest -v tests/test_acceptance.py -s` to see the PASS lines.
The nonlinear criteria are marked slow; they are part of the gate and run
by default (deselect with `-m "not slow"` during development only).
"""

from fractions import Fraction

import numpy as np
import pytest

from euleralign.audits import (
    convolution_inequality_check,
    gaussian_spectrum,
    green_channel_series,
    heat_decay_check,
    lower_bound_audit,
    pointwise_bound_audit,
)
from euleralign.diagnostics import box_sensitivity
from euleralign.fitting import fit_power
from euleralign.green import critical_radius, generator, green_matrix
from euleralign.model import conserved
from euleralign.params import PhysParams
from euleralign.rates import rate_table
from euleralign.scenarios import make_initial, preset
from euleralign.spectral import make_grid
from euleralign.stepper import Stepper, StepperConfig, run

from test_stepper import linearization_gap


def report(name: str, detail: str):
    print(f"[PASS] {name}: {detail}")


# ---------------------------------------------------------------------------
# criterion 1: fundamental-matrix exactness
# ---------------------------------------------------------------------------

def test_green_matrix_exactness():
    rng = np.random.default_rng(314159)
    n_samples = 1200
    worst_semigroup = 0.0
    orders = []
    regimes = set()
    for k in range(n_samples):
        alpha = 1.0 if k % 7 == 0 else rng.uniform(0.05, 1.0)
        mu = rng.uniform(0.3, 3.0)
        gamma = rng.uniform(1.0, 4.0)
        p = PhysParams(alpha=alpha, mu=mu, gamma=gamma)
        rstar = critical_radius(p)
        if np.isfinite(rstar) and rstar > 0:
            xi = rstar * (rng.uniform(0.05, 0.8), 1.0, rng.uniform(1.3, 8.0))[k % 3]
        else:
            xi = 10.0 ** rng.uniform(-3, 1)
        sample = green_matrix(0.0, xi, p)
        regimes.add(sample.regime)

        scale = max(mu * xi**alpha, np.sqrt(gamma) * xi, 1e-6)
        t = rng.uniform(0.0, min(30.0, 120.0 / scale))
        s = rng.uniform(0.0, min(30.0, 120.0 / scale))
        gt = green_matrix(t, xi, p).matrix()
        gs = green_matrix(s, xi, p).matrix()
        gts = green_matrix(t + s, xi, p).matrix()
        norm = max(np.linalg.norm(gts), 1e-30)
        worst_semigroup = max(worst_semigroup,
                              np.linalg.norm(gts - gt @ gs) / norm)
        assert np.linalg.norm(gts - gt @ gs) <= 1e-10 * norm

        if k % 3 == 0:
            a = generator(xi, p)
            tt = rng.uniform(0.1, 2.0)
            h0 = 1e-2 / (1.0 + np.linalg.norm(a))
            errs = []
            for h in (h0, h0 / 2.0):
                diff = (green_matrix(tt + h, xi, p).matrix()
                        - green_matrix(tt - h, xi, p).matrix()) / (2.0 * h)
                errs.append(np.linalg.norm(diff - a @ green_matrix(tt, xi, p).matrix()))
            if errs[1] > 1e-12:
                orders.append(np.log2(errs[0] / errs[1]))

    assert len(regimes) == 3
    order = float(np.median(orders))
    assert order >= 1.9
    report("green-matrix exactness",
           f"{n_samples} samples, worst semigroup defect {worst_semigroup:.2e} "
           f"(tol 1e-10), generator order {order:.2f} (>= 1.9)")


# ---------------------------------------------------------------------------
# criterion 2: pointwise envelope audit
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, 1.0])
def test_pointwise_envelope_audit(alpha):
    p = PhysParams(alpha=alpha, mu=1.0, gamma=1.0)
    ts = np.geomspace(1e-2, 1e3, 100)
    xs = np.geomspace(1e-3, 50.0, 100)
    rep = pointwise_bound_audit(p, ts, xs)
    assert rep.samples >= 10_000
    assert rep.identity_max_rel <= 1e-12
    assert rep.passed, [c for c in rep.cases if not c["stable"]]
    report(f"pointwise envelope audit (alpha={alpha})",
           f"{rep.samples} samples, identity residual {rep.identity_max_rel:.1e}, "
           f"{len(rep.cases)} envelopes refinement-stable")


# ---------------------------------------------------------------------------
# criterion 3: linear decay exponents of the two channels
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75, 1.0])
def test_linear_decay_exponents(alpha):
    p = PhysParams(alpha=alpha, mu=1.0, gamma=1.0, dim=2)
    ts = np.geomspace(1e2, 1e5, 19)
    series = green_channel_series(gaussian_spectrum(), 0.0, ts, p, 2)
    dim = 2
    ref11 = -dim / (2.0 * (2.0 - alpha))
    ref21 = -(dim + 2.0 * (1.0 - alpha)) / (2.0 * (2.0 - alpha))
    fit11 = fit_power(ts, series["G11"]["L2"], (1e2, 1e5), "G11", ref11)
    fit21 = fit_power(ts, series["G21"]["L2"], (1e2, 1e5), "G21", ref21)
    assert fit11.rel_deviation <= 0.03
    assert fit21.rel_deviation <= 0.03
    report(f"linear decay rates (alpha={alpha})",
           f"G11 {fit11.exponent:+.4f} vs {ref11:+.4f} ({fit11.rel_deviation:.2%}), "
           f"G21 {fit21.exponent:+.4f} vs {ref21:+.4f} ({fit21.rel_deviation:.2%})")


# ---------------------------------------------------------------------------
# criterion 4: fractional heat channel
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_fractional_heat_channel(alpha):
    ts = np.geomspace(1e2, 1e5, 19)
    rep = heat_decay_check(1.0, alpha, 0.0, gaussian_spectrum(), ts, dim=2)
    ref = -2.0 / (2.0 * alpha)
    assert rep.fit_l2.rel_deviation <= 0.03
    report(f"fractional heat channel (alpha={alpha})",
           f"exponent {rep.fit_l2.exponent:+.4f} vs {ref:+.4f} "
           f"({rep.fit_l2.rel_deviation:.2%})")


# ---------------------------------------------------------------------------
# criterion 5: linear-level lower bounds
# ---------------------------------------------------------------------------

def test_lower_bound_scaled_envelope():
    p = PhysParams(alpha=0.5, mu=1.0, gamma=1.0, dim=2)
    ts = np.geomspace(1.0, 1e5, 21)
    rep = lower_bound_audit(gaussian_spectrum(), ts, p, 2)
    assert rep.precondition_ok and rep.passed
    ring = lambda r: np.asarray(r) ** 2 * np.exp(-np.asarray(r) ** 2)
    rejected = lower_bound_audit(ring, ts, p, 2)
    assert not rejected.precondition_ok and not rejected.passed
    report("lower bounds (linear level)",
           f"floors {rep.floor_g11:.3f}/{rep.floor_g21:.3f} above 0.05, trends "
           f"{rep.trend_g11:+.4f}/{rep.trend_g21:+.4f}; zero-mean data rejected")


# ---------------------------------------------------------------------------
# criterion 6: convolution inequality cases
# ---------------------------------------------------------------------------

def test_convolution_inequality_cases():
    ts = np.geomspace(1e2, 1e5, 15)
    sup = convolution_inequality_check(2.0, 0.5, ts)
    log = convolution_inequality_check(1.0, 0.5, ts)
    # the subcritical constant converges slowly; its window sits deeper
    sub = convolution_inequality_check(0.3, 0.4, np.geomspace(1e3, 1e6, 15))
    assert sup.passed and sup.case == "sup"
    assert log.passed and log.case == "log"
    assert sub.passed and sub.case == "sub"
    report("convolution inequality",
           f"sup {sup.fit.exponent:+.3f} vs -0.5; "
           f"log envelope ratio {log.envelope_ratio:.2f}; "
           f"sub {sub.fit.exponent:+.3f} vs +0.3")


# ---------------------------------------------------------------------------
# criterion 7: nonlinear solver validation
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_nonlinear_linearization_consistency():
    p = PhysParams(alpha=0.5, mu=1.0, gamma=1.0, dim=2)
    grid = make_grid(2, 128, 50.0)
    gaps = [linearization_gap(grid, p, eps, t_end=10.0, dt=0.05, seed=11)
            for eps in (1e-2, 5e-3)]
    ratio = gaps[0] / gaps[1]
    assert 1.8 <= ratio <= 2.2
    report("linearization consistency (128^2, t=10)",
           f"relative gaps {gaps[0]:.3e} -> {gaps[1]:.3e}, ratio {ratio:.3f} in 2.0 +- 0.2")


@pytest.mark.slow
def test_nonlinear_conservation():
    p = PhysParams(alpha=0.5, mu=1.0, gamma=1.4, dim=2)
    grid = make_grid(2, 64, 50.0)
    state = make_initial(grid, p, preset("lower-bound", amplitude=0.01), seed=1)
    mass0, mom0 = conserved(state)
    series = run(state, StepperConfig(output_stride=50), p, 100.0)
    final = series.records[-1]
    mass_drift = abs(final["mass"] - mass0)
    mom_drift = np.hypot(final["mom_x"] - mom0[0], final["mom_y"] - mom0[1])
    rel = mom_drift / np.hypot(*mom0)
    assert mass_drift <= 1e-12
    assert rel <= 1e-8
    report("conservation over t=100",
           f"mass drift {mass_drift:.1e} (tol 1e-12), momentum drift {rel:.2e} rel (tol 1e-8)")


@pytest.mark.slow
def test_nonlinear_temporal_order():
    p = PhysParams(alpha=0.5, mu=1.0, gamma=1.4, dim=2)
    grid = make_grid(2, 48, 25.0)
    state = make_initial(grid, p, preset("gaussian", amplitude=0.02), seed=7)
    t_end = 2.0
    states = []
    for dt in (0.2, 0.1, 0.05):
        stepper = Stepper(grid, p, StepperConfig(dt=dt), dt)
        cur = state
        for _ in range(int(round(t_end / dt))):
            cur = stepper.step(cur)
        states.append(cur)
    e1 = np.sqrt(np.sum(np.abs(states[0].a.coeffs - states[1].a.coeffs) ** 2)
                 + np.sum(np.abs(states[0].u.coeffs - states[1].u.coeffs) ** 2))
    e2 = np.sqrt(np.sum(np.abs(states[1].a.coeffs - states[2].a.coeffs) ** 2)
                 + np.sum(np.abs(states[1].u.coeffs - states[2].u.coeffs) ** 2))
    order = np.log2(e1 / e2)
    assert order >= 1.9
    report("ETD-RK2 self-convergence", f"observed order {order:.2f} (>= 1.9)")


# ---------------------------------------------------------------------------
# criterion 8: nonlinear decay at desk scale
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_nonlinear_decay_rates():
    """Coarse desk-scale check: full asymptotics are not reachable on a
    finite box; the sharp verification lives in the linear-level quadrature
    criteria above.  At 256^2 the density channel's local exponents differ
    between boxes by more than 5% throughout (few modes per dominant shell),
    so the trustworthy window is validated on the velocity channel and both
    fits are taken over it, on both boxes."""
    p = PhysParams(alpha=0.5, mu=1.0, gamma=1.0, dim=2)
    scenario = preset("zero-mean", amplitude=1e-2, width=4.0)
    cfg = StepperConfig(output_stride=2)
    rep = box_sensitivity(scenario, p, [200.0, 300.0], cfg, 120.0, 256,
                          quantity="L2_u", seed=11)
    t_trust = rep["trustworthy_t"]
    assert t_trust is not None and t_trust > 15.0, rep["fits"]
    window = (8.0, t_trust)  # transient bound ~ bump_width^(2-alpha)
    lines = []
    for series, L in zip(rep["series"], rep["box_lengths"]):
        fit_a = fit_power(series.times, series.values("L2_a"), window, "L2_a", -2.0 / 3.0)
        fit_u = fit_power(series.times, series.values("L2_u"), window, "L2_u", -1.0)
        assert fit_a.rel_deviation <= 0.15, (L, fit_a)
        assert fit_u.rel_deviation <= 0.15, (L, fit_u)
        lines.append(f"L={L:.0f}: a {fit_a.exponent:+.3f} ({fit_a.rel_deviation:.0%}), "
                     f"u {fit_u.exponent:+.3f} ({fit_u.rel_deviation:.0%})")
    report("nonlinear decay (256^2, L=200/300)",
           f"window [8, {t_trust:.0f}] vs (-2/3, -1) tol 15%; " + "; ".join(lines))


# ---------------------------------------------------------------------------
# criterion 9: rate-table spot values, exact arithmetic
# ---------------------------------------------------------------------------

def test_rate_table_spot_values():
    damped = rate_table(3, Fraction(0))
    assert damped.r1 == Fraction(3, 4)
    assert damped.r2 == Fraction(5, 4)
    viscous = rate_table(3, Fraction(2))
    assert viscous.r1 == viscous.r2 == Fraction(3, 4)
    junction = rate_table(2, Fraction(1))
    assert junction.r1 == junction.r2 == Fraction(1)
    report("rate-table spot values",
           "N=3: r1 -> 3/4, r2 -> 5/4 at alpha -> 0; N/(2 alpha) -> 3/4 at alpha -> 2 "
           "(exact rationals)")
