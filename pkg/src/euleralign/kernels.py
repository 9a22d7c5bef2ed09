"""Hot per-mode kernels: Green-matrix entries and exponential-integrator weights.

Two interchangeable backends implement the same arithmetic:

* a numba ``@njit`` loop backend (default when numba imports), and
* a pure-numpy vectorized fallback.

Selection: set ``EULERALIGN_NO_NUMBA=1`` to force the numpy path; otherwise
numba is used when available.  ``backend()`` reports the active choice and
the test suite runs both paths against each other.

Numerical core.  The per-mode linear operator is

    A = [[0, -x], [g*x, -m*x**a]],   x = |xi|,

with eigenvalues l_pm = lam_bar -+ h, lam_bar = -m*x**a/2,
h = sqrt(m^2 x^{2a} - 4 g x^2)/2 (principal root).  Every matrix function
f(tA) used here reduces to the pair

    mean      (f(t l_+) + f(t l_-))/2
    divided   (f(t l_+) - f(t l_-))/(t l_+ - t l_-)

via f(tA) = mean*I + divided*(tA - t*lam_bar*I).  The naive divided
difference is catastrophic near the double root, so exp uses the exact
rewrite t*exp(t lam_bar)*sinhc(t h) with a series switch for small |t h|,
and the phi1/phi2 weights use either a direct difference (well separated
eigenvalues) or an even Taylor expansion in h around lam_bar whose
derivative ladders are themselves series/recurrence stabilized.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "backend",
    "green_entries",
    "phi1",
    "phi2",
    "etd_entries",
]

# branch thresholds shared by both backends
_Z_SINHC_SERIES = 1e-6   # sinhc/cosh power series below this |z|
_Z_DIRECT = 30.0         # plain exp(t*l_pm) arithmetic above this |z|
_PHI_SERIES = 0.5        # phi1/phi2 power series below this |z|
_W_TAYLOR = 0.5          # divided-difference Taylor below this |h*t|
_ZBAR_SERIES = 12.0      # derivative ladders: series below, recurrence above
_N_PHI_TERMS = 20
_N_DERIV_TERMS = 60
_N_ORDERS = 12           # derivative orders 0..11 (odd ones feed the Taylor)

_FACT_ODD = np.array([1.0, 6.0, 120.0, 5040.0, 362880.0, 39916800.0])


def _use_numba() -> bool:
    if os.environ.get("EULERALIGN_NO_NUMBA"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


_NUMBA = _use_numba()


def backend() -> str:
    """Active kernel backend, 'numba' or 'numpy'."""
    return "numba" if _NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def _green_entries_np(t, x, alpha, mu, gamma):
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    t, x = np.broadcast_arrays(t, x)
    shape = t.shape
    t = t.ravel()
    x = x.ravel()

    xa = np.where(x > 0, x, 1.0) ** alpha
    xa = np.where(x > 0, xa, 0.0)
    lam_bar = -0.5 * mu * xa
    disc = (mu * mu) * xa * xa - 4.0 * gamma * x * x
    h = 0.5 * np.sqrt(disc.astype(np.complex128))
    z = t * h
    az = np.abs(z)

    coshz = np.empty_like(z)
    sinhc = np.empty_like(z)
    small = az < _Z_SINHC_SERIES
    z2 = z[small] * z[small]
    sinhc[small] = 1.0 + z2 / 6.0 + z2 * z2 / 120.0
    coshz[small] = 1.0 + z2 / 2.0 + z2 * z2 / 24.0
    rest = ~small
    sinhc[rest] = np.sinh(z[rest]) / z[rest]
    coshz[rest] = np.cosh(z[rest])

    scale = np.exp(t * lam_bar)
    cc = scale * coshz
    phi = t * scale * sinhc

    big = az >= _Z_DIRECT
    if np.any(big):
        lp = lam_bar[big] - h[big]
        lm = gamma * x[big] * x[big] / lp  # stable slow root via the product
        ep = np.exp(t[big] * lp)
        em = np.exp(t[big] * lm)
        cc[big] = 0.5 * (ep + em)
        phi[big] = (ep - em) / (-2.0 * h[big])

    g11 = cc - lam_bar * phi
    g12 = -x * phi
    g21 = gamma * x * phi
    g22 = cc + lam_bar * phi

    zero = x == 0.0
    g11[zero] = 1.0
    g12[zero] = 0.0
    g21[zero] = 0.0
    g22[zero] = 1.0
    return (g11.reshape(shape), g12.reshape(shape),
            g21.reshape(shape), g22.reshape(shape))


def _phi_np(ell, z):
    """phi_1 or phi_2 of a complex array, series/direct switched."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    small = np.abs(z) < _PHI_SERIES
    zs = z[small]
    acc = np.zeros_like(zs)
    term = np.ones_like(zs)  # z^k
    for k in range(_N_PHI_TERMS):
        acc = acc + term / _inv_factorial_den(ell, k)
        term = term * zs
    out[small] = acc
    zr = z[~small]
    ez = np.exp(zr)
    if ell == 1:
        out[~small] = (ez - 1.0) / zr
    else:
        out[~small] = (ez - 1.0 - zr) / (zr * zr)
    return out


def _inv_factorial_den(ell, k):
    # phi_1 series coefficient denominator (k+1)!, phi_2 uses (k+2)!
    from math import factorial

    return float(factorial(k + ell))


def _phi_derivs_np(ell, z):
    """Derivatives phi_ell^(m)(z) for m = 0..11; z is a flat complex array."""
    out = np.zeros((_N_ORDERS,) + z.shape, dtype=np.complex128)
    ser = np.abs(z) < _ZBAR_SERIES
    zs = z[ser]
    if zs.size:
        acc = np.zeros((_N_ORDERS, zs.size), dtype=np.complex128)
        term = np.ones_like(zs)  # z^i / i!
        for i in range(_N_DERIV_TERMS):
            for m in range(_N_ORDERS):
                if ell == 1:
                    acc[m] += term / (i + m + 1.0)
                else:
                    acc[m] += term / ((i + m + 1.0) * (i + m + 2.0))
            term = term * zs / (i + 1.0)
        out[:, ser] = acc
    zr = z[~ser]
    if zr.size:
        ez = np.exp(zr)
        rows = np.zeros((_N_ORDERS, zr.size), dtype=np.complex128)
        if ell == 1:
            rows[0] = (ez - 1.0) / zr
            for m in range(1, _N_ORDERS):
                rows[m] = (ez - m * rows[m - 1]) / zr
        else:
            z2 = zr * zr
            rows[0] = (ez - 1.0 - zr) / z2
            rows[1] = (ez - 1.0 - 2.0 * zr * rows[0]) / z2
            for m in range(2, _N_ORDERS):
                rows[m] = (ez - 2.0 * m * zr * rows[m - 1]
                           - m * (m - 1.0) * rows[m - 2]) / z2
        out[:, ~ser] = rows
    return out


def _phi_dd_np(ell, zbar, w):
    """Divided difference (phi(zbar+w) - phi(zbar-w)) / (2w), stabilized."""
    out = np.zeros_like(zbar)
    taylor = np.abs(w) < _W_TAYLOR
    direct = ~taylor
    if np.any(direct):
        zd, wd = zbar[direct], w[direct]
        out[direct] = (_phi_np(ell, zd + wd) - _phi_np(ell, zd - wd)) / (2.0 * wd)
    if np.any(taylor):
        zs, ws = zbar[taylor], w[taylor]
        derivs = _phi_derivs_np(ell, zs)
        acc = np.zeros_like(zs)
        w2 = ws * ws
        wp = np.ones_like(ws)
        for j in range(6):
            acc = acc + derivs[2 * j + 1] * wp / _FACT_ODD[j]
            wp = wp * w2
        out[taylor] = acc
    return out


def _etd_entries_np(dt, x, alpha, mu, gamma):
    x = np.asarray(x, dtype=np.float64).ravel()
    g11, g12, g21, g22 = _green_entries_np(np.full_like(x, dt), x, alpha, mu, gamma)

    xa = np.where(x > 0, x, 1.0) ** alpha
    xa = np.where(x > 0, xa, 0.0)
    lam_bar = -0.5 * mu * xa
    disc = (mu * mu) * xa * xa - 4.0 * gamma * x * x
    h = 0.5 * np.sqrt(disc.astype(np.complex128))
    zbar = (dt * lam_bar).astype(np.complex128)
    w = dt * h

    ps = []
    for ell in (1, 2):
        mean = 0.5 * (_phi_np(ell, zbar + w) + _phi_np(ell, zbar - w))
        dd = _phi_dd_np(ell, zbar, w)
        p11 = mean - dd * dt * lam_bar
        p12 = -dd * dt * x
        p21 = dd * dt * gamma * x
        p22 = mean + dd * dt * lam_bar
        zero = x == 0.0
        diag = 1.0 if ell == 1 else 0.5
        p11[zero] = diag
        p22[zero] = diag
        p12[zero] = 0.0
        p21[zero] = 0.0
        ps.extend([p11, p12, p21, p22])

    return (g11, g12, g21, g22) + tuple(ps)


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if _NUMBA:
    import cmath

    from numba import njit, prange

    @njit(cache=True)
    def _green_scalar_nb(t, x, alpha, mu, gamma):
        if x == 0.0:
            return 1.0 + 0j, 0j, 0j, 1.0 + 0j
        xa = x**alpha
        lam_bar = -0.5 * mu * xa
        disc = (mu * mu) * xa * xa - 4.0 * gamma * x * x
        h = 0.5 * cmath.sqrt(complex(disc, 0.0))
        z = t * h
        az = abs(z)
        if az >= _Z_DIRECT:
            lp = lam_bar - h
            lm = gamma * x * x / lp  # stable slow root via the product
            ep = cmath.exp(t * lp)
            em = cmath.exp(t * lm)
            cc = 0.5 * (ep + em)
            phi = (ep - em) / (-2.0 * h)
        else:
            if az < _Z_SINHC_SERIES:
                z2 = z * z
                sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0
                coshz = 1.0 + z2 / 2.0 + z2 * z2 / 24.0
            else:
                sinhc = cmath.sinh(z) / z
                coshz = cmath.cosh(z)
            scale = np.exp(t * lam_bar)
            cc = scale * coshz
            phi = t * scale * sinhc
        g11 = cc - lam_bar * phi
        g12 = -x * phi
        g21 = gamma * x * phi
        g22 = cc + lam_bar * phi
        return g11, g12, g21, g22

    @njit(cache=True, parallel=True)
    def _green_entries_nb(t, x, alpha, mu, gamma, g11, g12, g21, g22):
        for i in prange(t.size):
            a, b, c, d = _green_scalar_nb(t[i], x[i], alpha, mu, gamma)
            g11[i] = a
            g12[i] = b
            g21[i] = c
            g22[i] = d

    @njit(cache=True)
    def _phi_scalar_nb(ell, z):
        if abs(z) < _PHI_SERIES:
            acc = 0j
            term = 1.0 + 0j  # z^k
            den = 1.0        # (k + ell)!
            for k in range(ell):
                den *= k + 1.0
            for k in range(_N_PHI_TERMS):
                acc += term / den
                term = term * z
                den *= k + ell + 1.0
            return acc
        ez = cmath.exp(z)
        if ell == 1:
            return (ez - 1.0) / z
        return (ez - 1.0 - z) / (z * z)

    @njit(cache=True)
    def _phi_derivs_scalar_nb(ell, z, rows):
        if abs(z) < _ZBAR_SERIES:
            for m in range(_N_ORDERS):
                rows[m] = 0j
            term = 1.0 + 0j
            for i in range(_N_DERIV_TERMS):
                for m in range(_N_ORDERS):
                    if ell == 1:
                        rows[m] += term / (i + m + 1.0)
                    else:
                        rows[m] += term / ((i + m + 1.0) * (i + m + 2.0))
                term = term * z / (i + 1.0)
        else:
            ez = cmath.exp(z)
            if ell == 1:
                rows[0] = (ez - 1.0) / z
                for m in range(1, _N_ORDERS):
                    rows[m] = (ez - m * rows[m - 1]) / z
            else:
                z2 = z * z
                rows[0] = (ez - 1.0 - z) / z2
                rows[1] = (ez - 1.0 - 2.0 * z * rows[0]) / z2
                for m in range(2, _N_ORDERS):
                    rows[m] = (ez - 2.0 * m * z * rows[m - 1]
                               - m * (m - 1.0) * rows[m - 2]) / z2

    @njit(cache=True)
    def _phi_dd_scalar_nb(ell, zbar, w, rows):
        if abs(w) >= _W_TAYLOR:
            return (_phi_scalar_nb(ell, zbar + w)
                    - _phi_scalar_nb(ell, zbar - w)) / (2.0 * w)
        _phi_derivs_scalar_nb(ell, zbar, rows)
        acc = 0j
        w2 = w * w
        wp = 1.0 + 0j
        fact = 1.0
        for j in range(6):
            acc += rows[2 * j + 1] * wp / fact
            wp = wp * w2
            fact *= (2.0 * j + 2.0) * (2.0 * j + 3.0)
        return acc

    @njit(cache=True, parallel=True)
    def _phi_array_nb(ell, z, out):
        for i in prange(z.size):
            out[i] = _phi_scalar_nb(ell, z[i])

    @njit(cache=True, parallel=True)
    def _etd_entries_nb(dt, x, alpha, mu, gamma, out):
        for i in prange(x.size):
            rows = np.zeros(_N_ORDERS, dtype=np.complex128)
            xi = x[i]
            a, b, c, d = _green_scalar_nb(dt, xi, alpha, mu, gamma)
            out[0, i] = a
            out[1, i] = b
            out[2, i] = c
            out[3, i] = d
            if xi == 0.0:
                out[4, i] = 1.0
                out[5, i] = 0.0
                out[6, i] = 0.0
                out[7, i] = 1.0
                out[8, i] = 0.5
                out[9, i] = 0.0
                out[10, i] = 0.0
                out[11, i] = 0.5
                continue
            xa = xi**alpha
            lam_bar = -0.5 * mu * xa
            disc = (mu * mu) * xa * xa - 4.0 * gamma * xi * xi
            h = 0.5 * cmath.sqrt(complex(disc, 0.0))
            zbar = complex(dt * lam_bar, 0.0)
            w = dt * h
            for ell in range(1, 3):
                mean = 0.5 * (_phi_scalar_nb(ell, zbar + w)
                              + _phi_scalar_nb(ell, zbar - w))
                dd = _phi_dd_scalar_nb(ell, zbar, w, rows)
                base = 4 * ell
                out[base + 0, i] = mean - dd * dt * lam_bar
                out[base + 1, i] = -dd * dt * xi
                out[base + 2, i] = dd * dt * gamma * xi
                out[base + 3, i] = mean + dd * dt * lam_bar


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------

def green_entries(t, xi, alpha: float, mu: float, gamma: float):
    """Entries (G11, G12, G21, G22) of exp(t*A) per mode; broadcasts t and xi."""
    if _NUMBA:
        t = np.asarray(t, dtype=np.float64)
        xi = np.asarray(xi, dtype=np.float64)
        t, xi = np.broadcast_arrays(t, xi)
        shape = t.shape
        tf = np.ascontiguousarray(t.ravel())
        xf = np.ascontiguousarray(xi.ravel())
        g11 = np.empty(tf.size, dtype=np.complex128)
        g12 = np.empty_like(g11)
        g21 = np.empty_like(g11)
        g22 = np.empty_like(g11)
        _green_entries_nb(tf, xf, float(alpha), float(mu), float(gamma),
                          g11, g12, g21, g22)
        return (g11.reshape(shape), g12.reshape(shape),
                g21.reshape(shape), g22.reshape(shape))
    return _green_entries_np(t, xi, float(alpha), float(mu), float(gamma))


def _phi_dispatch(ell, z):
    z = np.asarray(z, dtype=np.complex128)
    if _NUMBA:
        shape = z.shape
        zf = np.ascontiguousarray(z.ravel())
        out = np.empty_like(zf)
        _phi_array_nb(ell, zf, out)
        return out.reshape(shape)
    return _phi_np(ell, z)


def phi1(z):
    """phi_1(z) = (e^z - 1)/z, entire; elementwise on arrays."""
    return _phi_dispatch(1, z)


def phi2(z):
    """phi_2(z) = (e^z - 1 - z)/z^2, entire; elementwise on arrays."""
    return _phi_dispatch(2, z)


def etd_entries(dt: float, xi, alpha: float, mu: float, gamma: float):
    """Matrix functions for one exponential step of the compressible pair.

    Returns 12 flat complex arrays over xi:
    exp(dt A) entries (4), phi1(dt A) entries (4), phi2(dt A) entries (4).
    """
    xi = np.asarray(xi, dtype=np.float64)
    shape = xi.shape
    xf = np.ascontiguousarray(xi.ravel())
    if _NUMBA:
        out = np.empty((12, xf.size), dtype=np.complex128)
        _etd_entries_nb(float(dt), xf, float(alpha), float(mu), float(gamma), out)
        return tuple(out[i].reshape(shape) for i in range(12))
    parts = _etd_entries_np(float(dt), xf, float(alpha), float(mu), float(gamma))
    return tuple(p.reshape(shape) for p in parts)
