"""Complex-valued special functions: error function, Gamma, parabolic cylinder.

erf and Gamma delegate to scipy (Faddeeva / Lanczos implementations) behind
input validation.  The parabolic cylinder function D_nu(z) for complex order
and argument is built here from a Kummer-series branch at small |z| and the
large-|z| asymptotic expansion, with connection formulas covering the sector
the asymptotic series cannot reach.  All functions are pure.
"""

import cmath
import math

import numpy as np
from scipy import special as _sp

EULER_GAMMA = 0.5772156649015329

# Kummer branch kept to |z^2/2| <= ~9 so the even/odd-solution cancellation
# costs at most ~4 digits; beyond that the error-tracked asymptotic branch or
# ODE continuation takes over.
_SERIES_RADIUS = 4.2
# The expansion is valid for |arg z| < 3*pi/4 but its error constant degrades
# toward the boundary (badly so for complex order); cut well inside and reach
# the rest of the plane through the reflection formulas.
_ASYMP_SECTOR = 0.60 * math.pi


class SpecFunError(ValueError):
    """Base class for special-function evaluation failures."""


class DomainError(SpecFunError):
    """Non-finite or otherwise invalid input."""


class PoleError(SpecFunError):
    """Evaluation requested exactly at a pole."""


class ConvergenceError(SpecFunError):
    """Neither series nor asymptotic branch converged; carries diagnostics."""


def _as_complex(z, name="z"):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def erf_complex(z):
    """erf(z) for complex z.  Odd in z; commutes with conjugation."""
    z = _as_complex(z)
    return complex(_sp.erf(z))


def erfc_complex(z):
    """erfc(z) = 1 - erf(z) for complex z."""
    z = _as_complex(z)
    return complex(_sp.erfc(z))


def erfi_complex(z):
    """erfi(z) = -i erf(iz) for complex z."""
    z = _as_complex(z)
    return complex(-1j * _sp.erf(1j * z))


def gamma_complex(z):
    """Gamma(z) for complex z; raises PoleError at non-positive integers."""
    z = _as_complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PoleError(f"Gamma pole at z={z.real:g}")
    return complex(_sp.gamma(z))


def _kummer_m(a, b, x, max_terms=700):
    """Confluent hypergeometric M(a, b, x) by Taylor series.

    Applies the Kummer transformation when Re(x) < 0 so the summed series
    has non-cancelling growth.
    """
    if x.real < 0.0:
        return cmath.exp(x) * _kummer_m(b - a, b, -x, max_terms)
    term = 1.0 + 0.0j
    total = term
    for k in range(max_terms):
        term *= (a + k) * x / ((b + k) * (k + 1))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
    raise ConvergenceError(
        f"Kummer series did not converge: a={a}, b={b}, x={x}, last |term|={abs(term):.3g}"
    )


def _pcf_d_series(nu, z):
    """D_nu(z) from the even/odd Weber solutions, valid for moderate |z|."""
    x = 0.5 * z * z
    m1 = _kummer_m(-0.5 * nu, 0.5, x)
    m2 = _kummer_m(0.5 * (1.0 - nu), 1.5, x)
    # 1/Gamma has no poles; compute via rgamma to stay finite at nu = 0, -1, ...
    c1 = complex(_sp.rgamma(0.5 * (1.0 - nu)))
    c2 = complex(_sp.rgamma(-0.5 * nu))
    pref = cmath.exp(0.5 * nu * math.log(2.0)) * math.sqrt(math.pi) * cmath.exp(-0.25 * z * z)
    return pref * (c1 * m1 - math.sqrt(2.0) * z * c2 * m2)


def _pcf_d_asymptotic(nu, z, max_terms=60):
    """Large-|z| expansion of D_nu(z) with an error estimate.

    Returns (value, abs_error_estimate).  The estimate is the magnitude of
    the smallest retained term (the usual optimal-truncation bound).
    """
    z2inv = 1.0 / (2.0 * z * z)
    term = 1.0 + 0.0j
    total = term
    prev = abs(term)
    best = prev
    for s in range(1, max_terms):
        term *= -(-nu + 2 * s - 2) * (-nu + 2 * s - 1) * z2inv / s
        mag = abs(term)
        if mag > prev:
            break  # tail started diverging; stop at the optimal term
        total += term
        prev = mag
        best = min(best, mag)
        if mag <= 1e-17 * abs(total):
            break
    pref = cmath.exp(-0.25 * z * z) * z ** nu
    return pref * total, abs(pref) * best


def pcf_d(nu, z):
    """Whittaker parabolic cylinder function D_nu(z), complex nu and z.

    Branch selection: Kummer series for |z| <= 6; asymptotic expansion
    (reached directly or through the reflection formulas) where its
    optimal-truncation error is small; numerical continuation of Weber's
    equation along the ray from |z| = 6 in the remaining middle annulus,
    where large complex order makes both expansions inaccurate.
    """
    nu = _as_complex(nu, "nu")
    z = _as_complex(z)
    if abs(nu) >= 50.0:
        raise DomainError(f"|nu| = {abs(nu):.3g} outside supported range (< 50)")
    if abs(z) <= _SERIES_RADIUS:
        return _pcf_d_series(nu, z)
    val, err = _pcf_d_far(nu, z)
    if err <= 1e-10 * max(abs(val), 1e-280):
        return val
    return _pcf_d_ode(nu, z)


def _pcf_d_far(nu, z):
    """Asymptotic evaluation with sector reflection; returns (value, abs err)."""
    phase = cmath.phase(z) if z != 0 else 0.0
    if abs(phase) < _ASYMP_SECTOR:
        return _pcf_d_asymptotic(nu, z)
    rg = complex(_sp.rgamma(-nu))
    sgn = 1.0 if phase > 0 else -1.0
    # D_nu(z) = e^{s nu pi i} D_nu(-z)
    #           + sqrt(2 pi)/Gamma(-nu) e^{s (nu+1) pi i/2} D_{-nu-1}(-s i z)
    c1 = cmath.exp(sgn * 1j * math.pi * nu)
    c2 = math.sqrt(2.0 * math.pi) * rg * cmath.exp(sgn * 0.5j * math.pi * (nu + 1.0))
    v1, e1 = _pcf_d_asymptotic(nu, -z)
    v2, e2 = _pcf_d_asymptotic(-nu - 1.0, -sgn * 1j * z)
    return c1 * v1 + c2 * v2, abs(c1) * e1 + abs(c2) * e2


def _pcf_d_ode(nu, z):
    """Evaluate D_nu(z) by integrating Weber's equation along the ray to z.

    Integration must run in the direction along which the parasitic second
    solution decays relative to D_nu, i.e. from the anchor with the larger
    Re(z^2): outward from the series anchor at |z| = 6 when Re(z^2) < 0,
    inward from a far asymptotic anchor otherwise.
    """
    from . import _ivp

    ray = z / abs(z)
    r_target = abs(z)
    if abs(cmath.phase(z)) < 0.25 * math.pi:
        # D_nu carries only the decaying exponential here, so error seeded at
        # an outer anchor shrinks marching inward; the plain asymptotic
        # series is already excellent at the anchor radius.
        r0 = max(2.0 * r_target, 14.0)
        while True:
            w0, e0 = _pcf_d_asymptotic(nu, r0 * ray)
            w1, e1 = _pcf_d_asymptotic(nu + 1.0, r0 * ray)
            if (e0 <= 1e-12 * max(abs(w0), 1e-280)
                    and e1 <= 1e-12 * max(abs(w1), 1e-280)) or r0 > 200.0:
                break
            r0 *= 1.3
        direction = -1.0
    else:
        # Elsewhere D_nu is (generically) the dominant solution along the
        # ray, so outward integration from the series anchor is stable.
        r0 = _SERIES_RADIUS
        w0 = _pcf_d_series(nu, r0 * ray)
        w1 = _pcf_d_series(nu + 1.0, r0 * ray)
        direction = 1.0
    z0 = r0 * ray
    dw0 = direction * ray * (0.5 * z0 * w0 - w1)  # d/ds with z = ray*(r0 + direction*s)

    def rhs(s, y):
        zz = ray * (r0 + direction * s)
        return np.array([y[1], ray * ray * (0.25 * zz * zz - nu - 0.5) * y[0]], dtype=complex)

    y = _ivp.integrate_complex(rhs, 0.0, abs(r_target - r0),
                               np.array([w0, dw0], dtype=complex),
                               rtol=1e-12, atol=1e-300)
    return complex(y[0])


def pcf_d_pair(nu, z):
    """(D_nu(z), D_nu'(z)) using the derivative recurrence D' = z/2 D - D_{nu+1}."""
    d0 = pcf_d(nu, z)
    d1 = pcf_d(nu + 1.0, z)
    return d0, 0.5 * z * d0 - d1
