"""Coherent single-excitation TLS-qubit dynamics for the trapezoidal pulse.

State convention: amplitudes (qubit excited, TLS excited) with Hamiltonian
[[D/2, lam], [lam, -D/2]] where D(t) = f_q(t) - omega_tls.  Every segment
propagator is an SU(2) matrix [[u11, -u21*], [u21, u11*]]; u21 is the
qubit -> TLS transfer amplitude.

The linear-ramp propagator is assembled from parabolic cylinder functions:
the transformed amplitude equations are Weber equations with index
-i lam^2/v, and the fundamental pair D_n(+-zeta), zeta = e^{i pi/4} D/sqrt(v),
gives the exact transfer matrix between the endpoint gaps.  A direct
time-stepped branch covers extreme indices (|lam^2/v| large) where the
special-function route leaves its supported range.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _ivp
from .specfun import pcf_d

__all__ = [
    "TwoLevelUnitary",
    "RampSpec",
    "ramp_unitary",
    "plateau_unitary",
    "p_rec",
    "p_lzr",
    "p_lzr_many",
    "lz_transition_estimate",
    "ramp_phase_shift",
    "ramp_phase_threshold",
    "compose",
]

_PCF_INDEX_LIMIT = 40.0  # |lam^2/v| beyond this uses the time-stepped branch


@dataclass(frozen=True)
class TwoLevelUnitary:
    """SU(2) propagator stored as (u11, u21); u12 = -u21*, u22 = u11*."""

    u11: complex
    u21: complex
    residual: float = 0.0  # |norm - 1| before re-normalization

    def matrix(self):
        return np.array([[self.u11, -np.conj(self.u21)],
                         [self.u21, np.conj(self.u11)]], dtype=complex)

    @property
    def transfer_prob(self):
        return abs(self.u21) ** 2


def _normalized(u11, u21):
    norm = math.sqrt(abs(u11) ** 2 + abs(u21) ** 2)
    if norm == 0.0:
        raise ValueError("degenerate propagator")
    return TwoLevelUnitary(u11 / norm, u21 / norm, residual=abs(norm - 1.0))


def compose(outer, inner):
    """Matrix product outer @ inner within the SU(2) parameterization."""
    a = outer.u11 * inner.u11 - np.conj(outer.u21) * inner.u21
    b = outer.u21 * inner.u11 + np.conj(outer.u11) * inner.u21
    return TwoLevelUnitary(a, b, residual=max(outer.residual, inner.residual))


@dataclass(frozen=True)
class RampSpec:
    """Linear gap sweep delta0 -> delta1 at rate v (rad/ns^2), coupling lam."""

    delta0: float
    delta1: float
    v: float
    lam: float

    def __post_init__(self):
        if self.v == 0.0:
            raise ValueError("sweep velocity must be non-zero")
        if (self.delta1 - self.delta0) * self.v < 0.0:
            raise ValueError("sign(v) must match sign(delta1 - delta0)")
        if self.lam < 0.0:
            raise ValueError("coupling must be non-negative")

    @property
    def duration(self):
        return (self.delta1 - self.delta0) / self.v


def _ramp_unitary_pcf(delta0, delta1, v, lam):
    """Exact propagator for v > 0 via the Weber-equation fundamental pair."""
    kappa = lam * lam / v
    n = -1j * kappa
    sqrt_v = math.sqrt(v)
    beta = (lam / sqrt_v) * cmath.exp(0.25j * math.pi)
    z0 = cmath.exp(0.25j * math.pi) * delta0 / sqrt_v
    z1 = cmath.exp(0.25j * math.pi) * delta1 / sqrt_v

    def psi_matrix(z):
        return np.array(
            [[pcf_d(n, z), pcf_d(n, -z)],
             [beta * pcf_d(n - 1.0, z), -beta * pcf_d(n - 1.0, -z)]],
            dtype=complex)

    m1 = psi_matrix(z1)
    m0 = psi_matrix(z0)
    det0 = m0[0, 0] * m0[1, 1] - m0[0, 1] * m0[1, 0]
    inv0 = np.array([[m0[1, 1], -m0[0, 1]], [-m0[1, 0], m0[0, 0]]],
                    dtype=complex) / det0
    u = m1 @ inv0
    # project onto SU(2): average the two redundant parameterizations
    a = 0.5 * (u[0, 0] + np.conj(u[1, 1]))
    b = 0.5 * (u[1, 0] - np.conj(u[0, 1]))
    return _normalized(a, b)


def _ramp_unitary_stepped(delta0, delta1, v, lam, rtol=1e-12):
    """Direct integration of the two-level Schrodinger equation over the ramp."""
    t_ramp = (delta1 - delta0) / v

    def rhs(t, y):
        d = delta0 + v * t
        return np.array([-1j * (0.5 * d * y[0] + lam * y[1]),
                         -1j * (lam * y[0] - 0.5 * d * y[1])], dtype=complex)

    rate = max(abs(delta0), abs(delta1)) + lam + 1.0
    col0 = _ivp.integrate_complex(rhs, 0.0, t_ramp, np.array([1.0, 0.0], dtype=complex),
                                  rtol=rtol, atol=1e-14, first_step=min(0.1, 0.5 / rate))
    a = 0.5 * (col0[0] + col0[0])  # u11 from first column
    b = col0[1]
    return _normalized(a, b)


def ramp_unitary(spec):
    """Propagator of a linear gap sweep; exact up to special-function accuracy."""
    if spec.lam == 0.0:
        theta = 0.5 * (spec.delta0 + spec.delta1) * spec.duration
        return TwoLevelUnitary(cmath.exp(-0.5j * theta), 0.0)
    if spec.v < 0.0:
        # Conjugating the Schrodinger equation and flipping the z axis maps a
        # downward sweep onto the upward sweep of the negated gaps.
        u = ramp_unitary(RampSpec(-spec.delta0, -spec.delta1, -spec.v, spec.lam))
        return TwoLevelUnitary(np.conj(u.u11), -np.conj(u.u21), residual=u.residual)
    kappa = spec.lam ** 2 / spec.v
    if kappa > _PCF_INDEX_LIMIT:
        return _ramp_unitary_stepped(spec.delta0, spec.delta1, spec.v, spec.lam)
    return _ramp_unitary_pcf(spec.delta0, spec.delta1, spec.v, spec.lam)


def plateau_unitary(delta1, lam, t_p):
    """exp(-i H t_p) for the static gap Hamiltonian [[d/2, lam], [lam, -d/2]]."""
    if t_p < 0.0:
        raise ValueError("t_p must be non-negative")
    omega = math.sqrt(delta1 * delta1 + 4.0 * lam * lam)
    if omega == 0.0:
        return TwoLevelUnitary(1.0 + 0.0j, 0.0j)
    half = 0.5 * omega * t_p
    s = math.sin(half) / omega
    u11 = math.cos(half) - 1j * delta1 * s
    u21 = -2j * lam * s
    return TwoLevelUnitary(u11, u21)


def p_rec(delta1, lam, t_p):
    """Rectangular-pulse transfer probability (plateau-only closed form)."""
    omega_sq = 4.0 * lam * lam + delta1 * delta1
    if omega_sq == 0.0:
        return 0.0
    return (4.0 * lam * lam / omega_sq) * math.sin(0.5 * t_p * math.sqrt(omega_sq)) ** 2


def _segment_unitaries(traj, lam, omega_tls):
    delta0 = traj.f_idle - omega_tls
    delta1 = traj.f_pl - omega_tls
    if traj.eps_m == 0.0:
        u1 = plateau_unitary(delta0, lam, traj.t_r)
        return u1, u1
    v = traj.eps_m / traj.t_r
    u1 = ramp_unitary(RampSpec(delta0, delta1, v, lam))
    u3 = ramp_unitary(RampSpec(delta1, delta0, -v, lam))
    return u1, u3


def p_lzr(traj, lam, omega_tls):
    """Transfer probability of the full trapezoidal pulse |<TLS|U3 U2 U1|q>|^2."""
    u1, u3 = _segment_unitaries(traj, lam, omega_tls)
    u2 = plateau_unitary(traj.f_pl - omega_tls, lam, traj.t_p)
    total = compose(u3, compose(u2, u1))
    return min(total.transfer_prob, 1.0)


def p_lzr_many(traj_template, lam, omega_tls, t_p_values):
    """p_lzr vectorized over hold times; ramp propagators are shared."""
    u1, u3 = _segment_unitaries(traj_template, lam, omega_tls)
    delta1 = traj_template.f_pl - omega_tls
    t_p_values = np.asarray(t_p_values, dtype=float)
    omega = math.sqrt(delta1 * delta1 + 4.0 * lam * lam)
    half = 0.5 * omega * t_p_values
    s = np.sin(half) / omega if omega > 0 else np.zeros_like(t_p_values)
    v11 = np.cos(half) - 1j * delta1 * s
    v21 = -2j * lam * s
    # compose u3 @ U2(t) @ u1 elementwise
    a1 = v11 * u1.u11 - np.conj(v21) * u1.u21
    b1 = v21 * u1.u11 + np.conj(v11) * u1.u21
    b = u3.u21 * a1 + np.conj(u3.u11) * b1
    return np.minimum(np.abs(b) ** 2, 1.0)


def lz_transition_estimate(lam, v):
    """Leading-order avoided-crossing transfer 2 pi lam^2 / v."""
    if v <= 0.0:
        raise ValueError("v must be positive")
    return 2.0 * math.pi * lam * lam / v


def ramp_phase_shift(lam, delta_sum, v):
    """Phase added to the plateau oscillation by the two ramps: 2 lam |D|/v."""
    if v <= 0.0:
        raise ValueError("v must be positive")
    return 2.0 * lam * abs(delta_sum) / v


def ramp_phase_threshold(lam, v):
    """Gap scale below which the ramp phase is negligible (theta << 1)."""
    if lam <= 0.0 or v <= 0.0:
        raise ValueError("lam and v must be positive")
    return v / (4.0 * lam)
