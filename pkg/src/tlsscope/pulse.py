"""Trapezoidal frequency-control trajectory of the swap-spectroscopy gate.

The qubit idles at f_idle, ramps linearly to the plateau frequency f_pl over
t_r, holds for t_p, and ramps back.  In units of the ramp time the normalized
shape mu rises 0 -> 1 on [0, 1), holds 1 on [1, T-1), and falls back on
[T-1, T], with T = t_tot / t_r.
"""

import json
from dataclasses import dataclass

from .units import ghz, to_ghz


@dataclass(frozen=True)
class Trajectory:
    """Trapezoidal pulse: frequencies in rad/ns, times in ns."""

    f_idle: float
    f_pl: float
    t_r: float
    t_p: float

    def __post_init__(self):
        if self.t_r <= 0.0:
            raise ValueError(f"t_r must be positive, got {self.t_r}")
        if self.t_p < 0.0:
            raise ValueError(f"t_p must be non-negative, got {self.t_p}")

    @property
    def eps_m(self):
        """Signed plateau excursion f_pl - f_idle (rad/ns)."""
        return self.f_pl - self.f_idle

    @property
    def t_tot(self):
        return 2.0 * self.t_r + self.t_p

    @property
    def big_t(self):
        """Total duration in units of t_r."""
        return self.t_tot / self.t_r

    def freq_at(self, x):
        """Instantaneous qubit frequency (rad/ns) at unitless time x."""
        return self.f_idle + self.eps_m * mu(self, x)

    @classmethod
    def from_ghz(cls, f_idle_ghz, f_pl_ghz, t_r_ns, t_p_ns):
        return cls(ghz(f_idle_ghz), ghz(f_pl_ghz), t_r_ns, t_p_ns)

    def to_json_dict(self):
        return {
            "f_idle_ghz": to_ghz(self.f_idle),
            "f_pl_ghz": to_ghz(self.f_pl),
            "t_r_ns": self.t_r,
            "t_p_ns": self.t_p,
        }

    @classmethod
    def from_json_dict(cls, d):
        return cls.from_ghz(d["f_idle_ghz"], d["f_pl_ghz"], d["t_r_ns"], d["t_p_ns"])

    def dumps(self):
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, s):
        return cls.from_json_dict(json.loads(s))


def _check_range(traj, x):
    big_t = traj.big_t
    if x < -1e-12 or x > big_t + 1e-12:
        raise ValueError(f"unitless time {x} outside pulse support [0, {big_t}]")
    return min(max(x, 0.0), big_t)


def mu(traj, x):
    """Normalized trapezoid shape at unitless time x in [0, T]."""
    x = _check_range(traj, x)
    big_t = traj.big_t
    if x < 1.0:
        return x
    if x < big_t - 1.0:
        return 1.0
    return big_t - x


def phase_Phi(traj, x):
    """Accumulated shape integral Phi(x) = int_0^x mu; exact piecewise quadratic."""
    x = _check_range(traj, x)
    big_t = traj.big_t
    if x < 1.0:
        return 0.5 * x * x
    if x < big_t - 1.0:
        return 0.5 + (x - 1.0)
    y = big_t - x  # remaining ramp-down coordinate, in [0, 1]
    return (big_t - 1.0) - 0.5 * y * y
