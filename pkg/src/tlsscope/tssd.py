"""Swap-spectroscopy dataset synthesis, noise injection, and serialization.

A frame is a (t_p, f_pl) grid of decay probabilities plus metadata.  The
temporal axis is uniform or logarithmic; logarithmic sampling beats against
the physical oscillation and stretches its apparent period (the sampling
moire that makes sparse grids usable), quantified by
``moire_amplification``.
"""

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .pulse import Trajectory
from .units import ghz, to_ghz, to_mhz
from . import perturbative, coherent

__all__ = [
    "SamplingGrid",
    "NoiseSpec",
    "PurcellSpec",
    "TssdFrame",
    "NoDominantPeakError",
    "make_grid",
    "synthesize",
    "apply_noise",
    "purcell_rate",
    "moire_amplification",
    "dominant_period",
    "save_frame",
    "load_frame",
]

MODELS = ("perturbative-spa", "perturbative-numeric", "coherent")


class NoDominantPeakError(RuntimeError):
    """Column spectrum has no peak standing out from the background."""


@dataclass(frozen=True)
class SamplingGrid:
    f_pl_values: np.ndarray        # rad/ns, strictly increasing
    t_p_values: np.ndarray         # ns, strictly increasing
    temporal_mode: str             # "uniform" | "logarithmic"

    def __post_init__(self):
        f = np.asarray(self.f_pl_values, dtype=float)
        t = np.asarray(self.t_p_values, dtype=float)
        if np.any(np.diff(f) <= 0) or np.any(np.diff(t) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if self.temporal_mode not in ("uniform", "logarithmic"):
            raise ValueError(f"unknown temporal_mode {self.temporal_mode!r}")
        object.__setattr__(self, "f_pl_values", f)
        object.__setattr__(self, "t_p_values", t)

    @property
    def shape(self):
        return (self.t_p_values.size, self.f_pl_values.size)


@dataclass(frozen=True)
class PurcellSpec:
    """Readout-resonator parameters driving the frequency-dependent decay."""

    omega_r: float    # rad/ns
    g_jc: float       # rad/ns
    kappa: float      # 1/ns


@dataclass(frozen=True)
class NoiseSpec:
    """Readout bit-flip noise and shot sampling; shots=None means infinite."""

    e0: float = 0.01
    e1: float = 0.05
    shots: int | None = 1000
    purcell: PurcellSpec | None = None

    def __post_init__(self):
        if not (0.0 <= self.e0 < 0.5 and 0.0 <= self.e1 < 0.5):
            raise ValueError("readout flip probabilities must lie in [0, 0.5)")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 or None")

    @classmethod
    def off(cls):
        return cls(e0=0.0, e1=0.0, shots=None)


@dataclass
class TssdFrame:
    grid: SamplingGrid
    p: np.ndarray                  # (n_t, n_f) probabilities, NaN = invalid
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.shape != self.grid.shape:
            raise ValueError(f"data shape {self.p.shape} != grid shape {self.grid.shape}")
        valid = self.p[np.isfinite(self.p)]
        if valid.size and (valid.min() < -1e-12 or valid.max() > 1.0 + 1e-12):
            raise ValueError("probabilities outside [0, 1]")

    def column(self, f_pl):
        j = int(np.argmin(np.abs(self.grid.f_pl_values - f_pl)))
        return self.p[:, j]

    def window(self, f_lo=None, f_hi=None, t_lo=None, t_hi=None):
        """Sub-frame restricted to [f_lo, f_hi] x [t_lo, t_hi] (rad/ns, ns)."""
        f = self.grid.f_pl_values
        t = self.grid.t_p_values
        jm = np.ones(f.size, dtype=bool)
        im = np.ones(t.size, dtype=bool)
        if f_lo is not None:
            jm &= f >= f_lo - 1e-12
        if f_hi is not None:
            jm &= f <= f_hi + 1e-12
        if t_lo is not None:
            im &= t >= t_lo - 1e-12
        if t_hi is not None:
            im &= t <= t_hi + 1e-12
        sub = SamplingGrid(f[jm], t[im], self.grid.temporal_mode)
        return TssdFrame(sub, self.p[np.ix_(im, jm)], dict(self.meta))


def make_grid(f_lo, f_hi, df, t_lo, t_hi, n_t, mode="logarithmic"):
    """Frequency axis uniform with step df; time axis uniform or log-spaced.

    All frequencies in rad/ns, times in ns.
    """
    if f_lo >= f_hi or t_lo >= t_hi:
        raise ValueError("ranges must satisfy f_lo < f_hi and t_lo < t_hi")
    if n_t < 2:
        raise ValueError("n_t must be >= 2")
    if df <= 0:
        raise ValueError("df must be positive")
    n_f = int(round((f_hi - f_lo) / df)) + 1
    f = f_lo + df * np.arange(n_f)
    if mode == "uniform":
        t = np.linspace(t_lo, t_hi, n_t)
    elif mode == "logarithmic":
        if t_lo <= 0:
            raise ValueError("logarithmic mode needs t_lo > 0")
        t = np.geomspace(t_lo, t_hi, n_t)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SamplingGrid(f, t, mode)


def purcell_rate(f_q, omega_r, g_jc, kappa):
    """Resonator-induced extra qubit decay kappa * g_jc^2 / (f_q - omega_r)^2."""
    delta = f_q - omega_r
    if delta == 0.0:
        raise ZeroDivisionError("qubit frequency exactly at the resonator")
    return kappa * (g_jc / delta) ** 2


def _point_rng(seed, row, col):
    return Generator(Philox(key=seed, counter=[0, 0, row, col]))


def apply_noise(p_true, noise, rng):
    """Observed decay probability after readout bit flips and shot sampling.

    The flip-error map sends p to p(1-e1) + (1-p)e0; finite shots then
    binomially sample the flipped probability.
    """
    p_eff = np.asarray(p_true) * (1.0 - noise.e1) + (1.0 - np.asarray(p_true)) * noise.e0
    if noise.shots is None:
        return p_eff if p_eff.shape else float(p_eff)
    draws = rng.binomial(noise.shots, p_eff) / noise.shots
    return draws if np.asarray(p_eff).shape else float(draws)


def _model_grid(model, params, traj_template, grid, gamma_extra):
    f = grid.f_pl_values
    t = grid.t_p_values
    if model == "perturbative-spa":
        return _per_column_perturbative(
            perturbative.decay_prob_spa_grid, params, traj_template, f, t, gamma_extra)
    if model == "perturbative-numeric":
        out = _per_column_perturbative(
            perturbative.decay_prob_numeric_grid, params, traj_template, f, t, gamma_extra)
        return np.clip(out, 0.0, 1.0)
    if model == "coherent":
        out = np.empty((t.size, f.size))
        for j, f_pl in enumerate(f):
            traj = Trajectory(traj_template.f_idle, f_pl, traj_template.t_r, 0.0)
            out[:, j] = coherent.p_lzr_many(traj, params.lam, params.omega_tls, t)
        return out
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def _per_column_perturbative(grid_fn, params, traj_template, f, t, gamma_extra):
    if gamma_extra is None:
        return grid_fn(params, traj_template, f, t)
    out = np.empty((t.size, f.size))
    for j, f_pl in enumerate(f):
        pj = params.with_extra_gamma_2q(gamma_extra[j])
        out[:, j] = grid_fn(pj, traj_template, np.array([f_pl]), t)[:, 0]
    return out


def synthesize(model, params_list, traj_template, grid, noise=None, seed=0):
    """Forward-model a full frame; deterministic for fixed seed.

    Multiple TLS combine as independent decay channels
    P = 1 - prod(1 - P_i).  Noise is applied per grid point with a
    counter-based generator keyed by (seed, row, col), so parallel and
    serial synthesis agree bit-exactly.
    """
    if not params_list:
        raise ValueError("params_list must be non-empty")
    if noise is None:
        noise = NoiseSpec.off()
    gamma_extra = None
    if noise.purcell is not None and model != "coherent":
        pc = noise.purcell
        gamma_extra = np.array([purcell_rate(f_pl, pc.omega_r, pc.g_jc, pc.kappa)
                                for f_pl in grid.f_pl_values])
    survive = np.ones(grid.shape)
    invalid = np.zeros(grid.shape, dtype=bool)
    for params in params_list:
        try:
            p_i = _model_grid(model, params, traj_template, grid, gamma_extra)
        except (perturbative.QuadratureError, RuntimeError):
            # per-TLS failure poisons only the affected points
            p_i = np.full(grid.shape, np.nan)
        bad = ~np.isfinite(p_i)
        invalid |= bad
        survive *= 1.0 - np.where(bad, 0.0, p_i)
    p = 1.0 - survive
    noisy = noise.e0 != 0.0 or noise.e1 != 0.0 or noise.shots is not None
    if noisy:
        n_t, n_f = grid.shape
        for i in range(n_t):
            for j in range(n_f):
                if not invalid[i, j]:
                    p[i, j] = apply_noise(p[i, j], noise, _point_rng(seed, i, j))
    p[invalid] = np.nan
    meta = {
        "model": model,
        "tls": [_tls_to_user(q) for q in params_list],
        "trajectory": traj_template.to_json_dict(),
        "noise": _noise_to_dict(noise),
        "seed": int(seed),
        "temporal_mode": grid.temporal_mode,
        "invalid_count": int(invalid.sum()),
    }
    return TssdFrame(grid, p, meta)


def _tls_to_user(q):
    return {
        "lambda_mhz": to_mhz(q.lam),
        "omega_tls_ghz": to_ghz(q.omega_tls),
        "gamma_tls_phi_mhz": to_mhz(q.gamma_tls_phi),
        "gamma_2q_mhz": to_mhz(q.gamma_2q),
    }


def _tls_from_user(d):
    return perturbative.TlsParams.from_user(
        d["lambda_mhz"], d["omega_tls_ghz"],
        d.get("gamma_tls_phi_mhz", 0.0), d.get("gamma_2q_mhz", 0.0))


def _noise_to_dict(noise):
    d = {"e0": noise.e0, "e1": noise.e1, "shots": noise.shots}
    if noise.purcell is not None:
        d["purcell"] = {
            "omega_r_ghz": to_ghz(noise.purcell.omega_r),
            "g_jc_mhz": to_mhz(noise.purcell.g_jc),
            "kappa_1_per_ns": noise.purcell.kappa,
        }
    return d


def _noise_from_dict(d):
    pc = None
    if d.get("purcell"):
        pd = d["purcell"]
        pc = PurcellSpec(ghz(pd["omega_r_ghz"]), ghz(pd["g_jc_mhz"] * 1e-3),
                         pd["kappa_1_per_ns"])
    return NoiseSpec(e0=d.get("e0", 0.0), e1=d.get("e1", 0.0),
                     shots=d.get("shots"), purcell=pc)


# ---------------------------------------------------------------------------
# moire period measurement


def dominant_period(column):
    """Dominant oscillation period of a 1-D signal, in samples.

    Spectral peak of the mean-subtracted signal with parabolic refinement.
    Raises NoDominantPeakError when nothing stands out of the background.
    """
    y = np.asarray(column, dtype=float)
    y = y[np.isfinite(y)]
    n = y.size
    if n < 8:
        raise NoDominantPeakError("column too short for period estimation")
    amp = np.abs(np.fft.rfft(y - y.mean()))
    if amp.size < 3:
        raise NoDominantPeakError("spectrum too short")
    mags = amp[1:]
    k = int(np.argmax(mags)) + 1
    floor = np.median(mags)
    if not (amp[k] > 3.0 * floor and amp[k] > 0.0):
        raise NoDominantPeakError(
            f"peak {amp[k]:.3g} does not stand out from background {floor:.3g}")
    # parabolic interpolation around the peak bin
    if 1 <= k < amp.size - 1:
        a, b, c = amp[k - 1], amp[k], amp[k + 1]
        denom = a - 2.0 * b + c
        if denom != 0.0:
            k = k + 0.5 * (a - c) / denom
    return n / k


def moire_amplification(frame_log, frame_uniform, at_f_pl):
    """Ratio of dominant sample-space periods, log grid over uniform grid.

    Both frames must contain the probed plateau frequency; the comparison
    column is the one nearest at_f_pl in each frame.
    """
    p_log = dominant_period(frame_log.column(at_f_pl))
    p_uni = dominant_period(frame_uniform.column(at_f_pl))
    return p_log / p_uni


# ---------------------------------------------------------------------------
# serialization


def save_frame(frame, path):
    """CSV with a t_p_ns column then one column per f_pl (GHz); JSON sidecar."""
    f_ghz = [to_ghz(v) for v in frame.grid.f_pl_values]
    lines = ["t_p_ns," + ",".join(f"{v:.12g}" for v in f_ghz)]
    for i, t in enumerate(frame.grid.t_p_values):
        cells = [f"{t:.17g}"]
        for v in frame.p[i]:
            cells.append("" if not math.isfinite(v) else f"{v:.17g}")
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = dict(frame.meta)
    meta["temporal_mode"] = frame.grid.temporal_mode
    with open(_meta_path(path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _meta_path(path):
    root, _ = os.path.splitext(path)
    return root + ".meta.json"


def load_frame(path):
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    header = lines[0].split(",")
    if header[0] != "t_p_ns":
        raise ValueError(f"unexpected frame header {header[0]!r}")
    f_pl = np.array([ghz(float(v)) for v in header[1:]])
    t_p = []
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        t_p.append(float(cells[0]))
        rows.append([float(c) if c != "" else np.nan for c in cells[1:]])
    meta = {}
    mp = _meta_path(path)
    if os.path.exists(mp):
        with open(mp) as fh:
            meta = json.load(fh)
    mode = meta.get("temporal_mode", "uniform")
    grid = SamplingGrid(f_pl, np.array(t_p), mode)
    return TssdFrame(grid, np.array(rows), meta)


def tls_params_from_meta(meta):
    """Reconstruct the TLS parameter list and trajectory stored in a frame."""
    params = [_tls_from_user(d) for d in meta["tls"]]
    traj = Trajectory.from_json_dict(meta["trajectory"])
    return params, traj


def noise_from_meta(meta):
    return _noise_from_dict(meta.get("noise", {}))
