"""Swap-spectroscopy simulation and TLS characterization toolkit.

Simulates qubit decay induced by two-level-system (TLS) defects during
trapezoidal frequency excursions, synthesizes noisy spectroscopy datasets,
infers TLS parameters with an evolution-strategy-trained network, and
builds Kraus-channel descriptions of TLS-afflicted two-qubit gates.

Internal unit convention: time in ns, every frequency-like quantity
(including dephasing rates) stored as an angular rate in rad/ns.  All
user-facing interfaces speak GHz / MHz / ns and convert at the boundary.
"""

from .units import ghz, mhz, to_ghz, to_mhz
from .pulse import Trajectory
from .perturbative import (
    TlsParams,
    SpaDecomposition,
    decay_prob_numeric,
    decay_prob_spa,
    stationary_point,
)
from .coherent import (
    TwoLevelUnitary,
    RampSpec,
    ramp_unitary,
    plateau_unitary,
    p_rec,
    p_lzr,
    lz_transition_estimate,
    ramp_phase_shift,
)
from .tssd import (
    SamplingGrid,
    NoiseSpec,
    PurcellSpec,
    TssdFrame,
    make_grid,
    synthesize,
    apply_noise,
    purcell_rate,
    moire_amplification,
)
from .fit import (
    Mlp,
    EaConfig,
    FitResult,
    cost,
    forward,
    ea_train,
    simplex_fit,
    grid_fit,
    relative_error,
)
from .channel import (
    GateSpec,
    TlsEnv,
    KrausSet,
    GateMetrics,
    u2_ideal,
    u2_general,
    w11_amplitude,
    kernel_integrals,
    build_kraus,
    entanglement_fidelity,
    average_fidelity,
    unitarity,
    gate_metrics,
    sweep,
)

__version__ = "0.1.0"
