"""Adaptive Dormand-Prince RK5(4) for complex-valued ODE systems.

scipy's solve_ivp does not accept complex state, and the integrands here
(oscillatory kernels, Weber's equation) are naturally complex; this is a
small deterministic embedded-pair stepper for them.
"""

import numpy as np

# Dormand-Prince coefficients (RK45 pair)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def integrate_complex(f, t0, t1, y0, rtol=1e-9, atol=1e-12, max_steps=2_000_000,
                      first_step=None):
    """Integrate y' = f(t, y) from t0 to t1 (t0 < t1), complex y.

    Returns the final state.  Raises RuntimeError if the step count budget
    is exhausted, carrying the achieved position.
    """
    y = np.asarray(y0, dtype=complex).copy()
    t = float(t0)
    t1 = float(t1)
    if t1 <= t:
        return y
    h = first_step if first_step is not None else min(0.1 * (t1 - t), 1e-2)
    h = min(h, t1 - t)
    k = [None] * 7
    for _ in range(max_steps):
        k[0] = f(t, y)
        for i in range(1, 7):
            yi = y + h * sum(aij * k[j] for j, aij in enumerate(_A[i]))
            k[i] = f(t + _C[i] * h, yi)
        y5 = y + h * sum(b * k[i] for i, b in enumerate(_B5) if b != 0.0)
        y4 = y + h * sum(b * k[i] for i, b in enumerate(_B4) if b != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.max(np.abs(y5 - y4) / scale) if y.size else 0.0
        if err <= 1.0:
            t += h
            y = y5
            if t >= t1 - 1e-14 * max(1.0, abs(t1)):
                return y
        # standard PI-free step-size update with safety factor
        factor = 0.9 * (1.0 / err) ** 0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
        h = min(h, t1 - t)
        if h <= 1e-15 * max(1.0, abs(t)):
            raise RuntimeError(f"step size underflow at t={t:.6g} (err={err:.3g})")
    raise RuntimeError(f"max step count exceeded at t={t:.6g} of [{t0:.6g}, {t1:.6g}]")
