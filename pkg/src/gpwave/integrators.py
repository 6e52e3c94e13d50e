"""Explicit Runge-Kutta steppers for ``y' = f(t, y)`` on numpy vectors."""
from __future__ import annotations

import numpy as np

# Dormand-Prince 5(4) tableau
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

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


def rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def dopri_attempt(f, t, y, h):
    """One Dormand-Prince trial step. Returns (y5, error estimate vector)."""
    ks = []
    for i in range(7):
        yi = y + h * sum((a * k for a, k in zip(_A[i], ks)), np.zeros_like(y))
        ks.append(f(t + _C[i] * h, yi))
    ks = np.array(ks)
    y5 = y + h * (_B5 @ ks)
    err = h * ((_B5 - _B4) @ ks)
    return y5, err


def dopri_step(f, t, y, h, rtol, atol=None, max_tries=50):
    """Take one accepted adaptive step starting from trial size ``h``.

    Returns ``(y_new, h_used, h_next)``. ``atol`` defaults to ``rtol``.
    """
    atol = rtol if atol is None else atol
    for _ in range(max_tries):
        y_new, err = dopri_attempt(f, t, y, h)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if not np.isfinite(err_norm):
            h *= MIN_FACTOR
            continue
        if err_norm <= 1.0:
            factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm**-0.2)
            return y_new, h, h * factor
        h *= max(MIN_FACTOR, SAFETY * err_norm**-0.2)
    raise FloatingPointError(f"adaptive step failed to converge near t={t}")
