"""Hydrodynamic (Madelung) view of a sampled wavefunction.

Writes psi = sqrt(rho) exp(iS) and evaluates the continuity,
Hamilton-Jacobi and Euler equations on pairs of snapshots.  Only points
where the density exceeds ``eps_mask * max(rho)`` are trusted.

The velocity is linear and the quantum potential quadratic in ``x`` for a
Gaussian packet, so neither is periodic.  Their spatial derivatives are
therefore assembled with the quotient rule from spectral derivatives of
the periodic quantities ``psi`` and ``sqrt(rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysicsParams
from .fields import Grid, GridMismatchError, WaveField, check_same_grid, spectral_derivative

__all__ = [
    "Grid", "WaveField", "GridMismatchError", "MadelungFields", "Residual",
    "decompose", "continuity_residual", "hamilton_jacobi_residual", "euler_residual",
]

DEFAULT_EPS_MASK = 1e-6


@dataclass(frozen=True, eq=False)
class MadelungFields:
    rho: np.ndarray
    S: np.ndarray
    v_qu: np.ndarray
    V_qu: np.ndarray
    V_GP: np.ndarray
    mask: np.ndarray


@dataclass(frozen=True, eq=False)
class Residual:
    values: np.ndarray
    mask: np.ndarray
    max_norm: float


def _mask(rho, eps_mask):
    peak = rho.max()
    if not peak > 0:
        raise ValueError("field is identically zero; nothing to decompose")
    return rho >= eps_mask * peak


def unwrap_from_peak(phase: np.ndarray, i0: int) -> np.ndarray:
    right = np.unwrap(phase[i0:])
    left = np.unwrap(phase[: i0 + 1][::-1])[::-1]
    return np.concatenate([left[:-1], right])


class _Hydro:
    """Pointwise hydrodynamic quantities and their x-derivatives."""

    def __init__(self, field: WaveField, params: PhysicsParams):
        grid, psi = field.grid, field.values
        m, hbar = params.mass, params.hbar
        d1 = spectral_derivative(psi, grid, 1)
        d2 = spectral_derivative(psi, grid, 2)
        rho = field.density
        tiny = np.finfo(float).tiny
        safe_rho = np.maximum(rho, tiny)

        self.rho = rho
        self.drho = 2.0 * np.real(np.conj(psi) * d1)
        self.J = hbar / m * np.imag(np.conj(psi) * d1)
        self.dJ = hbar / m * np.imag(np.conj(psi) * d2)
        self.v = self.J / safe_rho
        self.dv = (self.dJ - self.v * self.drho) / safe_rho

        phi = np.sqrt(rho)
        safe_phi = np.maximum(phi, np.sqrt(tiny))
        p1, p2, p3 = (spectral_derivative(phi, grid, k) for k in (1, 2, 3))
        c = -(hbar**2) / (2.0 * m)
        self.V_qu = c * p2 / safe_phi
        self.dV_qu = c * (p3 / safe_phi - p2 * p1 / safe_phi**2)


def decompose(field: WaveField, params: PhysicsParams,
              eps_mask: float = DEFAULT_EPS_MASK) -> MadelungFields:
    """Density, unwrapped phase, velocity, quantum and mean-field potentials."""
    if not 0 < eps_mask < 1:
        raise ValueError(f"eps_mask must lie in (0, 1), got {eps_mask}")
    h = _Hydro(field, params)
    mask = _mask(h.rho, eps_mask)
    S = unwrap_from_peak(np.angle(field.values), int(np.argmax(h.rho)))
    return MadelungFields(rho=h.rho, S=S, v_qu=h.v, V_qu=h.V_qu, V_GP=params.g * h.rho, mask=mask)


def _pair(before: WaveField, after: WaveField, params, eps_mask):
    check_same_grid(before, after)
    dt = after.t - before.t
    if not dt > 0:
        raise ValueError(f"snapshots must be time ordered, got t={before.t} then t={after.t}")
    hb, ha = _Hydro(before, params), _Hydro(after, params)
    mask = _mask(hb.rho, eps_mask) & _mask(ha.rho, eps_mask)
    return hb, ha, dt, mask


def _finish(values, mask) -> Residual:
    values = np.where(mask, values, 0.0)
    return Residual(values, mask, float(np.max(np.abs(values))))


def _mid(a, b):
    return 0.5 * (a + b)


def continuity_residual(before: WaveField, after: WaveField, params: PhysicsParams,
                        eps_mask: float = DEFAULT_EPS_MASK) -> Residual:
    """d(rho)/dt + d(rho v)/dx, centred between the two snapshots."""
    hb, ha, dt, mask = _pair(before, after, params, eps_mask)
    return _finish((ha.rho - hb.rho) / dt + _mid(hb.dJ, ha.dJ), mask)


def hamilton_jacobi_residual(before: WaveField, after: WaveField, params: PhysicsParams,
                             eps_mask: float = DEFAULT_EPS_MASK) -> Residual:
    """hbar dS/dt + m v^2/2 + m omega^2 x^2/2 + V_qu + g rho."""
    hb, ha, dt, mask = _pair(before, after, params, eps_mask)
    # pointwise phase increment; avoids unwrapping each snapshot separately
    dS = np.angle(after.values * np.conj(before.values))
    x = before.grid.x
    w2 = params.trap(_mid(before.t, after.t))
    v = _mid(hb.v, ha.v)
    values = (params.hbar * dS / dt + 0.5 * params.mass * v**2
              + 0.5 * params.mass * w2 * x**2 + _mid(hb.V_qu, ha.V_qu)
              + params.g * _mid(hb.rho, ha.rho))
    return _finish(values, mask)


def euler_residual(before: WaveField, after: WaveField, params: PhysicsParams,
                   eps_mask: float = DEFAULT_EPS_MASK) -> Residual:
    """dv/dt + v dv/dx + omega^2 x + d(V_qu + g rho)/dx / m."""
    hb, ha, dt, mask = _pair(before, after, params, eps_mask)
    x = before.grid.x
    w2 = params.trap(_mid(before.t, after.t))
    force = _mid(hb.dV_qu, ha.dV_qu) + params.g * _mid(hb.drho, ha.drho)
    values = ((ha.v - hb.v) / dt + _mid(hb.v, ha.v) * _mid(hb.dv, ha.dv)
              + w2 * x + force / params.mass)
    return _finish(values, mask)
