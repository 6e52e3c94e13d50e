"""Gaussian wave-packet dynamics of the 1D Gross-Pitaevskii equation.

Reduced ODEs for the packet centre, width and phase, Bohmian trajectories,
an independent split-step Fourier PDE solver, and Madelung residual checks.
"""
__version__ = "0.1.0"

from .core import (Constant, Modulated, ParameterError, PhysicsParams, PiecewiseConstant,
                   Tabulated, omega_squared_at, validate_params)
from .fields import Grid, WaveField
from .series import TimeSeries
from .variational import (InteractionVariant, NumericalFailure, TaylorCoefficients,
                          VariationalState, bohmian_trajectories, derivatives, propagate,
                          step, synthesize, taylor_coefficients, velocity_field)
from .madelung import (MadelungFields, continuity_residual, decompose, euler_residual,
                       hamilton_jacobi_residual)
from .spectral import Observables, evolve, initial_field_from_state, observables, split_step

__all__ = [
    "Constant", "Modulated", "PiecewiseConstant", "Tabulated", "PhysicsParams", "ParameterError",
    "omega_squared_at", "validate_params", "Grid", "WaveField", "TimeSeries",
    "InteractionVariant", "NumericalFailure", "TaylorCoefficients", "VariationalState",
    "bohmian_trajectories", "derivatives", "propagate", "step", "synthesize",
    "taylor_coefficients", "velocity_field", "MadelungFields", "continuity_residual",
    "decompose", "euler_residual", "hamilton_jacobi_residual", "Observables", "evolve",
    "initial_field_from_state", "observables", "split_step",
]
