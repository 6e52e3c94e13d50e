"""scikit-learn compatible wrappers around the two solvers.

Each row of ``X`` is an initial condition ``(x0, v0, sigma0, sigma_dot0)``.
``transform`` maps it to the state at ``t_final``, so the solvers can sit
inside pipelines, grid searches or ``joblib`` parallel maps.

    >>> est = VariationalPropagator(g=1.0, t_final=1.0)
    >>> est.fit_transform([[1.0, 0.0, 1.0, 0.0]]).shape
    (1, 5)
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import Constant, PhysicsParams, validate_params
from .fields import Grid
from .spectral import evolve, initial_field_from_state
from .variational import InteractionVariant, VariationalState, propagate

INITIAL_COLUMNS = ("x0", "v0", "sigma0", "sigma_dot0")


def check_initial_conditions(X) -> np.ndarray:
    """Validate an ``(n_samples, 4)`` block of initial conditions."""
    X = check_array(X, dtype=float, ensure_min_samples=1)
    if X.shape[1] != len(INITIAL_COLUMNS):
        raise ValueError(f"expected {len(INITIAL_COLUMNS)} columns {INITIAL_COLUMNS}, got {X.shape[1]}")
    if np.any(X[:, 2] <= 0):
        raise ValueError("sigma0 (column 2) must be positive")
    return X


class _PacketEstimator(TransformerMixin, BaseEstimator):
    def _physics(self) -> PhysicsParams:
        trap = self.trap if self.trap is not None else Constant(1.0)
        return validate_params(PhysicsParams(g=self.g, trap=trap, mass=self.mass, hbar=self.hbar))

    def _initial(self, physics, row) -> VariationalState:
        return VariationalState.initial(physics, *row)

    def fit(self, X, y=None):
        X = check_initial_conditions(X)
        self.physics_ = self._physics()
        self.n_features_in_ = X.shape[1]
        self.series_ = [self._run(self._initial(self.physics_, row)) for row in X]
        return self

    def transform(self, X):
        check_is_fitted(self, "physics_")
        X = check_initial_conditions(X)
        return np.array([self._final(self._run(self._initial(self.physics_, row))) for row in X])

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        return np.array([self._final(s) for s in self.series_])


class VariationalPropagator(_PacketEstimator):
    """Reduced-ODE propagation; output columns ``q, p, sigma, sigma_dot, S0``."""

    def __init__(self, g=0.0, trap=None, mass=1.0, hbar=1.0, t_final=1.0, dt=1e-3,
                 c_int=2.0, method="rk4", tol=1e-10, output_every=1):
        self.g = g
        self.trap = trap
        self.mass = mass
        self.hbar = hbar
        self.t_final = t_final
        self.dt = dt
        self.c_int = c_int
        self.method = method
        self.tol = tol
        self.output_every = output_every

    def _run(self, init):
        return propagate(init, self.physics_, InteractionVariant(self.c_int), self.t_final,
                         self.dt, self.method, self.output_every, self.tol)

    @staticmethod
    def _final(series):
        return np.array([series[c][-1] for c in ("q", "p", "sigma", "sigma_dot", "S0")])

    def predict(self, t):
        """Packet centre ``q`` of each fitted packet interpolated at times ``t``."""
        check_is_fitted(self, "series_")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([np.interp(t, s.t, s["q"]) for s in self.series_])


class SplitStepPropagator(_PacketEstimator):
    """Full PDE propagation; output columns ``norm, mean_x, var_x, energy``."""

    def __init__(self, g=0.0, trap=None, mass=1.0, hbar=1.0, t_final=1.0, dt=1e-3,
                 x_min=-16.0, x_max=16.0, n=512, output_every=10, precision="extended"):
        self.g = g
        self.trap = trap
        self.mass = mass
        self.hbar = hbar
        self.t_final = t_final
        self.dt = dt
        self.x_min = x_min
        self.x_max = x_max
        self.n = n
        self.output_every = output_every
        self.precision = precision

    def _run(self, init):
        field = initial_field_from_state(init, self.physics_, Grid(self.x_min, self.x_max, self.n))
        return evolve(field, self.physics_, t_final=self.t_final, dt=self.dt,
                      snapshot_every=self.output_every, precision=self.precision).series

    @staticmethod
    def _final(series):
        return np.array([series[c][-1] for c in ("norm", "mean_x", "var_x", "energy")])

    def predict(self, t):
        """``<x>`` of each fitted packet interpolated at times ``t``."""
        check_is_fitted(self, "series_")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([np.interp(t, s.t, s["mean_x"]) for s in self.series_])
