"""Reduced Gaussian-packet dynamics of the 1D Gross-Pitaevskii equation.

The packet is described by its centre ``q``, momentum ``p``, width
parameter ``sigma`` (density ``(pi sigma)^-1/2 exp(-(x-q)^2/sigma)``, so the
position variance is ``sigma/2``), its rate ``sigma_dot`` and the phase
``S0`` at the centre.  The equations of motion are

    q'' = -omega^2(t) q
    sigma'' = sigma'^2/(2 sigma) + 2 hbar^2/(m^2 sigma) - 2 omega^2 sigma
              - 2 c_int g rho_pk / m
    hbar S0' = m q'^2/2 - m omega^2 q^2/2 - hbar^2/(2 m sigma) - g rho_pk

with ``rho_pk = (pi sigma)^-1/2`` the on-centre density.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from .core import PhysicsParams
from .fields import Grid, WaveField
from .integrators import dopri_step, rk4_step
from .series import TimeSeries

SIGMA_FLOOR_RATIO = 1e-12
STATE_COLUMNS = ("t", "q", "p", "sigma", "sigma_dot", "S0")


class NumericalFailure(RuntimeError):
    """Propagation produced a non-finite state or a collapsed width."""

    def __init__(self, message: str, last_good=None, t_fail: float | None = None):
        super().__init__(message)
        self.last_good = last_good
        self.t_fail = t_fail


class GridCoverageError(ValueError):
    pass


@dataclass(frozen=True)
class VariationalState:
    t: float
    q: float
    p: float
    sigma: float
    sigma_dot: float
    S0: float

    @classmethod
    def initial(cls, params: PhysicsParams, x0=0.0, v0=0.0, sigma0=1.0,
                sigma_dot0=0.0, t=0.0) -> "VariationalState":
        """State from centre, velocity and width; the phase starts at m v0 x0 / hbar."""
        m, hbar = params.mass, params.hbar
        return cls(t, x0, m * v0, sigma0, sigma_dot0, m * v0 * x0 / hbar)

    def as_vector(self) -> np.ndarray:
        return np.array(astuple(self)[1:], dtype=float)

    @classmethod
    def from_vector(cls, t: float, y) -> "VariationalState":
        return cls(float(t), *(float(v) for v in y))

    def velocity(self, params: PhysicsParams) -> float:
        return self.p / params.mass

    @property
    def std(self) -> float:
        return math.sqrt(self.sigma / 2.0)


@dataclass(frozen=True)
class InteractionVariant:
    """Coefficient of the interaction term in the width equation.

    The default of 2 reproduces the published equation; the gathering step
    that precedes it implies 4, and a strict second-order expansion of the
    density implies -2.  The variational (Lagrangian) value for a 1D
    Gaussian is -1/sqrt(2).
    """

    c_int: float = 2.0

    def __post_init__(self):
        if not math.isfinite(self.c_int):
            raise ValueError(f"c_int must be finite, got {self.c_int}")


@dataclass(frozen=True)
class TaylorCoefficients:
    v_qu_0: float
    v_qu_1: float
    v_qu_2: float
    v_0: float
    v_1: float
    v_2: float
    vgp_0: float
    vgp_1: float
    vgp_2: float
    s_1: float
    s_2: float


def peak_density(sigma: float) -> float:
    return (math.pi * sigma) ** -0.5


def _rates(t, y, params: PhysicsParams, c_int: float) -> np.ndarray:
    q, p, sigma, sigma_dot, _ = y
    m, hbar, g = params.mass, params.hbar, params.g
    w2 = params.trap(t)
    qdot = p / m
    rho_pk = (math.pi * sigma) ** -0.5
    sigma_ddot = (sigma_dot**2 / (2.0 * sigma) + 2.0 * hbar**2 / (m**2 * sigma)
                  - 2.0 * w2 * sigma - 2.0 * c_int * g * rho_pk / m)
    s0_dot = (0.5 * m * qdot**2 - 0.5 * m * w2 * q**2
              - hbar**2 / (2.0 * m * sigma) - g * rho_pk) / hbar
    return np.array([qdot, -m * w2 * q, sigma_dot, sigma_ddot, s0_dot])


def derivatives(state: VariationalState, params: PhysicsParams,
                variant: InteractionVariant = InteractionVariant()):
    """Time derivatives ``(q_dot, p_dot, sigma_dot, sigma_ddot, S0_dot)``."""
    if not state.sigma > 0:
        raise NumericalFailure(f"sigma must be positive, got {state.sigma}", state, state.t)
    rates = _rates(state.t, state.as_vector(), params, variant.c_int)
    if not np.all(np.isfinite(rates)):
        raise NumericalFailure(f"non-finite derivatives at t={state.t}", state, state.t)
    return tuple(float(r) for r in rates)


def _check(state_vec, t, last_good, sigma_floor):
    if not np.all(np.isfinite(state_vec)):
        raise NumericalFailure(f"non-finite state at t={t}", last_good, t)
    if state_vec[2] <= sigma_floor:
        raise NumericalFailure(
            f"width collapsed at t={t}: sigma={state_vec[2]:.3e} <= {sigma_floor:.3e}",
            last_good, t)


def _advance(state, params, variant, dt, method, tol, sigma_floor):
    """Returns (new_state, suggested next step)."""
    f = lambda t, y: _rates(t, y, params, variant.c_int)  # noqa: E731
    y = state.as_vector()
    with np.errstate(all="ignore"):
        if method == "rk4":
            y_new, h, h_next = rk4_step(f, state.t, y, dt), dt, dt
        elif method == "rk45":
            try:
                y_new, h, h_next = dopri_step(f, state.t, y, dt, tol)
            except FloatingPointError as exc:
                raise NumericalFailure(str(exc), state, state.t) from None
        else:
            raise ValueError(f"unknown method {method!r}; use 'rk4' or 'rk45'")
    t_new = state.t + h
    _check(y_new, t_new, state, sigma_floor)
    return VariationalState.from_vector(t_new, y_new), h_next


def step(state: VariationalState, params: PhysicsParams,
         variant: InteractionVariant = InteractionVariant(), dt: float = 1e-3,
         method: str = "rk4", tol: float = 1e-10, sigma_floor: float = 0.0) -> VariationalState:
    """Advance one step.

    With ``method="rk45"``, ``dt`` is the trial step and the returned state
    sits at ``state.t`` plus the accepted (possibly smaller) step.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if method == "rk45" and not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    return _advance(state, params, variant, dt, method, tol, sigma_floor)[0]


def propagate(init: VariationalState, params: PhysicsParams,
              variant: InteractionVariant = InteractionVariant(), t_final: float = 1.0,
              dt: float = 1e-3, method: str = "rk4", output_every: int = 1,
              tol: float = 1e-10) -> TimeSeries:
    """Integrate from ``init`` to ``t_final``.

    Samples are kept every ``output_every`` steps plus the final state.  The
    fixed-step path lands on ``t_final`` with a shortened last step when
    ``(t_final - t0) / dt`` is not an integer.
    """
    if not t_final > init.t:
        raise ValueError(f"t_final ({t_final}) must exceed the initial time ({init.t})")
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if output_every < 1:
        raise ValueError("output_every must be >= 1")
    if not init.sigma > 0:
        raise ValueError(f"initial sigma must be > 0, got {init.sigma}")
    sigma_floor = SIGMA_FLOOR_RATIO * init.sigma

    rows = [astuple(init)]
    state = init
    if method == "rk4":
        n_steps = max(1, int(math.ceil((t_final - init.t) / dt - 1e-9)))
        for i in range(1, n_steps + 1):
            h = dt if i < n_steps else t_final - state.t
            # stamp the final time exactly instead of accumulating
            state, _ = _advance(state, params, variant, h, "rk4", tol, sigma_floor)
            if i == n_steps:
                state = VariationalState(t_final, *astuple(state)[1:])
            if i % output_every == 0 or i == n_steps:
                rows.append(astuple(state))
    elif method == "rk45":
        h, i = dt, 0
        while state.t < t_final:
            remaining = t_final - state.t
            last = h >= remaining
            state, h = _advance(state, params, variant, min(h, remaining), "rk45", tol, sigma_floor)
            i += 1
            if last and state.t >= t_final - 1e-12 * max(1.0, abs(t_final)):
                state = VariationalState(t_final, *astuple(state)[1:])
            if i % output_every == 0 or state.t >= t_final:
                rows.append(astuple(state))
    else:
        raise ValueError(f"unknown method {method!r}; use 'rk4' or 'rk45'")
    return TimeSeries.from_rows(STATE_COLUMNS, rows)


def states(series: TimeSeries) -> list[VariationalState]:
    return [VariationalState(*(series[c][i] for c in STATE_COLUMNS)) for i in range(len(series))]


def velocity_field(state: VariationalState, x, params: PhysicsParams):
    """Quantum velocity ``sigma_dot/(2 sigma) (x - q) + q_dot``."""
    return state.sigma_dot / (2.0 * state.sigma) * (np.asarray(x) - state.q) + state.p / params.mass


def bohmian_trajectories(x0_list, series: TimeSeries) -> np.ndarray:
    """Trajectories ``q(t) + sqrt(sigma(t)/sigma(0)) (x0 - q(0))``.

    Returns an array of shape ``(len(x0_list), len(series))``.
    """
    if len(series) == 0:
        raise ValueError("empty series")
    x0 = np.asarray(x0_list, dtype=float)[:, None]
    q, sigma = series["q"], series["sigma"]
    return q[None, :] + np.sqrt(sigma / sigma[0])[None, :] * (x0 - q[0])


def taylor_coefficients(state: VariationalState, params: PhysicsParams) -> TaylorCoefficients:
    """Second-order expansion coefficients about the packet centre."""
    m, hbar, g = params.mass, params.hbar, params.g
    s, w2 = state.sigma, params.trap(state.t)
    rho_pk = peak_density(s)
    return TaylorCoefficients(
        v_qu_0=hbar**2 / (2 * m * s),
        v_qu_1=0.0,
        v_qu_2=-(hbar**2) / (m * s**2),
        v_0=0.5 * m * w2 * state.q**2,
        v_1=m * w2 * state.q,
        v_2=m * w2,
        vgp_0=g * rho_pk,
        vgp_1=0.0,
        vgp_2=2 * g * rho_pk / s,
        s_1=state.p / hbar,
        s_2=m / hbar * state.sigma_dot / (2 * s),
    )


def phase_polynomial(state: VariationalState, params: PhysicsParams, x):
    """Phase ``S0 + s_1 (x-q) + s_2 (x-q)^2 / 2`` of the packet."""
    c = taylor_coefficients(state, params)
    d = np.asarray(x) - state.q
    return state.S0 + c.s_1 * d + 0.5 * c.s_2 * d**2


def check_coverage(state: VariationalState, grid: Grid, n_std: float = 8.0) -> None:
    half = n_std * state.std
    if state.q - half < grid.x_min or state.q + half > grid.x_max:
        raise GridCoverageError(
            f"grid [{grid.x_min}, {grid.x_max}] does not cover q +/- {n_std:g} std "
            f"= [{state.q - half:.4g}, {state.q + half:.4g}]")


def synthesize(state: VariationalState, params: PhysicsParams, grid: Grid) -> WaveField:
    """Sample the explicit Gaussian wave packet on ``grid``."""
    check_coverage(state, grid)
    m, hbar = params.mass, params.hbar
    s = state.sigma
    d = grid.x - state.q
    exponent = ((1j * m * state.sigma_dot / (4 * hbar * s) - 1 / (2 * s)) * d**2
                + 1j * (state.p / hbar) * d + 1j * state.S0)
    return WaveField(grid, (math.pi * s) ** -0.25 * np.exp(exponent), state.t)
