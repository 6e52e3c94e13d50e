"""Resolution ladders and measured convergence orders."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Constant, PhysicsParams
from ..fields import Grid
from ..madelung import continuity_residual, euler_residual, hamilton_jacobi_residual
from ..spectral import evolve, initial_field_from_state, split_step
from ..variational import InteractionVariant, VariationalState, propagate


@dataclass(frozen=True)
class Rung:
    quantity: str
    dt: float
    dx: float
    error: float
    order: float


def estimate_orders(errors) -> list[float]:
    """``log2(e(h) / e(h/2))`` for each rung after the first (NaN for the first)."""
    errors = list(errors)
    orders = [math.nan]
    for coarse, fine in zip(errors, errors[1:]):
        orders.append(math.log2(coarse / fine) if coarse > 0 and fine > 0 else math.nan)
    return orders


def is_monotone(errors) -> bool:
    return all(b < a for a, b in zip(errors, errors[1:]))


def _rungs(quantity, dts, dxs, errors):
    return [Rung(quantity, dt, dx, e, p) for dt, dx, e, p in zip(dts, dxs, errors, estimate_orders(errors))]


def rk4_ladder(params: PhysicsParams, init: VariationalState, t_final: float, dts,
               variant=InteractionVariant()) -> list[Rung]:
    """Global error of ``q`` over ``[t0, t_final]``.

    A constant trap uses the closed-form orbit and the max error over every
    step; other schedules compare ``q(t_final)`` with a run at an eighth of
    the finest step.  Endpoint errors at whole periods are misleading: there
    the order-4 phase error enters only quadratically.
    """
    trap = params.trap
    if isinstance(trap, Constant):
        w2, x0, v0 = trap.omega2, init.q, init.p / params.mass

        def exact(t):
            t = t - init.t
            if w2 > 0:
                w = math.sqrt(w2)
                return x0 * np.cos(w * t) + v0 / w * np.sin(w * t)
            if w2 < 0:
                w = math.sqrt(-w2)
                return x0 * np.cosh(w * t) + v0 / w * np.sinh(w * t)
            return x0 + v0 * t

        def error(dt):
            s = propagate(init, params, variant, t_final, dt)
            return float(np.max(np.abs(s["q"] - exact(s.t))))
    else:
        ref = propagate(init, params, variant, t_final, min(dts) / 8)["q"][-1]

        def error(dt):
            return abs(propagate(init, params, variant, t_final, dt)["q"][-1] - ref)

    return _rungs("q", dts, [math.nan] * len(dts), [error(dt) for dt in dts])


def strang_ladder(params: PhysicsParams, init: VariationalState, grid: Grid, t_final: float,
                  dts, precision="extended") -> list[Rung]:
    """L2 error of the final wavefunction against a run at a quarter of the finest step."""
    field = initial_field_from_state(init, params, grid)

    def final(dt):
        return evolve(field, params, t_final=t_final, dt=dt, snapshot_every=10**9,
                      precision=precision).final.values

    ref = final(min(dts) / 4)
    errors = [math.sqrt(np.sum(np.abs(final(dt) - ref) ** 2) * grid.dx) for dt in dts]
    return _rungs("psi_l2", dts, [grid.dx] * len(dts), errors)


def residual_ladder(params: PhysicsParams, init: VariationalState, grids, dts, t_final: float,
                    eps_mask: float, precision="extended") -> list[Rung]:
    """Residual max-norms on a snapshot pair one step apart, taken at ``t_final``.

    Grid spacing and time step are refined together.
    """
    out = {name: [] for name in ("continuity", "hamilton_jacobi", "euler")}
    for grid, dt in zip(grids, dts):
        field = initial_field_from_state(init, params, grid)
        if t_final > init.t:
            field = evolve(field, params, t_final=t_final, dt=dt, snapshot_every=10**9,
                           precision=precision).final
        after = split_step(field, params, field.t, dt, precision)
        out["continuity"].append(continuity_residual(field, after, params, eps_mask).max_norm)
        out["hamilton_jacobi"].append(hamilton_jacobi_residual(field, after, params, eps_mask).max_norm)
        out["euler"].append(euler_residual(field, after, params, eps_mask).max_norm)
    dxs = [g.dx for g in grids]
    return [r for name, errs in out.items() for r in _rungs(name, dts, dxs, errs)]
