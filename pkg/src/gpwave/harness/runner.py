"""Mode dispatch for the ``gpwave`` command line tool."""
from __future__ import annotations

import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from ..series import TimeSeries
from ..spectral import SpectralFailure, evolve, initial_field_from_state, split_step
from ..variational import (GridCoverageError, InteractionVariant, NumericalFailure,
                           VariationalState, bohmian_trajectories, propagate)
from ..madelung import continuity_residual, euler_residual, hamilton_jacobi_residual
from . import io
from .compare import compare
from .config import ConfigError, RunConfig, sweep_points, with_overrides
from .convergence import is_monotone, residual_ladder, rk4_ladder, strang_ladder

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
ALIAS_LIMIT = 1e-10


class AliasingError(RuntimeError):
    pass


def initial_state(config: RunConfig) -> VariationalState:
    i = config.initial
    return VariationalState.initial(config.physics, i["x0"], i["v0"], i["sigma0"], i["sigma_dot0"])


def _label(c: float) -> str:
    return f"{c:.17g}"


def _single_variant(config: RunConfig) -> InteractionVariant:
    if len(config.run["c_int"]) != 1:
        raise ConfigError("only compare mode accepts several values", config.source, "run", "c_int")
    return InteractionVariant(config.c_int)


def _variational_series(config, variant):
    r = config.run
    return propagate(initial_state(config), config.physics, variant, r["t_final"], r["dt"],
                     r["method"], r["output_every"], r["tol"])


def _spectral(config, out: Path | None = None):
    r = config.run
    snap_every = r["snapshot_every"]
    if snap_every and snap_every % r["output_every"]:
        raise ConfigError("must be a multiple of output_every", config.source, "run", "snapshot_every")
    field = initial_field_from_state(initial_state(config), config.physics, config.grid)

    def observer(i, f):
        if out is not None and snap_every and i % snap_every == 0:
            io.write_snapshot(out / "snapshots" / f"snap_{i:08d}.csv", f)

    try:
        ev = evolve(field, config.physics, t_final=r["t_final"], dt=r["dt"],
                    snapshot_every=r["output_every"], observer=observer, precision=r["precision"])
    except ValueError as exc:
        raise ConfigError(str(exc), config.source, "run", "dt") from None
    if ev.max_high_k_fraction > ALIAS_LIMIT:
        raise AliasingError(
            f"spectral power in the top eighth of wavenumbers reached {ev.max_high_k_fraction:.3e} "
            f"(limit {ALIAS_LIMIT:g}); refine the grid")
    return ev


def run_variational(config: RunConfig, out: Path) -> dict:
    series = _variational_series(config, _single_variant(config))
    io.write_series(out / "variational.csv", series)
    s0 = initial_state(config)
    seeds = np.linspace(s0.q - 3 * s0.std, s0.q + 3 * s0.std, config.run["n_seeds"])
    paths = bohmian_trajectories(seeds, series)
    cols = {"t": series.t, **{f"x_qu_{i:02d}": paths[i] for i in range(len(seeds))}}
    io.write_series(out / "trajectories.csv", TimeSeries(cols))
    return {"samples": len(series), "sigma_min": float(series["sigma"].min()),
            "sigma_max": float(series["sigma"].max()), "seeds": seeds.tolist()}


def run_spectral(config: RunConfig, out: Path) -> dict:
    ev = _spectral(config, out)
    io.write_series(out / "observables.csv", ev.series)
    norm = ev.series["norm"]
    energy = ev.series["energy"]
    return {"samples": len(ev.series), "max_norm_drift": float(np.max(np.abs(norm - norm[0]))),
            "max_rel_energy_drift": float(np.max(np.abs(energy - energy[0])) / abs(energy[0])),
            "max_high_k_fraction": ev.max_high_k_fraction}


def run_compare(config: RunConfig, out: Path) -> dict:
    ev = _spectral(config)
    io.write_series(out / "observables.csv", ev.series)
    rows, summaries = [], {}
    for c in config.run["c_int"]:
        report = compare(_variational_series(config, InteractionVariant(c)), ev.series, c)
        io.write_series(out / f"compare_cint_{_label(c)}.csv", report.rows)
        summaries[_label(c)] = report.summary
        s = report.summary
        rows.append((c, s["max_abs_err_x"], s["max_abs_err_var"], s["max_rel_err_var"]))
    io.atomic_write_text(out / "compare_summary.csv", io.csv_text(
        ("c_int", "max_abs_err_x", "max_abs_err_var", "max_rel_err_var"), rows))
    return {"g": config.physics.g, "variants": summaries,
            "note": "no interaction variant is asserted correct; errors are measured against the PDE"}


def run_residuals(config: RunConfig, out: Path) -> dict:
    r, params = config.run, config.physics
    field = initial_field_from_state(initial_state(config), params, config.grid)
    n_steps = int(round(r["t_final"] / r["dt"]))
    rows = []
    for i in range(n_steps):
        before = field
        field = split_step(field, params, field.t, r["dt"], r["precision"])
        if i % r["output_every"]:
            continue
        a = io.read_snapshot(io.write_snapshot(out / "snapshots" / f"pair_{i:08d}_a.csv", before))
        b = io.read_snapshot(io.write_snapshot(out / "snapshots" / f"pair_{i:08d}_b.csv", field))
        eps = r["eps_mask"]
        rows.append((0.5 * (a.t + b.t), continuity_residual(a, b, params, eps).max_norm,
                     hamilton_jacobi_residual(a, b, params, eps).max_norm,
                     euler_residual(a, b, params, eps).max_norm))
    series = TimeSeries.from_rows(("t", "continuity", "hamilton_jacobi", "euler"), rows)
    io.write_series(out / "residuals.csv", series)
    return {name: float(series[name].max()) for name in ("continuity", "hamilton_jacobi", "euler")}


def run_converge(config: RunConfig, out: Path) -> dict:
    r, params = config.run, config.physics
    init = initial_state(config)
    dts = [r["dt"] / 2**i for i in range(r["levels"])]
    study = r["study"]
    if study == "rk4":
        rungs = rk4_ladder(params, init, r["t_final"], dts, _single_variant(config))
    elif study == "strang":
        rungs = strang_ladder(params, init, config.grid, r["t_final"], dts, r["precision"])
    else:
        g = config.grid
        grids = [type(g)(g.x_min, g.x_max, g.n * 2**i) for i in range(r["levels"])]
        rungs = residual_ladder(params, init, grids, dts, r["t_final"], r["eps_mask"], r["precision"])
    io.atomic_write_text(out / "convergence.csv", io.csv_text(
        ("quantity", "dt", "dx", "error", "order"),
        [(x.quantity, x.dt, x.dx, x.error, x.order) for x in rungs]))
    quantities = sorted({x.quantity for x in rungs})
    flags = {q: is_monotone([x.error for x in rungs if x.quantity == q]) for q in quantities}
    for q, ok in flags.items():
        if not ok:
            log.warning("non-monotone error ladder for %s", q)
    return {"study": study, "monotone": flags,
            "orders": {q: [x.order for x in rungs if x.quantity == q] for q in quantities}}


def _run_point(args):
    point_config, = args
    return run(point_config)


def run_sweep(config: RunConfig, out: Path, workers: int = 1) -> tuple[dict, int]:
    if not config.sweep:
        raise ConfigError("sweep mode needs a [sweep] section", config.source, "sweep")
    points = sweep_points(config)
    codes: list[int | None] = [None] * len(points)
    configs = {}
    for i, p in enumerate(points):
        point_dir = out / f"point_{i:03d}"
        try:
            configs[i] = with_overrides(config, p, str(point_dir))
        except ConfigError as exc:
            io.write_json(point_dir / "failure.json", {"kind": "config", "error": str(exc), "point": p})
            codes[i] = EXIT_CONFIG
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_run_point, [(c,) for c in configs.values()])
            for i, code in zip(configs, results):
                codes[i] = code
    else:
        for i, c in configs.items():
            codes[i] = run(c)
    keys = list(config.sweep)
    status = {EXIT_OK: "ok", EXIT_CONFIG: "config_error", EXIT_NUMERICAL: "numerical_failure"}
    rows = [(f"point_{i:03d}", str(code), status.get(code, "error"), *(p[k] for k in keys))
            for i, (p, code) in enumerate(zip(points, codes))]
    io.atomic_write_text(out / "index.csv", io.csv_text(("point", "exit_code", "status", *keys), rows))
    worst = max(codes)
    return {"points": len(points), "failed": sum(c != EXIT_OK for c in codes)}, worst


MODE_RUNNERS = {
    "variational": run_variational, "spectral": run_spectral, "compare": run_compare,
    "residuals": run_residuals, "converge": run_converge,
}


def run(config: RunConfig, workers: int = 1) -> int:
    """Execute the configured mode; returns the process exit code."""
    mode = config.run["mode"]
    out = Path(config.run["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    meta = {"mode": mode, "version": __version__, "config": config.to_dict()}
    try:
        if mode == "sweep":
            summary, code = run_sweep(config, out, workers)
        else:
            summary, code = MODE_RUNNERS[mode](config, out), EXIT_OK
    except ConfigError as exc:
        log.error("%s", exc)
        io.write_json(out / "failure.json", {**meta, "kind": "config", "error": str(exc)})
        return EXIT_CONFIG
    except (NumericalFailure, SpectralFailure, AliasingError, GridCoverageError) as exc:
        log.error("numerical failure: %s", exc)
        report = {**meta, "kind": type(exc).__name__, "error": str(exc)}
        last = getattr(exc, "last_good", None)
        if last is not None:
            report["last_good_state"] = vars(last)
        for attr in ("t_fail", "step_index", "t"):
            if getattr(exc, attr, None) is not None:
                report[attr] = getattr(exc, attr)
        report["traceback"] = traceback.format_exc()
        io.write_json(out / "failure.json", report)
        return EXIT_NUMERICAL
    io.write_json(out / "meta.json", {**meta, "summary": _clean(summary)})
    return code


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj
