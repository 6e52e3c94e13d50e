"""Sectioned key-value run configuration.

Example::

    [physics]
    g = 1.0
    trap = modulated
    omega2 = 1.0
    epsilon = 0.2
    big_omega = 2.0

    [initial]
    x0 = 1.0
    sigma0 = 1.0

    [grid]
    x_min = -16
    x_max = 16
    n = 512

    [run]
    t_final = 6.283
    dt = 1e-3
    c_int = 2, 4, -2

An optional ``[sweep]`` section maps ``section.key`` to a comma-separated
list of values; the sweep runs the cartesian product.
"""
from __future__ import annotations

import configparser
import difflib
import itertools
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..core import (Constant, Modulated, ParameterError, PhysicsParams, PiecewiseConstant,
                    Tabulated, validate_params)
from ..fields import Grid
from ..madelung import DEFAULT_EPS_MASK
from ..spectral import PRECISIONS

MODES = ("variational", "spectral", "compare", "residuals", "converge", "sweep")
STUDIES = ("rk4", "strang", "residuals")
TRAPS = ("constant", "piecewise", "modulated", "tabulated")

# key -> (parser name, default); REQUIRED marks keys without a default
REQUIRED = object()
SCHEMA = {
    "physics": {
        "mass": ("float", 1.0), "hbar": ("float", 1.0), "g": ("float", 0.0),
        "trap": ("str", "constant"), "omega2": ("float", 1.0), "epsilon": ("float", 0.0),
        "big_omega": ("float", 1.0), "breakpoints": ("floats", ()), "values": ("floats", ()),
        "table": ("pairs", ()),
    },
    "initial": {
        "x0": ("float", 0.0), "v0": ("float", 0.0), "sigma0": ("float", 1.0),
        "sigma_dot0": ("float", 0.0),
    },
    "grid": {"x_min": ("float", -16.0), "x_max": ("float", 16.0), "n": ("int", 512)},
    "run": {
        "mode": ("str", "variational"), "t_final": ("float", REQUIRED), "dt": ("float", 1e-3),
        "output_every": ("int", 10), "out_dir": ("str", "gpwave_out"), "c_int": ("floats", (2.0,)),
        "method": ("str", "rk4"), "tol": ("float", 1e-10), "eps_mask": ("float", DEFAULT_EPS_MASK),
        "precision": ("str", "extended"), "snapshot_every": ("int", 0), "n_seeds": ("int", 11),
        "study": ("str", "rk4"), "levels": ("int", 4), "point_mode": ("str", "variational"),
    },
}


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""

    def __init__(self, message: str, path=None, section=None, key=None):
        where = ""
        if path is not None:
            where += f"{path}: "
        if section is not None:
            where += f"[{section}]" + (f".{key}" if key else "") + ": "
        super().__init__(where + message)
        self.path, self.section, self.key = path, section, key


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    return tuple(float(v) for v in text.split(",")) if text else ()


def _pairs(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in filter(None, (p.strip() for p in text.split(","))):
        t, v = item.split(":")
        out.append((float(t), float(v)))
    return tuple(out)


PARSERS = {"float": float, "int": int, "str": str.strip, "floats": _floats, "pairs": _pairs}


@dataclass(frozen=True)
class RunConfig:
    physics: PhysicsParams
    initial: dict
    grid: Grid
    run: dict
    sweep: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    source: str | None = None

    @property
    def c_int(self) -> float:
        return self.run["c_int"][0]

    def to_dict(self) -> dict:
        return {sec: dict(vals) for sec, vals in self.raw.items()}


def _suggest(key, known):
    close = difflib.get_close_matches(key, known, n=1)
    return f" (did you mean '{close[0]}'?)" if close else ""


def _build_trap(p, path):
    kind = p["trap"]
    try:
        if kind == "constant":
            return Constant(p["omega2"])
        if kind == "modulated":
            return Modulated(p["omega2"], p["epsilon"], p["big_omega"])
        if kind == "piecewise":
            return PiecewiseConstant(p["breakpoints"], p["values"])
        if kind == "tabulated":
            return Tabulated.from_pairs(p["table"])
    except ValueError as exc:
        raise ConfigError(str(exc), path, "physics", "trap") from None
    raise ConfigError(f"unknown trap '{kind}', expected one of {', '.join(TRAPS)}", path, "physics", "trap")


def parse_sections(sections: dict[str, dict[str, str]], path=None) -> RunConfig:
    """Validate raw string sections and build a RunConfig with defaults applied."""
    parsed: dict[str, dict] = {}
    sweep_raw = dict(sections.get("sweep", {}))
    for name in sections:
        if name not in SCHEMA and name != "sweep":
            raise ConfigError(f"unknown section{_suggest(name, list(SCHEMA) + ['sweep'])}", path, name)
    for sec, keys in SCHEMA.items():
        given = sections.get(sec, {})
        for key in given:
            if key not in keys:
                raise ConfigError(f"unknown key{_suggest(key, list(keys))}", path, sec, key)
        out = {}
        for key, (kind, default) in keys.items():
            if key in given:
                try:
                    out[key] = PARSERS[kind](given[key])
                except ValueError:
                    raise ConfigError(f"cannot parse {given[key]!r} as {kind}", path, sec, key) from None
            elif default is REQUIRED:
                raise ConfigError("required key missing", path, sec, key)
            else:
                out[key] = default
        parsed[sec] = out

    ph = parsed["physics"]
    physics = PhysicsParams(g=ph["g"], trap=_build_trap(ph, path), mass=ph["mass"], hbar=ph["hbar"])
    try:
        validate_params(physics)
    except ParameterError as exc:
        first = next(iter(exc.problems))
        key = first.split(".")[-1] if first.startswith("trap.") else first
        raise ConfigError(str(exc), path, "physics", key) from None

    g = parsed["grid"]
    try:
        grid = Grid(g["x_min"], g["x_max"], g["n"])
    except ValueError as exc:
        raise ConfigError(str(exc), path, "grid") from None

    ini = parsed["initial"]
    for key, value in ini.items():
        if not math.isfinite(value):
            raise ConfigError("must be finite", path, "initial", key)
    if not ini["sigma0"] > 0:
        raise ConfigError("must be > 0", path, "initial", "sigma0")

    run = parsed["run"]
    checks = [
        ("mode", run["mode"] in MODES, f"must be one of {', '.join(MODES)}"),
        ("t_final", run["t_final"] > 0, "must be > 0"),
        ("dt", run["dt"] > 0, "must be > 0"),
        ("output_every", run["output_every"] >= 1, "must be >= 1"),
        ("method", run["method"] in ("rk4", "rk45"), "must be rk4 or rk45"),
        ("tol", run["tol"] > 0, "must be > 0"),
        ("eps_mask", 0 < run["eps_mask"] < 1, "must lie in (0, 1)"),
        ("precision", run["precision"] in PRECISIONS, f"must be one of {', '.join(PRECISIONS)}"),
        ("snapshot_every", run["snapshot_every"] >= 0, "must be >= 0"),
        ("n_seeds", run["n_seeds"] >= 1, "must be >= 1"),
        ("study", run["study"] in STUDIES, f"must be one of {', '.join(STUDIES)}"),
        ("levels", run["levels"] >= 3, "convergence ladders need >= 3 levels"),
        ("point_mode", run["point_mode"] in MODES and run["point_mode"] != "sweep",
         "must name a non-sweep mode"),
        ("c_int", len(run["c_int"]) >= 1 and all(math.isfinite(c) for c in run["c_int"]),
         "need at least one finite value"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(msg, path, "run", key)

    sweep = {}
    for dotted, values in sweep_raw.items():
        sec, _, key = dotted.partition(".")
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"sweep target must be section.key of a known key{_suggest(dotted, [f'{s}.{k}' for s in SCHEMA for k in SCHEMA[s]])}",
                              path, "sweep", dotted)
        items = [v.strip() for v in values.split(",") if v.strip()] if SCHEMA[sec][key][0] not in ("floats", "pairs") \
            else [v.strip() for v in values.split(";") if v.strip()]
        if not items:
            raise ConfigError("needs at least one value", path, "sweep", dotted)
        sweep[dotted] = items

    raw = {sec: dict(vals) for sec, vals in sections.items() if sec != "sweep"}
    return RunConfig(physics, ini, grid, run, sweep, raw, None if path is None else str(path))


def read_sections(path) -> dict[str, dict[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file not found", path)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}", path) from None
    return {sec: dict(cp[sec]) for sec in cp.sections()}


def apply_overrides(sections: dict, overrides) -> dict:
    """Apply ``section.key=value`` strings on top of ``sections``."""
    out = {sec: dict(vals) for sec, vals in sections.items()}
    for item in overrides or ():
        target, sep, value = item.partition("=")
        sec, dot, key = target.strip().partition(".")
        if not sep or not dot or not key:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        out.setdefault(sec, {})[key] = value.strip()
    return out


def load_config(path, overrides=None, env=None) -> RunConfig:
    """Read, override and validate a config file.

    ``env`` (default: none) may carry ``GPWAVE_OUT``, which replaces
    ``[run].out_dir`` unless an explicit ``--set run.out_dir`` is given.
    """
    sections = read_sections(path)
    if env and env.get("GPWAVE_OUT"):
        sections.setdefault("run", {})["out_dir"] = env["GPWAVE_OUT"]
    sections = apply_overrides(sections, overrides)
    return parse_sections(sections, path)


def sweep_points(config: RunConfig) -> list[dict[str, str]]:
    keys = list(config.sweep)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(config.sweep[k] for k in keys))]


def with_overrides(config: RunConfig, point: dict[str, str], out_dir: str) -> RunConfig:
    sections = apply_overrides(config.raw, [f"{k}={v}" for k, v in point.items()])
    sections.setdefault("run", {})["out_dir"] = out_dir
    sections["run"]["mode"] = config.run["point_mode"]
    new = parse_sections(sections, config.source)
    return replace(new, sweep={})
