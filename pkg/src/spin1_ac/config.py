"""JSON run configuration and sweep specifications."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .ac_phase import Circle, Polygon, ParticleState, QuadSettings, check_clearance, SingularPath
from .em_fields import Filament, LineChargeField, LinearField
from .moyal_deformation import InvalidNCParams, NCParams

SCHEMA_VERSION = 1
SWEEP_PARAMETERS = ("theta", "alpha", "radius", "s3")


class ConfigError(ValueError):
    pass


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    if key not in d:
        raise ConfigError(f"{where}.{key}: missing")
    return d[key]


def _num(d: dict, key: str, where: str, default=None) -> float:
    v = d.get(key, default) if default is not None else _require(d, key, where)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


@dataclass(frozen=True)
class ConvergenceSettings:
    theta_grid: tuple = tuple(np.logspace(-4, -1, 7).tolist())
    momentum: Optional[tuple] = None
    linear_field: Optional[LinearField] = None


@dataclass(frozen=True)
class RunConfig:
    filaments: tuple
    loop: object
    particle: ParticleState
    nc: NCParams
    quadrature: QuadSettings = QuadSettings()
    convergence: ConvergenceSettings = ConvergenceSettings()

    @property
    def field(self) -> LineChargeField:
        return LineChargeField(self.filaments)

    def to_dict(self) -> dict:
        if isinstance(self.loop, Circle):
            loop = {"type": "circle", "cx": self.loop.cx, "cy": self.loop.cy,
                    "r": self.loop.radius, "winding": self.loop.winding}
        else:
            loop = {"type": "polygon", "vertices": [list(v) for v in self.loop.vertices]}
        p = self.particle
        out = {
            "schema": SCHEMA_VERSION,
            "filaments": [{"x": f.x, "y": f.y, "lambda_e": f.lambda_e} for f in self.filaments],
            "loop": loop,
            "particle": {"m": p.m, "mu_m": p.mu_m, "s3": p.s3, "kx": p.k[0], "ky": p.k[1]},
            "nc": {"theta": self.nc.theta, "alpha": self.nc.alpha},
            "quadrature": {"rel_tol": self.quadrature.rel_tol, "max_panels": self.quadrature.max_panels},
        }
        conv = {"theta_grid": list(self.convergence.theta_grid)}
        if self.convergence.momentum is not None:
            conv["momentum"] = list(self.convergence.momentum)
        if self.convergence.linear_field is not None:
            lf = self.convergence.linear_field
            conv["linear_field"] = {"e0": list(lf.e0), "jacobian": [list(r) for r in lf.jacobian]}
        out["convergence"] = conv
        return out


def _parse_loop(d) -> object:
    kind = _require(d, "type", "loop")
    try:
        if kind == "circle":
            r = _num(d, "r", "loop")
            if r <= 0:
                raise ConfigError(f"loop.r: radius must be positive, got {r}")
            w = d.get("winding", 1)
            if not isinstance(w, int) or isinstance(w, bool) or w == 0:
                raise ConfigError(f"loop.winding: expected a non-zero integer, got {w!r}")
            return Circle(_num(d, "cx", "loop", 0.0), _num(d, "cy", "loop", 0.0), r, w)
        if kind == "polygon":
            verts = _require(d, "vertices", "loop")
            if not isinstance(verts, list) or not all(isinstance(v, list) and len(v) == 2 for v in verts):
                raise ConfigError("loop.vertices: expected a list of [x, y] pairs")
            return Polygon(tuple(tuple(float(c) for c in v) for v in verts))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"loop: {exc}") from None
    raise ConfigError(f"loop.type: expected 'circle' or 'polygon', got {kind!r}")


def _parse_convergence(d) -> ConvergenceSettings:
    if d is None:
        return ConvergenceSettings()
    if not isinstance(d, dict):
        raise ConfigError("convergence: expected an object")
    kw = {}
    if "theta_grid" in d:
        grid = d["theta_grid"]
        if not isinstance(grid, list) or not all(isinstance(t, (int, float)) for t in grid):
            raise ConfigError("convergence.theta_grid: expected a list of numbers")
        kw["theta_grid"] = tuple(float(t) for t in grid)
    if "momentum" in d:
        m = d["momentum"]
        if not isinstance(m, list) or len(m) != 2:
            raise ConfigError("convergence.momentum: expected [px, py]")
        kw["momentum"] = (float(m[0]), float(m[1]))
    if "linear_field" in d:
        lf = d["linear_field"]
        try:
            e0 = tuple(float(c) for c in lf.get("e0", [0.0, 0.0]))
            jac = tuple(tuple(float(c) for c in row) for row in _require(lf, "jacobian", "convergence.linear_field"))
            if len(e0) != 2 or len(jac) != 2 or any(len(r) != 2 for r in jac):
                raise ValueError
        except (TypeError, ValueError, AttributeError):
            raise ConfigError("convergence.linear_field: expected {e0: [a, b], jacobian: [[..], [..]]}") from None
        kw["linear_field"] = LinearField(e0, jac)
    return ConvergenceSettings(**kw)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"schema: expected {SCHEMA_VERSION}, got {data.get('schema')!r}")

    fils = _require(data, "filaments", "config")
    if not isinstance(fils, list):
        raise ConfigError("filaments: expected a list")
    filaments = tuple(
        Filament(_num(f, "x", f"filaments[{i}]"), _num(f, "y", f"filaments[{i}]"),
                 _num(f, "lambda_e", f"filaments[{i}]"))
        for i, f in enumerate(fils)
    )

    loop = _parse_loop(_require(data, "loop", "config"))

    pd = _require(data, "particle", "config")
    s3 = _require(pd, "s3", "particle")
    if s3 not in (-1, 0, 1) or isinstance(s3, bool):
        raise ConfigError(f"particle.s3: must be -1, 0 or 1, got {s3!r}")
    m = _num(pd, "m", "particle", 1.0)
    if m <= 0:
        raise ConfigError(f"particle.m: must be positive, got {m}")
    particle = ParticleState(m, _num(pd, "mu_m", "particle"), int(s3),
                             (_num(pd, "kx", "particle", 0.0), _num(pd, "ky", "particle", 0.0)))

    nd = data.get("nc", {})
    alpha = _num(nd, "alpha", "nc", 1.0)
    if not 0 < alpha <= 1:
        raise ConfigError(f"nc.alpha: must lie in (0, 1], got {alpha}")
    try:
        nc = NCParams(_num(nd, "theta", "nc", 0.0), alpha)
    except InvalidNCParams as exc:
        raise ConfigError(f"nc: {exc}") from None

    qd = data.get("quadrature", {})
    rel_tol = _num(qd, "rel_tol", "quadrature", 1e-10)
    max_panels = _num(qd, "max_panels", "quadrature", 1e6)
    if rel_tol <= 0 or max_panels < 1:
        raise ConfigError("quadrature: rel_tol must be positive and max_panels at least 1")

    cfg = RunConfig(filaments, loop, particle, nc, QuadSettings(rel_tol, int(max_panels)),
                    _parse_convergence(data.get("convergence")))
    try:
        check_clearance(cfg.loop, cfg.field)
    except SingularPath as exc:
        raise ConfigError(f"loop: {exc}") from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(data)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep.parameter: expected one of {SWEEP_PARAMETERS}, got {self.parameter!r}")
        if len(self.values) < 2:
            raise ConfigError("sweep: need at least 2 values")

    @classmethod
    def from_dict(cls, d: dict) -> SweepSpec:
        param = _require(d, "parameter", "sweep")
        vals = _require(d, "values", "sweep")
        if isinstance(vals, list):
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                raise ConfigError("sweep.values: expected numbers")
            return cls(param, tuple(float(v) for v in vals))
        if isinstance(vals, dict):
            start, stop = _num(vals, "start", "sweep.values"), _num(vals, "stop", "sweep.values")
            count = _require(vals, "count", "sweep.values")
            scale = vals.get("scale", "linear")
            if not isinstance(count, int) or count < 2:
                raise ConfigError("sweep.values.count: must be an integer >= 2")
            if scale == "linear":
                grid = np.linspace(start, stop, count)
            elif scale == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError("sweep.values: log scale requires positive endpoints")
                grid = np.geomspace(start, stop, count)
            else:
                raise ConfigError(f"sweep.values.scale: expected 'linear' or 'log', got {scale!r}")
            return cls(param, tuple(float(v) for v in grid))
        raise ConfigError("sweep.values: expected a list or {start, stop, count, scale}")

    def apply(self, cfg: RunConfig, value: float) -> RunConfig:
        """Return ``cfg`` with the swept parameter set to ``value``."""
        try:
            if self.parameter == "theta":
                return replace(cfg, nc=NCParams(value, cfg.nc.alpha))
            if self.parameter == "alpha":
                return replace(cfg, nc=NCParams(cfg.nc.theta, value))
            if self.parameter == "s3":
                if value not in (-1.0, 0.0, 1.0):
                    raise ConfigError(f"sweep: s3 value {value} is not -1, 0 or 1")
                return replace(cfg, particle=replace(cfg.particle, s3=int(value)))
            if not isinstance(cfg.loop, Circle):
                raise ConfigError("sweep: radius sweeps need a circular loop")
            out = replace(cfg, loop=replace(cfg.loop, radius=value))
            check_clearance(out.loop, out.field)
            return out
        except (InvalidNCParams, SingularPath, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"sweep {self.parameter}={value}: {exc}") from None
