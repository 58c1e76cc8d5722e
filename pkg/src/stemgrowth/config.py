"""Run configuration files and the built-in scenario presets.

A configuration is a JSON (or YAML) document with four sections::

    model:         alpha ("infinity" or a number), beta, kappa, gamma, delta0,
                   c_twist, c_bend, up (vector opposing gravity)
    run:           t0 (optional), t_end, ds, push_tol, push_max_iter, frame_stride
    obstacles:     list of {type: circle|sphere, center, radius}
                   or {type: half-space, point, normal}
    initial_curve: {type: parabola-arc} | {type: vertical-segment, length}
                   | {type: polyline, points}

Planar scenes use the ``(x, y)`` plane with ``up = [0, 1, 0]``, the default.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import yaml

from .curves import ParabolaArc, Polyline, VerticalSegment
from .growth import GrowthParams
from .obstacle import HalfSpace, ObstacleSet, SensingParams, Sphere
from .pushout import EnergyWeights
from .sim import ConfigError, SimConfig, prepare_initial_state
from .stem import ElongationLaw

PLANAR_UP = (0.0, 1.0, 0.0)

MODEL_DEFAULTS = {"alpha": "infinity", "gamma": 0.0, "delta0": 0.05,
                  "c_twist": 1.0, "c_bend": 1.0, "up": list(PLANAR_UP)}
RUN_DEFAULTS = {"push_tol": 1e-9, "push_max_iter": 500, "frame_stride": 1}


def _number(section: dict, key: str, prefix: str, default=None, integer=False):
    name = f"{prefix}.{key}"
    if key not in section:
        if default is None:
            raise ConfigError(name, "required key is missing")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(name, "must be finite")
    if integer:
        if int(value) != value:
            raise ConfigError(name, "must be an integer")
        return int(value)
    return float(value)


def _vector(value, name: str, sizes=(2, 3)):
    if not isinstance(value, (list, tuple)) or len(value) not in sizes:
        raise ConfigError(name, f"expected a vector with {' or '.join(map(str, sizes))} entries")
    out = []
    for j, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{name}[{j}]", "expected a finite number")
        out.append(float(v))
    return out


def _section(doc: dict, key: str) -> dict:
    if key not in doc:
        raise ConfigError(key, "required section is missing")
    if not isinstance(doc[key], dict):
        raise ConfigError(key, "expected a mapping")
    return doc[key]


def _model(doc: dict):
    m = _section(doc, "model")
    alpha_raw = m.get("alpha", MODEL_DEFAULTS["alpha"])
    if isinstance(alpha_raw, str):
        if alpha_raw.lower() not in ("infinity", "inf"):
            raise ConfigError("model.alpha", "expected a number or \"infinity\"")
        alpha = math.inf
    else:
        alpha = _number(m, "alpha", "model")
        if not alpha > 0:
            raise ConfigError("model.alpha", "must be positive")
    beta = _number(m, "beta", "model")
    kappa = _number(m, "kappa", "model")
    gamma = _number(m, "gamma", "model", MODEL_DEFAULTS["gamma"])
    delta0 = _number(m, "delta0", "model", MODEL_DEFAULTS["delta0"])
    c_twist = _number(m, "c_twist", "model", MODEL_DEFAULTS["c_twist"])
    c_bend = _number(m, "c_bend", "model", MODEL_DEFAULTS["c_bend"])
    up = _vector(m.get("up", MODEL_DEFAULTS["up"]), "model.up", sizes=(3,))
    for key, val, ok in (("beta", beta, beta >= 0), ("kappa", kappa, kappa >= 0),
                         ("gamma", gamma, gamma >= 0), ("delta0", delta0, delta0 > 0),
                         ("c_twist", c_twist, c_twist > 0), ("c_bend", c_bend, c_bend > 0)):
        if not ok:
            raise ConfigError(f"model.{key}", f"value {val!r} out of range")
    if abs(math.hypot(*up) - 1.0) > 1e-12:
        raise ConfigError("model.up", "must be a unit vector")
    params = GrowthParams(kappa=kappa, beta=beta, sensing=SensingParams(gamma, delta0),
                          law=ElongationLaw(alpha), up=tuple(up))
    return params, EnergyWeights(beta, c_twist, c_bend)


def _obstacles(doc: dict) -> ObstacleSet:
    if "obstacles" not in doc:
        raise ConfigError("obstacles", "required section is missing")
    items = doc["obstacles"]
    if not isinstance(items, list):
        raise ConfigError("obstacles", "expected a list")
    out = []
    for i, ob in enumerate(items):
        name = f"obstacles[{i}]"
        if not isinstance(ob, dict) or "type" not in ob:
            raise ConfigError(f"{name}.type", "required key is missing")
        kind = ob["type"]
        if kind in ("circle", "sphere"):
            for key in ("center", "radius"):
                if key not in ob:
                    raise ConfigError(f"{name}.{key}", "required key is missing")
            center = _vector(ob["center"], f"{name}.center")
            radius = _number(ob, "radius", name)
            if not radius > 0:
                raise ConfigError(f"{name}.radius", "must be positive")
            out.append(Sphere(center, radius))
        elif kind == "half-space":
            for key in ("point", "normal"):
                if key not in ob:
                    raise ConfigError(f"{name}.{key}", "required key is missing")
            normal = _vector(ob["normal"], f"{name}.normal")
            if abs(math.hypot(*normal) - 1.0) > 1e-12:
                raise ConfigError(f"{name}.normal", "must be a unit vector")
            out.append(HalfSpace(_vector(ob["point"], f"{name}.point"), normal))
        else:
            raise ConfigError(f"{name}.type", f"unknown obstacle type {kind!r}")
    return ObstacleSet(tuple(out))


def _curve(doc: dict):
    c = _section(doc, "initial_curve")
    kind = c.get("type")
    if kind == "parabola-arc":
        return ParabolaArc()
    if kind == "vertical-segment":
        length = _number(c, "length", "initial_curve")
        if not length > 0:
            raise ConfigError("initial_curve.length", "must be positive")
        return VerticalSegment(length)
    if kind == "polyline":
        if "points" not in c or not isinstance(c["points"], list):
            raise ConfigError("initial_curve.points", "expected a list of points")
        pts = [_vector(p, f"initial_curve.points[{i}]") for i, p in enumerate(c["points"])]
        try:
            return Polyline(tuple(tuple(p) for p in pts))
        except ValueError as exc:
            raise ConfigError("initial_curve.points", str(exc)) from None
    raise ConfigError("initial_curve.type", f"unknown curve type {kind!r}")


def config_from_dict(doc: dict, check_curve: bool = True) -> SimConfig:
    """Validate a configuration document and build the run configuration."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a mapping")
    params, weights = _model(doc)
    r = _section(doc, "run")
    t0 = _number(r, "t0", "run") if "t0" in r else None
    t_end = _number(r, "t_end", "run")
    ds = _number(r, "ds", "run")
    if not ds > 0:
        raise ConfigError("run.ds", "must be positive")
    push_tol = _number(r, "push_tol", "run", RUN_DEFAULTS["push_tol"])
    max_iter = _number(r, "push_max_iter", "run", RUN_DEFAULTS["push_max_iter"], integer=True)
    stride = _number(r, "frame_stride", "run", RUN_DEFAULTS["frame_stride"], integer=True)
    cfg = SimConfig(t_end=t_end, ds=ds, params=params, obstacles=_obstacles(doc),
                    initial_shape=_curve(doc), weights=weights, t0=t0, push_tol=push_tol,
                    push_max_iter=max_iter, frame_stride=stride)
    if check_curve:
        prepare_initial_state(cfg)
    return cfg


def config_to_dict(cfg: SimConfig) -> dict:
    p = cfg.params
    alpha = "infinity" if p.law.instantaneous else p.law.alpha
    obstacles = []
    for ob in cfg.obstacles:
        if isinstance(ob, Sphere):
            obstacles.append({"type": "circle" if ob.center[2] == 0 else "sphere",
                              "center": ob.center.tolist(), "radius": ob.radius})
        else:
            obstacles.append({"type": "half-space", "point": ob.point.tolist(),
                              "normal": ob.normal_vector.tolist()})
    run = {"t_end": cfg.t_end, "ds": cfg.ds, "push_tol": cfg.push_tol,
           "push_max_iter": cfg.push_max_iter, "frame_stride": cfg.frame_stride}
    if cfg.t0 is not None:
        run = {"t0": cfg.t0, **run}
    return {
        "model": {"alpha": alpha, "beta": p.beta, "kappa": p.kappa,
                  "gamma": p.sensing.gamma, "delta0": p.sensing.delta0,
                  "c_twist": cfg.weights.c_twist, "c_bend": cfg.weights.c_bend,
                  "up": list(p.up)},
        "run": run,
        "obstacles": obstacles,
        "initial_curve": cfg.initial_shape.to_dict(),
    }


def serialize_config(cfg: SimConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


def load_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("<file>", f"{path} is not well formed: {exc}") from None


def parse_config(path) -> SimConfig:
    """Read, validate and feasibility-check a configuration file."""
    return config_from_dict(load_document(path))


SIM1_CENTERS = {"sim1-left": 1.2, "sim1-right": 1.25}
SIM2_GAMMAS = {"sim2-gamma7": 7.0, "sim2-gamma4": 4.0, "sim2-gamma3": 3.0}
PRESETS = tuple(SIM1_CENTERS) + tuple(SIM2_GAMMAS)


def preset_dict(name: str, ds: float = 0.05) -> dict:
    """Document for a built-in scenario.

    Stem-avoidance runs start from the parabola arc and grow to total length 6;
    vine runs start from a vertical seed ten cells long and grow to length 12.
    """
    run = {"t_end": 6.0, "ds": ds, "push_tol": 1e-9, "push_max_iter": 500, "frame_stride": 1}
    if name in SIM1_CENTERS:
        return {
            "model": {"alpha": "infinity", "beta": 0.5, "kappa": 1.0, "gamma": 0.0,
                      "delta0": 0.05, "c_twist": 1.0, "c_bend": 1.0, "up": list(PLANAR_UP)},
            "run": run,
            "obstacles": [{"type": "circle", "center": [SIM1_CENTERS[name], 1.5, 0.0],
                           "radius": 0.5}],
            "initial_curve": {"type": "parabola-arc"},
        }
    if name in SIM2_GAMMAS:
        return {
            "model": {"alpha": "infinity", "beta": 2.0, "kappa": 1.0,
                      "gamma": SIM2_GAMMAS[name], "delta0": 0.05, "c_twist": 1.0,
                      "c_bend": 1.0, "up": list(PLANAR_UP)},
            "run": {**run, "t_end": 12.0},
            "obstacles": [{"type": "circle", "center": [0.1, 1.5, 0.0], "radius": 0.5},
                          {"type": "circle", "center": [0.6, 4.0, 0.0], "radius": 1.0}],
            "initial_curve": {"type": "vertical-segment", "length": 10 * ds},
        }
    raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def preset(name: str, ds: float = 0.05) -> SimConfig:
    return config_from_dict(preset_dict(name, ds))
