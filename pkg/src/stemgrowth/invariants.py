"""Structural invariant checks on a short simulation run."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geom import rotation_matrices
from .growth import growth_rotation_field
from .output import frames_csv
from .sim import SimConfig, prepare_initial_state, run
from .stem import StemState, penetration_depth

ORTHOGONALITY_TOL = 1e-12
UNIT_TANGENT_TOL = 1e-8


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool | None
    value: float
    tolerance: float
    detail: str = ""

    @property
    def label(self) -> str:
        return {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]

    def line(self) -> str:
        return f"{self.label} {self.name}: value={self.value:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


def short_config(cfg: SimConfig, steps: int) -> SimConfig:
    """The same scenario cut to ``steps`` steps with every frame logged."""
    state = prepare_initial_state(cfg)
    return replace(cfg, t_end=state.t + steps * cfg.ds, frame_stride=1)


def _states(log, cfg):
    return [StemState(t=fr.t, ds=cfg.ds, tangents=fr.tangents, positions=fr.positions,
                      t0=log.frames[0].t, law=cfg.params.law) for fr in log.frames]


def _is_planar_config(cfg: SimConfig, state: StemState) -> bool:
    if cfg.params.up_vector[2] != 0.0 or np.any(state.positions[:, 2] != 0.0):
        return False
    if np.any(state.tangents[:, 2] != 0.0):
        return False
    for ob in cfg.obstacles:
        c = getattr(ob, "center", None)
        if c is not None and c[2] != 0.0:
            return False
        nv = getattr(ob, "normal_vector", None)
        if nv is not None and nv[2] != 0.0:
            return False
    return True


def check_invariants(cfg: SimConfig, steps: int = 100) -> list[PropertyResult]:
    """Run ``steps`` steps and evaluate the structural properties on every frame."""
    short = short_config(cfg, steps)
    out = run(short)
    states = _states(out.log, short)
    results = []

    worst = 0.0
    for st in states:
        field = growth_rotation_field(st, short.params, short.obstacles, short.dt)
        R = rotation_matrices(field)
        gram = np.swapaxes(R, 1, 2) @ R
        worst = max(worst, float(np.abs(gram - np.eye(3)).max()),
                    float(np.abs(np.linalg.det(R) - 1.0).max()))
    results.append(PropertyResult("rotation_orthogonality", worst <= ORTHOGONALITY_TOL,
                                  worst, ORTHOGONALITY_TOL))

    drift = max(float(np.abs(np.linalg.norm(st.tangents, axis=1) - 1.0).max()) for st in states)
    results.append(PropertyResult("unit_tangents", drift <= UNIT_TANGENT_TOL, drift,
                                  UNIT_TANGENT_TOL, f"over {out.steps} steps"))

    if _is_planar_config(short, states[0]):
        z = max(float(np.abs(st.positions[:, 2]).max()) + float(np.abs(st.tangents[:, 2]).max())
                for st in states)
        results.append(PropertyResult("planarity_closure", z == 0.0, z, 0.0))
    else:
        results.append(PropertyResult("planarity_closure", None, 0.0, 0.0, "non-planar scene"))

    depth = max(penetration_depth(st, short.obstacles) for st in states) if len(short.obstacles) else 0.0
    results.append(PropertyResult("feasibility", depth <= short.push_tol, depth, short.push_tol,
                                  f"{len(states)} frames"))

    again = run(short)
    same = frames_csv(out.log, short.obstacles) == frames_csv(again.log, short.obstacles)
    results.append(PropertyResult("determinism", same, 0.0 if same else 1.0, 0.0,
                                  "byte-identical rerun" if same else "rerun differs"))

    if len(short.obstacles) == 0:
        other = run(replace(short, push_tol=short.push_tol * 10, push_max_iter=1))
        same = frames_csv(out.log) == frames_csv(other.log)
        results.append(PropertyResult("free_growth_push_independent", same,
                                      0.0 if same else 1.0, 0.0))
    return results
