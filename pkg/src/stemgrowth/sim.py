"""Operator-splitting driver: grow, elongate, push out, check for breakdown."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .breakdown import BreakdownReport, check_breakdown
from .contact import _atom_field
from .curves import initial_state
from .geom import cumulative_trapezoid
from .growth import GrowthParams, apply_growth_step, kernel_along_stem
from .obstacle import ObstacleSet, signed_distance
from .pushout import (BreakdownProximityError, ContactMeasure, EnergyWeights,
                      PushNonConvergenceError, field_norm, push_out, weighted_push_out)
from .stem import StemState, contact_set, elongate, penetration_depth

CONTACT_TOL = 1e-6


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SimConfig:
    t_end: float
    ds: float
    params: GrowthParams
    obstacles: ObstacleSet
    initial_shape: object
    weights: EnergyWeights | None = None
    t0: float | None = None
    push_tol: float = 1e-9
    push_max_iter: int = 500
    frame_stride: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.ds) and self.ds > 0):
            raise ConfigError("run.ds", "must be a positive number")
        if not math.isfinite(self.t_end):
            raise ConfigError("run.t_end", "must be finite")
        if not self.push_tol > 0:
            raise ConfigError("run.push_tol", "must be positive")
        if self.push_max_iter < 1:
            raise ConfigError("run.push_max_iter", "must be at least 1")
        if self.frame_stride < 1:
            raise ConfigError("run.frame_stride", "must be at least 1")
        if self.weights is None:
            object.__setattr__(self, "weights", EnergyWeights(self.params.beta))
        elif self.weights.beta != self.params.beta:
            raise ConfigError("model.beta", "energy weights and growth model disagree")

    @property
    def dt(self) -> float:
        return self.ds


@dataclass
class Frame:
    index: int
    t: float
    positions: np.ndarray
    tangents: np.ndarray
    contact_indices: np.ndarray
    measure: ContactMeasure = field(default_factory=ContactMeasure)
    penetration_before_push: float = 0.0
    push_iterations: int = 0
    omega_norm: float = 0.0
    measure_mass: float = 0.0


@dataclass
class FrameLog:
    ds: float
    stride: int
    frames: list = field(default_factory=list)

    def __len__(self):
        return len(self.frames)

    @property
    def last(self) -> Frame:
        return self.frames[-1]


@dataclass
class RunOutcome:
    status: str
    t: float
    log: FrameLog
    report: BreakdownReport | None = None
    residual: float | None = None
    message: str = ""
    max_step_omega_norm: float = 0.0
    max_step_measure_mass: float = 0.0
    steps: int = 0


def prepare_initial_state(cfg: SimConfig) -> StemState:
    """Resample the initial curve and check that it is admissible."""
    state = initial_state(cfg.initial_shape, cfg.ds, cfg.params.law, cfg.params.up)
    if state.n_nodes < 2:
        raise ConfigError("initial_curve", "curve is shorter than one grid cell")
    if cfg.t0 is not None and abs(cfg.t0 - state.t) > cfg.ds:
        raise ConfigError("run.t0", f"must match the resampled curve length {state.t:.6g}")
    if cfg.t_end < state.t - 1e-12:
        raise ConfigError("run.t_end", "must not precede the initial time")
    if len(cfg.obstacles):
        phi = signed_distance(cfg.obstacles, state.positions)
        if phi[0] <= 0:
            raise ConfigError("initial_curve", "the root must lie outside the obstacles")
        if -phi.min() > cfg.push_tol:
            raise ConfigError("initial_curve",
                              f"initial curve penetrates an obstacle by {-phi.min():.3g}")
    return state


def n_steps(cfg: SimConfig, state: StemState) -> int:
    return max(0, int(round((cfg.t_end - state.t) / cfg.dt)))


def step(state: StemState, cfg: SimConfig, t_next: float | None = None):
    """One splitting step. Returns the feasible state and the step metadata."""
    grown = apply_growth_step(state, cfg.params, cfg.obstacles, cfg.dt)
    if t_next is not None:
        grown = replace(grown, t=t_next)
    grown = elongate(grown)
    depth = penetration_depth(grown, cfg.obstacles)
    if cfg.weights.isotropic:
        out = push_out(grown, cfg.obstacles, cfg.params.beta, cfg.push_tol,
                       cfg.push_max_iter, return_iterations=True)
    else:
        out = weighted_push_out(grown, cfg.obstacles, cfg.weights, cfg.push_tol,
                                cfg.push_max_iter, return_iterations=True)
    new, mu, total, iterations = out
    meta = {
        "penetration_before_push": depth,
        "push_iterations": iterations,
        "measure": mu,
        "omega_norm": field_norm(total, grown),
        "measure_mass": mu.mass,
        "pre_push": grown,
    }
    return new, meta


def _frame(index, state, cfg, meta=None) -> Frame:
    contacts = (contact_set(state, cfg.obstacles, CONTACT_TOL).indices
                if len(cfg.obstacles) else np.zeros(0, dtype=int))
    fr = Frame(index=index, t=state.t, positions=state.positions.copy(),
               tangents=state.tangents.copy(), contact_indices=contacts)
    if meta is not None:
        fr.measure = meta["measure"]
        fr.penetration_before_push = meta["penetration_before_push"]
        fr.push_iterations = meta["push_iterations"]
        fr.omega_norm = meta["omega_norm"]
        fr.measure_mass = meta["measure_mass"]
    return fr


def run(cfg: SimConfig, state: StemState | None = None) -> RunOutcome:
    """Integrate from the initial curve to ``t_end`` or until breakdown."""
    if state is None:
        state = prepare_initial_state(cfg)
    t_start = state.t
    total = n_steps(cfg, state)
    log = FrameLog(ds=cfg.ds, stride=cfg.frame_stride)
    log.frames.append(_frame(0, state, cfg))
    out = RunOutcome(status="completed", t=state.t, log=log)
    for k in range(1, total + 1):
        t_next = t_start + k * cfg.dt
        try:
            state, meta = step(state, cfg, t_next)
        except BreakdownProximityError as exc:
            return _proximity_outcome(out, state, cfg, t_next, exc)
        except PushNonConvergenceError as exc:
            out.status, out.t, out.residual, out.message = \
                "push_failure", t_next, exc.residual, str(exc)
            return out
        out.steps = k
        out.t = state.t
        out.max_step_omega_norm = max(out.max_step_omega_norm, meta["omega_norm"])
        out.max_step_measure_mass = max(out.max_step_measure_mass, meta["measure_mass"])
        report = check_breakdown(state, cfg.obstacles) if len(cfg.obstacles) else None
        stop = report is not None and report.is_breakdown
        if k % cfg.frame_stride == 0 or k == total or stop:
            log.frames.append(_frame(k, state, cfg, meta))
        if stop:
            out.status, out.report = "breakdown", report
            return out
    return out


def _proximity_outcome(out: RunOutcome, state: StemState, cfg: SimConfig, t_next: float,
                       exc: BreakdownProximityError) -> RunOutcome:
    """Classify a singular push: breakdown if the stuck configuration is reached."""
    grown = elongate(replace(apply_growth_step(state, cfg.params, cfg.obstacles, cfg.dt),
                             t=t_next))
    depth = penetration_depth(grown, cfg.obstacles)
    report = check_breakdown(grown, cfg.obstacles, tol_dist=max(depth, 1e-6) * (1 + 1e-9))
    out.t = t_next
    out.message = str(exc)
    if report.is_breakdown:
        out.status, out.report = "breakdown", report
    else:
        out.status, out.residual = "push_failure", depth
    return out


def _stem_velocity(state: StemState, density, grid_s: np.ndarray) -> np.ndarray:
    """``int_0^{min(s, s_tip)} density(sigma) x (P(s) - P(sigma)) d sigma`` on a grid.

    Beyond the tip the stem is continued along its tip tangent.
    """
    a = cumulative_trapezoid(density, state.ds)
    b = cumulative_trapezoid(np.cross(density, state.positions), state.ds)
    n = state.n_nodes
    m = grid_s.size
    pos = np.empty((m, 3))
    inside = min(m, n)
    pos[:inside] = state.positions[:inside]
    if m > n:
        extra = grid_s[n:] - state.s_last
        slope = state.length_weights()[-1] * state.tip_tangent
        pos[n:] = state.tip + extra[:, None] * slope
    idx = np.minimum(np.arange(m), n - 1)
    return np.cross(a[idx], pos) - b[idx]


def integral_residual(log: FrameLog, cfg: SimConfig) -> float:
    """Largest mismatch between logged positions and the integrated dynamics.

    The right-hand side is the initial curve (continued beyond its tip) plus
    the time-trapezoid integral of the growth velocity and the displacements
    generated by each step's contact measure. Growth terms are evaluated on
    logged frames, contact terms on the state each measure was computed for.
    """
    if log.stride != 1:
        raise ValueError("integral residual needs every step logged (frame stride 1)")
    if not cfg.params.law.instantaneous:
        raise ValueError("integral residual is implemented for the arc-length law only")
    if len(log) == 0:
        raise ValueError("empty frame log")
    frames = log.frames
    n_final = frames[-1].positions.shape[0]
    grid = cfg.ds * np.arange(n_final)
    states = [StemState(t=fr.t, ds=cfg.ds, tangents=fr.tangents, positions=fr.positions,
                        t0=frames[0].t, law=cfg.params.law) for fr in frames]

    def growth_velocity(st):
        return _stem_velocity(st, kernel_along_stem(st, cfg.params, cfg.obstacles), grid)

    first = states[0]
    rhs = np.empty((n_final, 3))
    n0 = first.n_nodes
    rhs[:n0] = first.positions
    rhs[n0:] = first.tip + (grid[n0:] - first.s_last)[:, None] * first.tip_tangent
    worst = 0.0
    g_prev = growth_velocity(first)
    for j in range(1, len(frames)):
        st = states[j]
        g_cur = growth_velocity(st)
        rhs += 0.5 * cfg.dt * (g_prev + g_cur)
        if len(frames[j].measure):
            # the measure was computed on the pre-push state, rebuilt here exactly
            pre = elongate(replace(
                apply_growth_step(states[j - 1], cfg.params, cfg.obstacles, cfg.dt), t=st.t))
            omega = _atom_field(pre, cfg.obstacles, frames[j].measure, cfg.params.beta)
            rhs += _stem_velocity(pre, omega, grid)
        g_prev = g_cur
        n = st.n_nodes
        worst = max(worst, float(np.max(np.linalg.norm(st.positions - rhs[:n], axis=1))))
    return worst
