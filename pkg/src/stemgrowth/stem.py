"""The discretized growing stem.

Tangents are the primary state. Positions are always derived from them by a
cumulative trapezoid rule, weighted by the elongation factor of each cell.
Node ``i`` is the cell born at time ``s_i = i * ds``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geom import cumulative_trapezoid
from .obstacle import ObstacleSet, signed_distance


@dataclass(frozen=True)
class ElongationLaw:
    """Cell length factor ``1 - exp(-alpha * age)``; ``alpha = inf`` means no lag."""

    alpha: float = math.inf

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def instantaneous(self) -> bool:
        return math.isinf(self.alpha)

    def weights(self, t: float, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.instantaneous:
            return np.ones_like(s)
        age = np.maximum(t - s, 0.0)
        return -np.expm1(-self.alpha * age)

    def total_length(self, t: float) -> float:
        if self.instantaneous:
            return t
        return t - (1.0 - math.exp(-self.alpha * t)) / self.alpha


@dataclass(frozen=True)
class StemState:
    t: float
    ds: float
    tangents: np.ndarray
    positions: np.ndarray
    t0: float = 0.0
    law: ElongationLaw = field(default_factory=ElongationLaw)

    @property
    def n_nodes(self) -> int:
        return self.tangents.shape[0]

    @property
    def s(self) -> np.ndarray:
        return self.ds * np.arange(self.n_nodes)

    @property
    def s_last(self) -> float:
        return self.ds * (self.n_nodes - 1)

    @property
    def tip(self) -> np.ndarray:
        return self.positions[-1]

    @property
    def tip_tangent(self) -> np.ndarray:
        return self.tangents[-1]

    def length_weights(self) -> np.ndarray:
        return self.law.weights(self.t, self.s)

    def with_tangents(self, tangents, t: float | None = None) -> "StemState":
        """New state with replaced tangents (and time); positions rebuilt."""
        new = replace(self, tangents=np.asarray(tangents, dtype=float),
                      t=self.t if t is None else t)
        return rebuild_positions(new)


@dataclass(frozen=True)
class ContactSet:
    indices: np.ndarray
    tolerance: float

    def __contains__(self, i) -> bool:
        return int(i) in set(self.indices.tolist())

    def __len__(self):
        return self.indices.size


def rebuild_positions(state: StemState, law: ElongationLaw | None = None) -> StemState:
    """Positions as the running integral of the weighted tangents, rooted at 0."""
    law = state.law if law is None else law
    w = law.weights(state.t, state.s)
    pos = cumulative_trapezoid(w[:, None] * state.tangents, state.ds)
    return replace(state, positions=pos, law=law)


def make_state(tangents, ds: float, t: float | None = None,
               law: ElongationLaw | None = None, t0: float | None = None) -> StemState:
    tangents = np.asarray(tangents, dtype=float).reshape(-1, 3)
    if tangents.shape[0] < 1:
        raise ValueError("a stem needs at least the root node")
    if not ds > 0:
        raise ValueError("ds must be positive")
    t = ds * (tangents.shape[0] - 1) if t is None else float(t)
    state = StemState(t=t, t0=t if t0 is None else t0, ds=ds, tangents=tangents,
                      positions=np.zeros_like(tangents), law=law or ElongationLaw())
    return rebuild_positions(state)


def straight_state(direction, n_nodes: int, ds: float, **kw) -> StemState:
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return make_state(np.tile(d, (n_nodes, 1)), ds, **kw)


def state_from_curve(points, ds: float, tangents=None, law: ElongationLaw | None = None,
                     ) -> StemState:
    """Resample a densely sampled curve starting at the origin to spacing ``ds``.

    Node tangents are interpolated by chord length from ``tangents`` (given at
    the dense points) or from the dense segment directions, then renormalized.
    The curve is truncated to a whole number of cells, so the resampled length
    is ``floor(L / ds) * ds``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[1] == 2:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    seg = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    if np.any(seg_len <= 0):
        raise ValueError("curve has repeated points")
    arc = np.concatenate([[0.0], np.cumsum(seg_len)])
    n_cells = int(math.floor(arc[-1] / ds + 1e-9))
    s = ds * np.arange(n_cells + 1)
    if tangents is None:
        mids = 0.5 * (arc[1:] + arc[:-1])
        dirs = seg / seg_len[:, None]
        k = np.column_stack([np.interp(s, mids, dirs[:, j]) for j in range(3)])
    else:
        tg = np.asarray(tangents, dtype=float)
        if tg.shape[1] == 2:
            tg = np.column_stack([tg, np.zeros(len(tg))])
        k = np.column_stack([np.interp(s, arc, tg[:, j]) for j in range(3)])
    k /= np.linalg.norm(k, axis=1, keepdims=True)
    return make_state(k, ds, law=law)


def elongate(state: StemState) -> StemState:
    """Append one cell at the tip, continuing the tip tangent (zero tip curvature)."""
    k = np.vstack([state.tangents, state.tangents[-1]])
    return rebuild_positions(replace(state, tangents=k))


def extend_beyond_tip(state: StemState, T: float):
    """Evaluator of the stem on ``[0, T]``, continued as a ray beyond the tip.

    Inside ``[0, s_last]`` the stem is the polyline through its nodes; beyond
    it is ``tip + (s - s_last) * P_s(tip)``.
    """
    if T < state.s_last - 1e-12:
        raise ValueError("extension horizon must reach the tip")
    s_nodes = state.s
    pos = state.positions
    w_tip = float(state.length_weights()[-1])
    slope = w_tip * state.tip_tangent

    def evaluate(s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((s_arr.size, 3))
        inside = s_arr <= state.s_last
        for j in range(3):
            out[inside, j] = np.interp(s_arr[inside], s_nodes, pos[:, j])
        out[~inside] = state.tip + (s_arr[~inside] - state.s_last)[:, None] * slope
        return out[0] if np.ndim(s) == 0 else out

    return evaluate


def penetration_depth(state: StemState, obstacles: ObstacleSet) -> float:
    if len(obstacles) == 0:
        return 0.0
    phi = signed_distance(obstacles, state.positions)
    return float(max(0.0, -phi.min()))


def deepest_node(state: StemState, obstacles: ObstacleSet) -> tuple[int, float]:
    """Index and depth of the deepest penetrating node (depth 0 if none)."""
    if len(obstacles) == 0:
        return -1, 0.0
    phi = signed_distance(obstacles, state.positions)
    i = int(np.argmin(phi))
    return i, float(max(0.0, -phi[i]))


def contact_set(state: StemState, obstacles: ObstacleSet, tol: float) -> ContactSet:
    if not tol > 0:
        raise ValueError("contact tolerance must be positive")
    if len(obstacles) == 0:
        return ContactSet(np.zeros(0, dtype=int), tol)
    phi = signed_distance(obstacles, state.positions)
    return ContactSet(np.flatnonzero(np.abs(phi) <= tol), tol)


def discrete_curvature(state: StemState) -> np.ndarray:
    """``|k_{i+1} - k_i| / ds`` per cell."""
    return np.linalg.norm(np.diff(state.tangents, axis=0), axis=1) / state.ds
