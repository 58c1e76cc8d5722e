"""Constructed contact scenarios for exercising breakdown detection."""

from __future__ import annotations

import numpy as np

from .config import config_from_dict
from .curves import Polyline
from .growth import GrowthParams
from .obstacle import HalfSpace, ObstacleSet
from .sim import SimConfig
from .stem import StemState, make_state


def head_on_dict(ds: float = 0.05, wall: float = 1.0, duration: float = 2.0) -> dict:
    """Straight vertical stem of length ``10 ds`` growing into the half-space ``y >= wall``.

    Without sensing the stem stays straight, so its tip hits the wall
    perpendicularly with nothing left to bend.
    """
    return {
        "model": {"alpha": "infinity", "beta": 0.5, "kappa": 1.0, "gamma": 0.0,
                  "up": [0.0, 1.0, 0.0]},
        "run": {"t_end": 10 * ds + duration, "ds": ds},
        "obstacles": [{"type": "half-space", "point": [0.0, wall, 0.0],
                       "normal": [0.0, -1.0, 0.0]}],
        "initial_curve": {"type": "vertical-segment", "length": 10 * ds},
    }


def head_on(ds: float = 0.05) -> SimConfig:
    return config_from_dict(head_on_dict(ds))


def curved_contact(ds: float = 0.05, n_nodes: int = 21, duration: float = 2.0):
    """Bent stem whose tip meets a horizontal wall head on.

    The tangent turns linearly from 45 to 90 degrees, so the tip is on the
    boundary and perpendicular to it while the free arc is curved. Returns the
    configuration and the initial state to pass to :func:`run`.
    """
    phi = np.linspace(np.pi / 4, np.pi / 2, n_nodes)
    k = np.column_stack([np.cos(phi), np.sin(phi), np.zeros(n_nodes)])
    k[-1] = (0.0, 1.0, 0.0)
    state: StemState = make_state(k, ds)
    wall = HalfSpace([0.0, state.tip[1], 0.0], [0.0, -1.0, 0.0])
    cfg = SimConfig(t_end=state.t + duration, ds=ds,
                    params=GrowthParams(kappa=1.0, beta=0.5, up=(0.0, 1.0, 0.0)),
                    obstacles=ObstacleSet((wall,)),
                    initial_shape=Polyline(tuple(map(tuple, state.positions))), t0=state.t)
    return cfg, state
