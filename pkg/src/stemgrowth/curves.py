"""Initial stem shapes, sampled densely and resampled to the stem grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stem import ElongationLaw, StemState, state_from_curve

DENSE = 20001


@dataclass(frozen=True)
class ParabolaArc:
    """The arc ``x = 1 - (y - 1)^2`` for ``0 <= y <= 1``, from the origin to ``(1, 1)``."""

    kind = "parabola-arc"

    def sample(self, up=(0.0, 1.0, 0.0)):
        y = np.linspace(0.0, 1.0, DENSE)
        x = 1.0 - (y - 1.0) ** 2
        tang = np.column_stack([2.0 * (1.0 - y), np.ones_like(y)])
        tang /= np.linalg.norm(tang, axis=1, keepdims=True)
        return _embed(np.column_stack([x, y]), up), _embed(tang, up)

    def to_dict(self):
        return {"type": self.kind}


@dataclass(frozen=True)
class VerticalSegment:
    """Straight segment of the given length pointing up."""

    length: float
    kind = "vertical-segment"

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError("segment length must be positive")

    def sample(self, up=(0.0, 1.0, 0.0)):
        u = np.asarray(up, dtype=float)
        s = np.linspace(0.0, self.length, 3)
        return s[:, None] * u, np.tile(u, (3, 1))

    def to_dict(self):
        return {"type": self.kind, "length": self.length}


@dataclass(frozen=True)
class Polyline:
    """Polyline through the given points; the first point must be the origin."""

    points: tuple
    kind = "polyline"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3) or pts.shape[0] < 2:
            raise ValueError("polyline needs at least two 2D or 3D points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polyline points must be finite")
        if np.any(pts[0] != 0):
            raise ValueError("polyline must start at the origin")
        object.__setattr__(self, "points", tuple(tuple(float(c) for c in p) for p in pts))

    def sample(self, up=(0.0, 1.0, 0.0)):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape[1] == 2:
            pts = np.column_stack([pts, np.zeros(len(pts))])
        return pts, None

    def to_dict(self):
        return {"type": self.kind, "points": [list(p) for p in self.points]}


def _embed(planar, up):
    """Map planar ``(horizontal, vertical)`` coordinates into space.

    The vertical axis follows ``up``; the horizontal axis is ``up x e3`` when
    that is nonzero (the ``x`` axis for ``up = e2``), else ``e1``.
    """
    u = np.asarray(up, dtype=float)
    h = np.cross(u, [0.0, 0.0, 1.0])
    if np.linalg.norm(h) < 1e-12:
        h = np.array([1.0, 0.0, 0.0])
    h /= np.linalg.norm(h)
    return planar[:, :1] * h + planar[:, 1:2] * u


def initial_state(curve, ds: float, law: ElongationLaw, up=(0.0, 1.0, 0.0)) -> StemState:
    points, tangents = curve.sample(up)
    return state_from_curve(points, ds, tangents=tangents, law=law)
