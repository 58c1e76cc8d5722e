"""Detection of the configuration where push-out becomes impossible.

The stem is stuck when its tip rests on the obstacle, points straight into
it, and every part of the stem away from the contact is straight: no
rotation can then lift the tip off the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .obstacle import ObstacleSet, gradient, signed_distance
from .stem import StemState, discrete_curvature

TOL_DIST = 1e-6
TOL_ANGLE = 1e-2
TOL_CURV_CELL = 1e-3


@dataclass(frozen=True)
class BreakdownReport:
    tip_on_boundary: bool
    tip_perpendicular: bool
    straight_off_contact: bool
    angle_defect: float
    max_off_contact_curvature: float

    @property
    def is_breakdown(self) -> bool:
        return self.tip_on_boundary and self.tip_perpendicular and self.straight_off_contact

    def as_dict(self) -> dict:
        return {
            "is_breakdown": self.is_breakdown,
            "tip_on_boundary": self.tip_on_boundary,
            "tip_perpendicular": self.tip_perpendicular,
            "straight_off_contact": self.straight_off_contact,
            "angle_defect": self.angle_defect,
            "max_off_contact_curvature": self.max_off_contact_curvature,
        }


def check_breakdown(state: StemState, obstacles: ObstacleSet, tol_angle: float = TOL_ANGLE,
                    tol_curv: float | None = None, tol_dist: float = TOL_DIST) -> BreakdownReport:
    """Evaluate the three stuck-stem conditions with tolerance bands.

    ``tol_curv`` defaults to ``1e-3 / ds``. Curvature is checked on cells
    whose two end nodes both lie outside the contact band ``|phi| <= tol_dist``.
    """
    if tol_curv is None:
        tol_curv = TOL_CURV_CELL / state.ds
    curv = discrete_curvature(state)
    if len(obstacles) == 0:
        off = curv
        return BreakdownReport(False, False, bool(np.all(off <= tol_curv)), float(np.pi),
                               float(off.max(initial=0.0)))
    phi = signed_distance(obstacles, state.positions)
    on_boundary = bool(abs(phi[-1]) <= tol_dist)
    n = gradient(obstacles, state.tip, strict=False)
    if np.any(n):
        cosang = float(np.clip(-state.tip_tangent @ n, -1.0, 1.0))
        angle = float(np.arccos(cosang))
    else:
        angle = float(np.pi)
    band = np.abs(phi) <= tol_dist
    free_cells = ~(band[:-1] | band[1:])
    off = curv[free_cells]
    max_curv = float(off.max(initial=0.0))
    return BreakdownReport(
        tip_on_boundary=on_boundary,
        tip_perpendicular=angle <= tol_angle,
        straight_off_contact=max_curv <= tol_curv,
        angle_defect=angle,
        max_off_contact_curvature=max_curv,
    )
