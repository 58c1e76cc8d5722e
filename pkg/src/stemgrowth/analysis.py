"""Post-processing metrics for simulated stems."""

from __future__ import annotations

import numpy as np

from .obstacle import Sphere


def birth_distances(log, obstacle: Sphere) -> np.ndarray:
    """Distance from each final-frame node to ``obstacle`` at the moment it was laid down.

    A node appended in some frame is the tip of that frame; nodes of the
    initial curve use the first frame. Requires every step to be logged.
    """
    if log.stride != 1:
        raise ValueError("birth distances need every step logged (frame stride 1)")
    frames = log.frames
    n_final = frames[-1].positions.shape[0]
    out = np.empty(n_final)
    first = frames[0].positions
    out[:first.shape[0]] = obstacle.distance(first)
    for fr in frames[1:]:
        n = fr.positions.shape[0]
        out[n - 1] = obstacle.distance(fr.positions[-1:])[0]
    return out


def winding_angle(positions, near, center) -> float:
    """Largest absolute turning angle about ``center`` over runs of ``near`` nodes.

    A run is a maximal stretch of consecutive flagged nodes; its winding is
    the sum of the signed angle steps about the centre in the ``(x, y)`` plane.
    """
    pos = np.asarray(positions, dtype=float)
    near = np.asarray(near, dtype=bool)
    rel = pos[:, :2] - np.asarray(center, dtype=float)[:2]
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    steps = np.angle(np.exp(1j * np.diff(ang)))
    best = 0.0
    run_total = 0.0
    for i, step in enumerate(steps):
        if near[i] and near[i + 1]:
            run_total += step
            best = max(best, abs(run_total))
        else:
            run_total = 0.0
    return float(best)


def wrap_angle(log, obstacle: Sphere, band: float) -> float:
    """Winding of the stem arc that was laid down in contact range of ``obstacle``.

    Nodes count as contact-adjacent when their birth distance is at most
    ``band``; the winding is measured on the final frame.
    """
    near = birth_distances(log, obstacle) <= band
    return winding_angle(log.last.positions, near, obstacle.center)
