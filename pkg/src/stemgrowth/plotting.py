"""Raster figures of planar runs with matplotlib."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle, Polygon  # noqa: E402

from .obstacle import ObstacleSet, Sphere  # noqa: E402
from .output import (SVG_PADDING, SVG_STRIDE, _clip_half_plane, is_planar,  # noqa: E402
                     scene_bounds, snapshot_frames)


def plot_run(log, obstacles: ObstacleSet, path, stride: int = SVG_STRIDE,
             padding: float = SVG_PADDING, title: str | None = None, dpi: int = 150) -> None:
    """Save a PNG with the obstacles, stem snapshots and the final stem."""
    if len(log) == 0:
        raise ValueError("frame log is empty; nothing to plot")
    if not is_planar(log, obstacles):
        raise ValueError("figures are limited to planar runs (z = 0)")
    frames = snapshot_frames(log, stride)
    box = scene_bounds(frames, obstacles, padding)
    aspect = (box[3] - box[2]) / (box[1] - box[0])
    size = 7.0 / max(1.0, aspect)
    fig, ax = plt.subplots(figsize=(size, size * aspect))
    for ob in obstacles:
        if isinstance(ob, Sphere):
            ax.add_patch(Circle(ob.center[:2], ob.radius, fc="0.85", ec="k", lw=1.2))
        else:
            poly = _clip_half_plane(box, ob.point, ob.normal_vector)
            if poly:
                ax.add_patch(Polygon(poly, closed=True, fc="0.85", ec="k", lw=1.2))
    for fr in frames[:-1]:
        ax.plot(fr.positions[:, 0], fr.positions[:, 1], color="#7fbf8f", lw=0.6)
    final = frames[-1].positions
    ax.plot(final[:, 0], final[:, 1], color="#1a7f37", lw=2.0)
    ax.set_xlim(box[0], box[1])
    ax.set_ylim(box[2], box[3])
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
