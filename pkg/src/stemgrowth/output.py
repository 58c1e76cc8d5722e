"""Frame serialization (CSV) and static SVG rendering of planar runs."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .obstacle import HalfSpace, ObstacleSet, Sphere, signed_distance

CSV_HEADER = ("frame_index", "t", "s", "x", "y", "z", "kx", "ky", "kz", "phi", "in_contact")
SVG_STRIDE = 10
SVG_PADDING = 0.1
SVG_WIDTH = 600.0


class OutputError(OSError):
    """Failure writing an output file; the message names the path."""


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def frames_csv(log, obstacles: ObstacleSet = ObstacleSet()) -> str:
    if len(log) == 0:
        raise ValueError("frame log is empty; nothing to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for fr in sorted(log.frames, key=lambda f: f.index):
        n = fr.positions.shape[0]
        s = log.ds * np.arange(n)
        phi = signed_distance(obstacles, fr.positions)
        contact = np.zeros(n, dtype=int)
        contact[np.asarray(fr.contact_indices, dtype=int)] = 1
        for i in range(n):
            w.writerow([fr.index, _g17(fr.t), _g17(s[i]),
                        *map(_g17, fr.positions[i]), *map(_g17, fr.tangents[i]),
                        _g17(phi[i]), contact[i]])
    return buf.getvalue()


def write_frames(log, path, obstacles: ObstacleSet = ObstacleSet()) -> None:
    """Write one CSV row per node per logged frame, sorted by frame and arc length.

    Reals are written with 17 significant digits, which round-trips doubles.
    ``phi`` is the signed distance to ``obstacles`` (``inf`` without obstacles).
    """
    atomic_write(path, frames_csv(log, obstacles))


def read_frames(path) -> dict:
    """Read a frames CSV into a mapping from column name to array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header")
    data = np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, len(CSV_HEADER))
    out = {name: data[:, j] for j, name in enumerate(CSV_HEADER)}
    out["frame_index"] = out["frame_index"].astype(int)
    out["in_contact"] = out["in_contact"].astype(int)
    return out


def write_json(path, payload: dict) -> None:
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=False) + "\n")


def is_planar(log, obstacles: ObstacleSet) -> bool:
    """True when every logged node and every obstacle lies in the ``z = 0`` plane."""
    for fr in log.frames:
        if np.any(fr.positions[:, 2] != 0.0):
            return False
    for ob in obstacles:
        if isinstance(ob, Sphere) and ob.center[2] != 0.0:
            return False
        if isinstance(ob, HalfSpace) and (ob.normal_vector[2] != 0.0 or ob.point[2] != 0.0):
            return False
    return True


def snapshot_frames(log, stride: int = SVG_STRIDE) -> list:
    """Every ``stride``-th logged frame, always including the last one."""
    if stride < 1:
        raise ValueError("snapshot stride must be at least 1")
    picked = list(log.frames[::stride])
    if picked[-1] is not log.last:
        picked.append(log.last)
    return picked


def scene_bounds(frames, obstacles: ObstacleSet, padding: float = SVG_PADDING):
    """Padded ``(xmin, xmax, ymin, ymax)`` covering the stems and the circular obstacles."""
    pts = np.concatenate([fr.positions[:, :2] for fr in frames])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    for ob in obstacles:
        if isinstance(ob, Sphere):
            lo = np.minimum(lo, ob.center[:2] - ob.radius)
            hi = np.maximum(hi, ob.center[:2] + ob.radius)
    span = np.maximum(hi - lo, 1e-9)
    pad = padding * span.max()
    return lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad


def _clip_half_plane(box, point, normal):
    """Part of the rectangle ``box`` inside the half-space (``(x - point) . normal <= 0``)."""
    xmin, xmax, ymin, ymax = box
    poly = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
    d = [(p[0] - point[0]) * normal[0] + (p[1] - point[1]) * normal[1] for p in poly]
    out = []
    for i in range(4):
        j = (i + 1) % 4
        if d[i] <= 0:
            out.append(poly[i])
        if (d[i] < 0) != (d[j] < 0) and d[i] != d[j]:
            a = d[i] / (d[i] - d[j])
            out.append((poly[i][0] + a * (poly[j][0] - poly[i][0]),
                        poly[i][1] + a * (poly[j][1] - poly[i][1])))
    return out


def render_svg_text(log, obstacles: ObstacleSet, stride: int = SVG_STRIDE,
                    width: float = SVG_WIDTH, padding: float = SVG_PADDING) -> str:
    if len(log) == 0:
        raise ValueError("frame log is empty; nothing to render")
    if not is_planar(log, obstacles):
        raise ValueError("SVG output is limited to planar runs (z = 0)")
    frames = snapshot_frames(log, stride)
    box = scene_bounds(frames, obstacles, padding)
    xmin, xmax, ymin, ymax = box
    scale = width / (xmax - xmin)
    height = (ymax - ymin) * scale

    def mx(x):
        return (x - xmin) * scale

    def my(y):
        return (ymax - y) * scale

    def f(v):
        return f"{v:.3f}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{f(width)}" height="{f(height)}" '
        f'viewBox="0 0 {f(width)} {f(height)}">',
        f'<rect x="0" y="0" width="{f(width)}" height="{f(height)}" fill="white"/>',
    ]
    for ob in obstacles:
        if isinstance(ob, Sphere):
            lines.append(f'<circle class="obstacle" cx="{f(mx(ob.center[0]))}" '
                         f'cy="{f(my(ob.center[1]))}" r="{f(ob.radius * scale)}" '
                         'fill="#d9d9d9" stroke="black" stroke-width="1.5"/>')
        else:
            poly = _clip_half_plane(box, ob.point, ob.normal_vector)
            if poly:
                pts = " ".join(f"{f(mx(x))},{f(my(y))}" for x, y in poly)
                lines.append(f'<polygon class="obstacle" points="{pts}" '
                             'fill="#d9d9d9" stroke="black" stroke-width="1.5"/>')
    for fr in frames:
        last = fr is log.last
        pts = " ".join(f"{f(mx(x))},{f(my(y))}" for x, y in fr.positions[:, :2])
        style = ('stroke="#1a7f37" stroke-width="2.5"' if last
                 else 'stroke="#7fbf8f" stroke-width="0.8"')
        cls = "stem final" if last else "stem"
        lines.append(f'<polyline class="{cls}" points="{pts}" fill="none" {style}/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(log, obstacles: ObstacleSet, path, stride: int = SVG_STRIDE,
               width: float = SVG_WIDTH, padding: float = SVG_PADDING) -> None:
    """Draw obstacles, stem snapshots every ``stride`` frames and the final stem.

    World coordinates are mapped affinely to a ``width``-wide viewport with
    ``padding`` (a fraction of the larger extent) on each side. Output bytes
    depend only on the inputs.
    """
    atomic_write(path, render_svg_text(log, obstacles, stride, width, padding))
