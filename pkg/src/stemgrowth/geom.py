"""Vector algebra, the rotation exponential map and trapezoid quadrature.

Vectors are plain ``numpy`` arrays of shape ``(3,)``; stacks of vectors are
arrays of shape ``(N, 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SMALL_ANGLE = 1e-8


def cross(a, b):
    return np.cross(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def dot(a, b):
    """Dot product along the last axis (works for single vectors and stacks)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.sum(a * b, axis=-1)


def norm(a):
    return np.sqrt(dot(a, a))


def skew(omega) -> np.ndarray:
    """Matrix ``A`` with ``A @ v == cross(omega, v)``."""
    w1, w2, w3 = np.asarray(omega, dtype=float)
    return np.array([[0.0, -w3, w2],
                     [w3, 0.0, -w1],
                     [-w2, w1, 0.0]])


def _rodrigues_coefficients(theta):
    """Return ``sin(t)/t`` and ``(1 - cos(t))/t**2`` with a Taylor branch near 0."""
    theta = np.asarray(theta, dtype=float)
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(safe)) / (safe * safe))
    return a, b


def rodrigues(omega) -> np.ndarray:
    """Rotation matrix ``exp(skew(omega))`` in closed form.

    The rotation is about the axis ``omega / |omega|`` by the angle ``|omega|``,
    so ``rodrigues(omega) @ v`` is the time-one flow of ``v' = omega x v``.
    """
    omega = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(omega)):
        raise ValueError("rotation vector must be finite")
    A = skew(omega)
    a, b = _rodrigues_coefficients(np.linalg.norm(omega))
    return np.eye(3) + float(a) * A + float(b) * (A @ A)


def rotation_matrices(omegas) -> np.ndarray:
    """Stack of ``rodrigues(omegas[i])`` for an ``(N, 3)`` array, shape ``(N, 3, 3)``."""
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    if not np.all(np.isfinite(omegas)):
        raise ValueError("rotation vectors must be finite")
    n = omegas.shape[0]
    A = np.zeros((n, 3, 3))
    A[:, 0, 1], A[:, 0, 2] = -omegas[:, 2], omegas[:, 1]
    A[:, 1, 0], A[:, 1, 2] = omegas[:, 2], -omegas[:, 0]
    A[:, 2, 0], A[:, 2, 1] = -omegas[:, 1], omegas[:, 0]
    a, b = _rodrigues_coefficients(norm(omegas))
    return np.eye(3) + a[:, None, None] * A + b[:, None, None] * (A @ A)


def rotate(omegas, vectors) -> np.ndarray:
    """Apply ``rodrigues(omegas[i])`` to ``vectors[i]`` row by row."""
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    a, b = _rodrigues_coefficients(norm(omegas))
    wv = np.cross(omegas, vectors)
    wwv = np.cross(omegas, wv)
    return vectors + a[:, None] * wv + b[:, None] * wwv


@dataclass(frozen=True)
class QuadratureGrid:
    """Strictly increasing nodes carrying composite trapezoid weights."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise ValueError("grid needs at least one node")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return self.nodes.size

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "QuadratureGrid":
        return cls(np.linspace(a, b, n))

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.nodes)


def trapezoid_weights(nodes) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float)
    w = np.zeros_like(nodes)
    if nodes.size > 1:
        h = np.diff(nodes)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
    return w


def trapezoid(values, grid):
    """Composite trapezoid integral of ``values`` over the grid.

    ``values`` may be scalars (shape ``(N,)``) or vectors (shape ``(N, 3)``).
    ``grid`` is a :class:`QuadratureGrid` or a node array.
    """
    nodes = grid.nodes if isinstance(grid, QuadratureGrid) else np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape[0] != nodes.size:
        raise ValueError(
            f"length mismatch: {values.shape[0]} values on {nodes.size} grid nodes")
    w = trapezoid_weights(nodes)
    return np.tensordot(w, values, axes=(0, 0))


def cumulative_trapezoid(values, h: float) -> np.ndarray:
    """Running trapezoid integral on a uniform grid with spacing ``h``.

    The first entry is zero, so the result has the same shape as ``values``.
    """
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    if values.shape[0] > 1:
        out[1:] = np.cumsum(0.5 * h * (values[1:] + values[:-1]), axis=0)
    return out
