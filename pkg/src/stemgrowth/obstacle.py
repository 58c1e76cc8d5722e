"""Obstacles described by signed distance, and the clinging sensing field.

Planar scenes live in the ``z = 0`` plane; a circle is a sphere whose centre
has ``z = 0``, so its signed distance restricted to the plane is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TIE_TOL = 1e-12


class DegenerateGradientError(ValueError):
    """The signed distance has no gradient at the requested point."""


def _vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size == 2:
        v = np.append(v, 0.0)
    if v.size != 3:
        raise ValueError(f"expected a 2- or 3-vector, got shape {np.shape(x)}")
    return v


@dataclass(frozen=True, eq=False)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")

    def __eq__(self, other):
        return (isinstance(other, Sphere) and np.array_equal(self.center, other.center)
                and self.radius == other.radius)

    def distance(self, x):
        return np.linalg.norm(np.asarray(x, dtype=float) - self.center, axis=-1) - self.radius

    def normal(self, x):
        d = np.asarray(x, dtype=float) - self.center
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        if np.any(r == 0.0):
            raise DegenerateGradientError("gradient undefined at the sphere centre")
        return d / r


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The open set ``{x : (x - point) . normal < 0}``; ``normal`` points outward."""

    point: np.ndarray
    normal_vector: np.ndarray

    def __post_init__(self):
        n = _vec(self.normal_vector)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("half-space normal must be a unit vector")
        object.__setattr__(self, "point", _vec(self.point))
        object.__setattr__(self, "normal_vector", n)

    def __eq__(self, other):
        return (isinstance(other, HalfSpace) and np.array_equal(self.point, other.point)
                and np.array_equal(self.normal_vector, other.normal_vector))

    def distance(self, x):
        return (np.asarray(x, dtype=float) - self.point) @ self.normal_vector

    def normal(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.normal_vector, x.shape).copy()


Obstacle = Sphere | HalfSpace


@dataclass(frozen=True)
class ObstacleSet:
    """Union of obstacles; its signed distance is the member-wise minimum."""

    obstacles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    def __len__(self):
        return len(self.obstacles)

    def __iter__(self):
        return iter(self.obstacles)

    def _member_distances(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack([ob.distance(x) for ob in self.obstacles], axis=-1)

    def nearest(self, x):
        """Index of the nearest member (lowest index wins ties)."""
        return np.argmin(self._member_distances(x), axis=-1)


@dataclass(frozen=True)
class SensingParams:
    gamma: float = 0.0
    delta0: float = 0.05

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if not self.delta0 > 0:
            raise ValueError("delta0 must be positive")


def signed_distance(obstacles: ObstacleSet, x):
    """Signed distance to the union: positive outside, negative inside.

    Accepts one point or an ``(N, 3)`` stack. An empty set gives ``+inf``.
    """
    x = np.asarray(x, dtype=float)
    if len(obstacles) == 0:
        return np.full(x.shape[:-1], np.inf) if x.ndim > 1 else np.inf
    d = obstacles._member_distances(x).min(axis=-1)
    return d if x.ndim > 1 else float(d)


def gradient(obstacles: ObstacleSet, x, strict: bool = True):
    """Unit gradient of the signed distance of the union.

    Raises :class:`DegenerateGradientError` on a sphere centre or where two
    members are equidistant within ``TIE_TOL`` (the union's distance has a kink
    there). With ``strict=False`` such points get a zero vector instead.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if len(obstacles) == 0:
        raise DegenerateGradientError("empty obstacle set has no distance gradient")
    dists = obstacles._member_distances(pts)
    order = np.argsort(dists, axis=-1, kind="stable")
    nearest = order[:, 0]
    out = np.zeros_like(pts)
    bad = np.zeros(pts.shape[0], dtype=bool)
    if len(obstacles) > 1:
        rows = np.arange(pts.shape[0])
        gap = dists[rows, order[:, 1]] - dists[rows, nearest]
        bad |= gap <= TIE_TOL
    for j, ob in enumerate(obstacles.obstacles):
        sel = nearest == j
        if not np.any(sel):
            continue
        if isinstance(ob, Sphere):
            r = np.linalg.norm(pts[sel] - ob.center, axis=-1)
            at_centre = r == 0.0
            sub = np.flatnonzero(sel)
            bad[sub[at_centre]] = True
            ok = sub[~at_centre]
            out[ok] = ob.normal(pts[ok])
        else:
            out[sel] = ob.normal(pts[sel])
    if np.any(bad):
        if strict:
            raise DegenerateGradientError(
                "signed distance gradient undefined (sphere centre or equidistant members)")
        out[bad] = 0.0
    return out[0] if single else out


def eta(d, p: SensingParams):
    """Clamped exponential sensing response ``gamma (1 - exp(-min(d, delta0)))``.

    The clamp keeps the value continuous at ``delta0`` but the slope jumps from
    ``gamma exp(-delta0)`` to zero there; this kinked profile is what the
    reference planar simulations use, in place of a smooth concave one.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("eta is defined for nonnegative distances only")
    out = p.gamma * (1.0 - np.exp(-np.minimum(d, p.delta0)))
    return float(out) if out.ndim == 0 else out


def eta_prime(d, p: SensingParams):
    d = np.asarray(d, dtype=float)
    out = np.where(d < p.delta0, p.gamma * np.exp(-np.maximum(d, 0.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def psi_gradient(obstacles: ObstacleSet, x, p: SensingParams, strict: bool = True):
    """Gradient of ``psi(x) = eta(dist(x, obstacles))`` for points outside.

    Points marginally inside (round-off after a push-out) are treated as lying
    on the boundary. Vanishes beyond the sensing range and when ``gamma == 0``.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    out = np.zeros_like(pts)
    if len(obstacles) == 0 or p.gamma == 0.0:
        return out[0] if single else out
    d = np.maximum(signed_distance(obstacles, pts), 0.0)
    near = d < p.delta0
    if np.any(near):
        g = gradient(obstacles, pts[near], strict=strict)
        out[near] = eta_prime(d[near], p)[:, None] * g
    return out[0] if single else out


def scene_scale(obstacles: ObstacleSet) -> float:
    """Characteristic length of the scene (largest sphere radius, else 1)."""
    radii = [ob.radius for ob in obstacles if isinstance(ob, Sphere)]
    return max(radii) if radii else 1.0
