"""Energy-minimizing rotation fields that expel the stem from obstacles.

A rotation field ``omega`` is an ``(N, 3)`` array of angular velocities per
unit arc length on the stem grid. Applying it rotates the tangent at ``s`` by
the accumulated vector ``int_0^s omega``, so a field supported on ``[a, T]``
leaves the stem below ``a`` in place.

A single penetrating node ``s'`` is expelled (to first order) by the field

    omega(sigma) = lam * e^{-beta (t - sigma)} * n x (P(s') - P(sigma)),  sigma <= s'

with ``n`` the outward normal at ``P(s')`` and a multiplier ``lam <= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geom import cumulative_trapezoid, rotate, trapezoid
from .obstacle import ObstacleSet, gradient, scene_scale, signed_distance
from .stem import StemState, deepest_node, penetration_depth, rebuild_positions

EPS_SING = 1e-10
SETTLE_MAX_ITER = 100


class BreakdownProximityError(RuntimeError):
    """No rotation field can move the node off the obstacle to first order.

    Raised when the normal at the pushed node is (nearly) parallel to every
    chord behind it, the signature of a stem hitting the boundary head-on.
    """

    def __init__(self, message, node=None, denominator=None):
        super().__init__(message)
        self.node = node
        self.denominator = denominator


class PushNonConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class EnergyWeights:
    """Stiffness decay ``beta`` and the twist/bend penalties."""

    beta: float = 0.0
    c_twist: float = 1.0
    c_bend: float = 1.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if not (self.c_twist > 0 and self.c_bend > 0):
            raise ValueError("c_twist and c_bend must be positive")

    @property
    def isotropic(self) -> bool:
        return self.c_twist == self.c_bend


@dataclass(frozen=True)
class ContactMeasure:
    """Atomic nonnegative measure on stem nodes; atoms at one node are merged."""

    indices: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        w = tuple(float(x) for x in self.weights)
        if len(idx) != len(w):
            raise ValueError("indices and weights differ in length")
        if any(x < 0 for x in w):
            raise ValueError("contact measure weights must be nonnegative")
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate atoms; use add() to merge")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.indices)

    def add(self, index: int, weight: float) -> "ContactMeasure":
        idx, w = list(self.indices), list(self.weights)
        if index in idx:
            w[idx.index(index)] += weight
        else:
            idx.append(int(index))
            w.append(weight)
        order = np.argsort(idx, kind="stable")
        return ContactMeasure(tuple(idx[j] for j in order), tuple(w[j] for j in order))

    @property
    def mass(self) -> float:
        return float(sum(self.weights))

    @property
    def atoms(self) -> list[tuple[int, float]]:
        return list(zip(self.indices, self.weights))


def _check_aligned(state: StemState, field) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != state.tangents.shape:
        raise ValueError(
            f"field shape {field.shape} does not match the stem grid {state.tangents.shape}")
    if not np.all(np.isfinite(field)):
        raise ValueError("rotation field has non-finite entries")
    return field


def split_twist_bend(field, tangents):
    """Components of ``field`` parallel and perpendicular to the tangents."""
    twist = np.sum(field * tangents, axis=1, keepdims=True) * tangents
    return twist, field - twist


def deformation_energy(field, t: float, w: EnergyWeights, state: StemState) -> float:
    """Weighted elastic energy ``1/2 int e^{beta (t - s)} (c_t |w_tw|^2 + c_b |w_b|^2)``.

    With a finite elongation rate the integrand carries the cell length
    factor of the state's law.
    """
    field = _check_aligned(state, field)
    twist, bend = split_twist_bend(field, state.tangents)
    dens = (w.c_twist * np.sum(twist * twist, axis=1)
            + w.c_bend * np.sum(bend * bend, axis=1))
    dens = dens * np.exp(w.beta * (t - state.s))
    if not state.law.instantaneous:
        dens = dens * state.law.weights(t, state.s)
    return 0.5 * float(trapezoid(dens, state.s))


def field_norm(field, state: StemState) -> float:
    """Discrete L2 norm of a rotation field on the stem grid."""
    field = _check_aligned(state, field)
    return float(np.sqrt(trapezoid(np.sum(field * field, axis=1), state.s)))


def apply_rotation_field(state: StemState, field) -> StemState:
    """Rotate each tangent by the running integral of ``field``; rebuild positions."""
    field = _check_aligned(state, field)
    if not np.any(field):
        return state
    omega = cumulative_trapezoid(field, state.ds)
    return rebuild_positions(replace(state, tangents=rotate(omega, state.tangents)))


def linear_displacement(state: StemState, field) -> np.ndarray:
    """First-order node displacement produced by :func:`apply_rotation_field`.

    Equals ``int_0^s omega(sigma) x (P(s) - P(sigma)) d sigma`` in the
    continuum; here it is the exact derivative of the discrete map.
    """
    field = _check_aligned(state, field)
    omega = cumulative_trapezoid(field, state.ds)
    w = state.length_weights()
    return cumulative_trapezoid(w[:, None] * np.cross(omega, state.tangents), state.ds)


def _singularity_floor(obstacles: ObstacleSet, eps_sing: float) -> float:
    return eps_sing * scene_scale(obstacles) ** 3


def _penetrating_normal(state: StemState, obstacles: ObstacleSet, s_prime: int):
    if not 0 <= s_prime < state.n_nodes:
        raise IndexError(f"node {s_prime} outside the stem grid")
    phi = float(signed_distance(obstacles, state.positions[s_prime]))
    if not phi < 0:
        raise ValueError(f"node {s_prime} does not penetrate the obstacle (phi = {phi:g})")
    return phi, gradient(obstacles, state.positions[s_prime])


def single_point_multiplier(state: StemState, obstacles: ObstacleSet, s_prime: int,
                            beta: float, eps_sing: float = EPS_SING) -> float:
    """Multiplier ``lam = Phi(P(s')) / int_0^{s'} e^{-beta(t - sigma)} |n x c|^2 <= 0``.

    ``c = P(s') - P(sigma)`` is linear along each polyline segment, so
    ``|n x c|^2`` is quadratic there; each segment is integrated with
    Simpson's rule, which is exact for ``beta = 0``. With a finite elongation
    rate the cell length factor multiplies the integrand.
    """
    phi, n = _penetrating_normal(state, obstacles, s_prime)
    if s_prime == 0:
        raise BreakdownProximityError("the root cannot be moved", node=0, denominator=0.0)
    pos = state.positions[: s_prime + 1]
    s = state.s[: s_prime + 1]
    s_mid = 0.5 * (s[1:] + s[:-1])
    c = pos[s_prime] - pos
    c_mid = 0.5 * (c[1:] + c[:-1])

    def density(sig, chords):
        q = np.sum(np.cross(n, chords) ** 2, axis=-1)
        q = q * np.exp(-beta * (state.t - sig))
        return q * state.law.weights(state.t, sig)

    f = density(s, c)
    denom = float(np.sum(state.ds / 6.0 * (f[:-1] + 4.0 * density(s_mid, c_mid) + f[1:])))
    if denom < _singularity_floor(obstacles, eps_sing):
        raise BreakdownProximityError(
            f"multiplier denominator {denom:.3e} below the singularity floor at node {s_prime}",
            node=s_prime, denominator=denom)
    return phi / denom


def _generator(state: StemState, n, s_prime: int, w: EnergyWeights) -> np.ndarray:
    """Unscaled single-contact field shape, zero beyond ``s'``."""
    g = np.zeros_like(state.tangents)
    sl = slice(0, s_prime + 1)
    chords = state.positions[s_prime] - state.positions[sl]
    g[sl] = np.exp(-w.beta * (state.t - state.s[sl]))[:, None] * np.cross(n, chords)
    if not w.isotropic:
        twist, bend = split_twist_bend(g, state.tangents)
        g = twist / w.c_twist + bend / w.c_bend
    return g


def single_point_field(state: StemState, obstacles: ObstacleSet, s_prime: int, beta: float,
                       eps_sing: float = EPS_SING) -> np.ndarray:
    """Minimum-energy field pushing node ``s'`` back to the boundary to first order."""
    lam = single_point_multiplier(state, obstacles, s_prime, beta, eps_sing)
    _, n = _penetrating_normal(state, obstacles, s_prime)
    return lam * _generator(state, n, s_prime, EnergyWeights(beta))


def push_step(state: StemState, obstacles: ObstacleSet, w: EnergyWeights,
              eps_sing: float = EPS_SING):
    """One push at the deepest node.

    Returns ``(state, node, lam, field)``. The multiplier is calibrated so
    that the exact linearization of the discrete update brings the node back
    to the boundary; for a state that does not penetrate, nothing moves and
    ``node`` is ``-1``.
    """
    i, depth = deepest_node(state, obstacles)
    if depth <= 0.0:
        return state, -1, 0.0, np.zeros_like(state.tangents)
    if i == 0:
        raise BreakdownProximityError("the root penetrates the obstacle", node=0)
    n = gradient(obstacles, state.positions[i])
    g = _generator(state, n, i, w)
    slope = float(n @ linear_displacement(state, g)[i])
    if -slope < _singularity_floor(obstacles, eps_sing):
        raise BreakdownProximityError(
            f"push-out singular at node {i} (normal parallel to the chords)",
            node=i, denominator=-slope)
    lam = depth / slope
    field = lam * g
    return apply_rotation_field(state, field), i, lam, field


def _settle_scale(state: StemState, obstacles: ObstacleSet, field, tol: float,
                  max_iter: int = SETTLE_MAX_ITER) -> float:
    """Scale ``c`` in ``(0, 1]`` putting ``apply_rotation_field(state, c field)`` on the boundary.

    Used when the linear push overshoots: the stem would end strictly outside,
    away from the contact it was pushed off. Illinois regula falsi on the
    smallest signed distance, accepting a gap in ``[0, tol]``.
    """
    def gap(c):
        return float(np.min(signed_distance(obstacles,
                                            apply_rotation_field(state, c * field).positions)))

    lo, hi = 0.0, 1.0
    f_lo, f_hi = gap(lo), gap(hi)
    side = 0
    for _ in range(max_iter):
        c = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        if not lo < c < hi:
            c = 0.5 * (lo + hi)
        f = gap(c)
        if 0.0 <= f <= tol:
            return c
        if f < 0.0:
            lo, f_lo = c, f
            if side == -1:
                f_hi *= 0.5
            side = -1
        else:
            hi, f_hi = c, f
            if side == 1:
                f_lo *= 0.5
            side = 1
    return hi


def _push_iterations(state: StemState, obstacles: ObstacleSet, w: EnergyWeights,
                     tol: float, max_iter: int, eps_sing: float):
    if not tol > 0:
        raise ValueError("push tolerance must be positive")
    total = np.zeros_like(state.tangents)
    mu = ContactMeasure()
    iterations = 0
    if len(obstacles) == 0:
        return state, mu, total, iterations
    while True:
        depth = penetration_depth(state, obstacles)
        if depth <= tol:
            return state, mu, total, iterations
        if iterations >= max_iter:
            raise PushNonConvergenceError(
                f"push-out did not converge in {max_iter} iterations "
                f"(residual depth {depth:.3e})", residual=depth)
        before = state
        state, i, lam, field = push_step(state, obstacles, w, eps_sing)
        if float(np.min(signed_distance(obstacles, state.positions))) > tol:
            c = _settle_scale(before, obstacles, field, tol)
            lam, field = c * lam, c * field
            state = apply_rotation_field(before, field)
        total += field
        mu = mu.add(i, -lam)
        iterations += 1


def push_out(state: StemState, obstacles: ObstacleSet, beta: float, tol: float = 1e-9,
             max_iter: int = 500, eps_sing: float = EPS_SING, return_iterations: bool = False):
    """Expel the stem by repeated single-contact pushes at the deepest node.

    Returns ``(state, measure, field)``: the feasible state, the accumulated
    contact measure (weight ``-lam`` per push) and the sum of all pushed
    fields. A push that throws the stem clear of the boundary by more than
    ``tol`` is scaled back along its field until the stem touches again.
    Raises :class:`PushNonConvergenceError` if the depth is still above
    ``tol`` after ``max_iter`` pushes.
    """
    out = _push_iterations(state, obstacles, EnergyWeights(beta), tol, max_iter, eps_sing)
    return out if return_iterations else out[:3]


def weighted_push_out(state: StemState, obstacles: ObstacleSet, weights: EnergyWeights,
                      tol: float = 1e-9, max_iter: int = 500, eps_sing: float = EPS_SING,
                      return_iterations: bool = False):
    """:func:`push_out` for the energy penalizing twist and bend separately.

    The single-contact generator is split into its twist and bend parts,
    scaled by ``1 / c_twist`` and ``1 / c_bend``.
    """
    out = _push_iterations(state, obstacles, weights, tol, max_iter, eps_sing)
    return out if return_iterations else out[:3]
