"""Smooth part of the dynamics: gravity response and clinging.

Every node ``sigma`` carries an angular velocity

    Psi = e^{-beta (t - sigma)} * (kappa * k x up + grad psi(P) x k)

(times ``1 - e^{-alpha (t - sigma)}`` for a finite elongation rate), and the
tangent at ``s`` turns about the integral of ``Psi`` over ``[0, s]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .geom import cumulative_trapezoid, rotate
from .obstacle import ObstacleSet, SensingParams, psi_gradient
from .stem import ElongationLaw, StemState, rebuild_positions


@dataclass(frozen=True)
class GrowthParams:
    """Model constants.

    ``up`` is the direction opposing gravity. It defaults to ``e3``; planar
    scenes drawn in the ``(x, y)`` plane use ``up = (0, 1, 0)``.
    """

    kappa: float = 1.0
    beta: float = 0.5
    sensing: SensingParams = field(default_factory=SensingParams)
    law: ElongationLaw = field(default_factory=ElongationLaw)
    up: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        up = np.asarray(self.up, dtype=float)
        if up.shape != (3,) or abs(np.linalg.norm(up) - 1.0) > 1e-12:
            raise ValueError("up must be a unit 3-vector")
        object.__setattr__(self, "up", tuple(float(u) for u in up))

    @property
    def up_vector(self) -> np.ndarray:
        return np.asarray(self.up)


def _age_weight(t, sigma, params: GrowthParams):
    age = t - np.asarray(sigma, dtype=float)
    w = np.exp(-params.beta * age)
    if not params.law.instantaneous:
        w = w * -np.expm1(-params.law.alpha * np.maximum(age, 0.0))
    return w


def psi_kernel(t, sigma, pos, tangent, params: GrowthParams,
               obstacles: ObstacleSet = ObstacleSet(), strict: bool = True):
    """Angular velocity density contributed by the cell born at ``sigma``.

    Vectorized: ``sigma`` may be an array with matching ``(N, 3)`` stacks of
    positions and tangents.
    """
    pos = np.asarray(pos, dtype=float)
    k = np.asarray(tangent, dtype=float)
    single = k.ndim == 1
    pos, k = np.atleast_2d(pos), np.atleast_2d(k)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (k.shape[0],))
    torque = params.kappa * np.cross(k, params.up_vector)
    if len(obstacles) and params.sensing.gamma > 0:
        gpsi = psi_gradient(obstacles, pos, params.sensing, strict=strict)
        torque = torque + np.cross(gpsi, k)
    out = _age_weight(t, sigma, params)[:, None] * torque
    return out[0] if single else out


def kernel_along_stem(state: StemState, params: GrowthParams,
                      obstacles: ObstacleSet) -> np.ndarray:
    # gradient kinks of the obstacle union contribute nothing for this step
    return psi_kernel(state.t, state.s, state.positions, state.tangents, params,
                      obstacles, strict=False)


def growth_rotation_field(state: StemState, params: GrowthParams,
                          obstacles: ObstacleSet, dt: float) -> np.ndarray:
    """Per-node rotation vectors ``dt * int_0^s Psi`` for one forward-Euler step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    psi = kernel_along_stem(state, params, obstacles)
    return dt * cumulative_trapezoid(psi, state.ds)


def apply_growth_step(state: StemState, params: GrowthParams, obstacles: ObstacleSet,
                      dt: float) -> StemState:
    """Rotate every tangent by the frozen-time growth field and advance time."""
    omega = growth_rotation_field(state, params, obstacles, dt)
    k = rotate(omega, state.tangents)
    return rebuild_positions(replace(state, tangents=k, t=state.t + dt))


def planar_consistency_check(state: StemState, params: GrowthParams,
                             obstacles: ObstacleSet) -> float:
    """Compare the 3D kernel's tangent velocity with the planar scalar form.

    The planar form writes the velocity as a multiple of ``k_perp``, the
    tangent turned counterclockwise by a right angle, with the gravity term
    driven by the horizontal tangent component. Returns the largest node-wise
    discrepancy.
    """
    if np.max(np.abs(state.positions[:, 2])) > 0 or np.max(np.abs(state.tangents[:, 2])) > 0:
        raise ValueError("planar consistency check needs a state in the z = 0 plane")
    up = params.up_vector
    if up[2] != 0.0:
        raise ValueError("planar consistency check needs an in-plane up direction")

    # 3D route
    psi = kernel_along_stem(state, params, obstacles)
    spatial = np.cross(cumulative_trapezoid(psi, state.ds), state.tangents)

    # planar route
    k = state.tangents[:, :2]
    horizontal = np.array([up[1], -up[0]])
    k_perp = np.column_stack([-k[:, 1], k[:, 0]])
    weight = _age_weight(state.t, state.s, params)
    gravity = params.kappa * weight * (k @ horizontal)
    if len(obstacles) and params.sensing.gamma > 0:
        gpsi = psi_gradient(obstacles, state.positions, params.sensing, strict=False)[:, :2]
        cling = weight * np.sum(gpsi * k_perp, axis=1)
    else:
        cling = np.zeros(state.n_nodes)
    rate = cumulative_trapezoid(gravity, state.ds) - cumulative_trapezoid(cling, state.ds)
    planar = np.column_stack([rate[:, None] * k_perp, np.zeros(state.n_nodes)])
    return float(np.max(np.linalg.norm(spatial - planar, axis=1)))
