"""Recovering a rotation field from the displacement it produces.

Discrete model: the field entry ``omega_l`` acts on the interval between
nodes ``l`` and ``l + 1``, and cell ``i`` (chord ``c_i = P_{i+1} - P_i``) is
turned by the rotation accumulated up to its left node,

    Omega_i = ds * sum_{l < i} omega_l,      v_{i+1} - v_i = Omega_i x c_i.

This is a rectangle-rule quadrature of ``v(s) = int_0^s omega x (P(s) - P)``.
The last two entries of a field never reach any node and are returned as
zero. Each chord equation fixes ``Omega_i`` up to its component along the
chord; the condition ``omega_l . k_l = 0`` fixes that component one cell at a
time, which makes the system lower triangular.
"""

from __future__ import annotations

import numpy as np

from .stem import StemState

MAX_SWEEPS = 200


class IllConditionedFrameError(RuntimeError):
    """The tangential recursion is singular or the fixed point failed to settle."""


def _cells(state: StemState):
    chords = np.diff(state.positions, axis=0)
    lengths = np.linalg.norm(chords, axis=1)
    if np.any(lengths == 0):
        raise IllConditionedFrameError("stem has a zero-length cell")
    return chords, chords / lengths[:, None]


def displacement_from_field(state: StemState, omega) -> np.ndarray:
    """Forward map: node displacements produced by the field ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != state.tangents.shape:
        raise ValueError("field must be given at every stem node")
    chords, _ = _cells(state)
    acc = np.zeros_like(omega)
    acc[1:] = state.ds * np.cumsum(omega[:-1], axis=0)
    v = np.zeros_like(omega)
    v[1:] = np.cumsum(np.cross(acc[:-1], chords), axis=0)
    return v


def _check_displacement(state: StemState, v, tol: float):
    chords, units = _cells(state)
    dv = np.diff(v, axis=0)
    scale = max(1.0, float(np.max(np.abs(v))))
    if np.max(np.abs(v[0])) > tol * scale:
        raise ValueError("displacement must vanish at the root")
    if np.max(np.abs(dv[0])) / state.ds > tol * scale:
        raise ValueError("displacement slope must vanish at the root")
    along = np.abs(np.sum(dv * units, axis=1)) / state.ds
    if np.max(along) > tol * scale:
        raise ValueError("displacement slope must be orthogonal to the stem")
    return chords, units, dv


def recover_field_from_displacement(state: StemState, v, method: str = "direct",
                                    tol: float = 1e-8, max_sweeps: int = MAX_SWEEPS):
    """Unique field with ``omega . k = 0`` whose displacement is ``v``.

    ``method="direct"`` runs the triangular recursion once; ``"fixed_point"``
    iterates the same equations on the tangential unknowns until they settle
    and raises :class:`IllConditionedFrameError` after ``max_sweeps`` sweeps.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != state.positions.shape:
        raise ValueError("displacement must be given at every stem node")
    n = state.n_nodes
    omega = np.zeros((n, 3))
    if n < 3:
        return omega
    chords, units, dv = _check_displacement(state, v, tol)
    k = state.tangents
    # component of Omega_i normal to cell i, read off the chord equation
    normal_part = np.cross(chords, dv) / np.sum(chords * chords, axis=1)[:, None]
    rows = np.arange(1, n - 1)
    pivot = np.sum(units[rows] * k[rows - 1], axis=1)
    if np.min(np.abs(pivot)) < 1e-8:
        raise IllConditionedFrameError("tangent nearly orthogonal to the next cell")

    if method == "direct":
        acc = np.zeros((n - 1, 3))
        for i in rows:
            along = (acc[i - 1] - normal_part[i]) @ k[i - 1] / pivot[i - 1]
            acc[i] = normal_part[i] + along * units[i]
    elif method == "fixed_point":
        along = np.zeros(n - 1)
        scale = max(1.0, float(np.max(np.abs(normal_part))))
        for _ in range(max_sweeps):
            acc = normal_part + along[:, None] * units
            acc[0] = 0.0
            new = np.zeros(n - 1)
            new[1:] = np.sum((acc[:-1] - normal_part[1:]) * k[:-2], axis=1) / pivot
            change = float(np.max(np.abs(new - along)))
            along = new
            if change <= 1e-14 * scale:
                break
        else:
            raise IllConditionedFrameError(
                f"fixed point did not settle within {max_sweeps} sweeps")
        acc = normal_part + along[:, None] * units
        acc[0] = 0.0
    else:
        raise ValueError(f"unknown method {method!r}")
    omega[: n - 2] = np.diff(acc, axis=0) / state.ds
    return omega
