"""Contact measures, the fields they generate and the admissible velocity cone."""

from __future__ import annotations

import numpy as np

from .obstacle import ObstacleSet, gradient, signed_distance
from .pushout import ContactMeasure, linear_displacement
from .stem import StemState, contact_set

NNLS_TOL = 1e-10


def _atom_field(state: StemState, obstacles: ObstacleSet, mu: ContactMeasure,
                beta: float) -> np.ndarray:
    """Summed form ``-e^{-beta(t-s)} sum_{s' >= s} w n(s') x (P(s') - P(s))``."""
    field = np.zeros_like(state.tangents)
    for j, wt in mu.atoms:
        n = gradient(obstacles, state.positions[j])
        chords = state.positions[j] - state.positions[: j + 1]
        field[: j + 1] -= wt * np.cross(n, chords)
    return np.exp(-beta * (state.t - state.s))[:, None] * field


def _nested_field(state: StemState, obstacles: ObstacleSet, mu: ContactMeasure,
                  beta: float) -> np.ndarray:
    """Nested form ``-e^{-beta(t-s)} int_s^T N(sigma) x P_s(sigma) d sigma``.

    ``N(sigma)`` is the normal force carried by atoms at or beyond ``sigma``;
    it is constant on each open cell, where the trapezoid rule for ``P_s``
    reproduces the cell chord.
    """
    n_nodes = state.n_nodes
    force = np.zeros((n_nodes, 3))
    for j, wt in mu.atoms:
        force[j] += wt * gradient(obstacles, state.positions[j])
    # cell (i, i+1) sees atoms at nodes >= i + 1
    tail = np.cumsum(force[::-1], axis=0)[::-1]
    cell_force = tail[1:]
    chords = np.diff(state.positions, axis=0)
    cell_terms = np.cross(cell_force, chords)
    inner = np.zeros((n_nodes, 3))
    inner[:-1] = np.cumsum(cell_terms[::-1], axis=0)[::-1]
    return -np.exp(-beta * (state.t - state.s))[:, None] * inner


def measure_representation_field(state: StemState, obstacles: ObstacleSet,
                                 mu: ContactMeasure, beta: float, tol: float = 1e-6,
                                 form: str = "summed") -> np.ndarray:
    """Rotation field generated by a contact measure.

    ``form`` selects the summed expression or the nested double integral;
    the two agree to round-off. Atoms must sit on the boundary within ``tol``.
    """
    for j, _ in mu.atoms:
        if not 0 <= j < state.n_nodes:
            raise ValueError(f"atom at node {j} is outside the stem grid")
        phi = float(signed_distance(obstacles, state.positions[j]))
        if abs(phi) > tol:
            raise ValueError(f"atom at node {j} is not in the contact set (phi = {phi:.3e})")
    if form == "summed":
        return _atom_field(state, obstacles, mu, beta)
    if form == "nested":
        return _nested_field(state, obstacles, mu, beta)
    raise ValueError(f"unknown form {form!r}")


def cone_velocity(state: StemState, field) -> np.ndarray:
    """Velocity ``v(s) = int_0^s omega(sigma) x (P(s) - P(sigma)) d sigma`` of a field."""
    return linear_displacement(state, field)


def nnls(A, b, tol: float = NNLS_TOL, max_sweeps: int = 100000):
    """Nonnegative least squares by projected coordinate descent.

    Minimizes ``|A x - b|`` over ``x >= 0``. Stops when the projected gradient
    of ``1/2 |A x - b|^2`` is below ``tol`` times the scale of ``A^T b``.
    After each sweep the support found so far is polished by an unconstrained
    solve on it, accepted only if it stays positive and stationary.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m = A.shape[1]
    x = np.zeros(m)
    if m == 0:
        return x, float(np.linalg.norm(b))
    Q = A.T @ A
    q = A.T @ b
    diag = np.diag(Q).copy()
    scale = max(1.0, float(np.max(np.abs(q))))
    active = diag > 0

    def stationarity(xv, g):
        pg = np.where(xv > 0, g, np.minimum(g, 0.0))
        return float(np.max(np.abs(pg[active]), initial=0.0))

    grad = -q.copy()
    for _ in range(max_sweeps):
        for j in np.flatnonzero(active):
            new = max(0.0, x[j] - grad[j] / diag[j])
            delta = new - x[j]
            if delta != 0.0:
                x[j] = new
                grad += delta * Q[:, j]
        if stationarity(x, grad) <= tol * scale:
            break
        support = np.flatnonzero(x > 0)
        if support.size:
            sol = np.linalg.lstsq(A[:, support], b, rcond=None)[0]
            if np.all(sol > 0):
                trial = np.zeros(m)
                trial[support] = sol
                g_trial = Q @ trial - q
                if stationarity(trial, g_trial) <= tol * scale:
                    x, grad = trial, g_trial
                    break
    return x, float(np.linalg.norm(A @ x - b))


def cone_membership_residual(state: StemState, obstacles: ObstacleSet, v, beta: float,
                             tol: float = 1e-6, return_measure: bool = False):
    """Distance (discrete L2) from ``v`` to the cone of contact-generated velocities.

    Each contact node contributes the velocity of a unit atom; nonnegative
    weights are fitted by :func:`nnls`. A residual near zero certifies that
    ``v`` is produced by a positive contact measure.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != state.positions.shape:
        raise ValueError("velocity must be given at every stem node")
    sqw = np.sqrt(_row_weights(state))
    target = (sqw[:, None] * v).ravel()
    nodes = contact_set(state, obstacles, tol).indices if len(obstacles) else np.zeros(0, int)
    cols = []
    for j in nodes:
        unit = ContactMeasure((int(j),), (1.0,))
        u = cone_velocity(state, _atom_field(state, obstacles, unit, beta))
        cols.append((sqw[:, None] * u).ravel())
    A = np.column_stack(cols) if cols else np.zeros((target.size, 0))
    weights, residual = nnls(A, target)
    if return_measure:
        keep = weights > 0
        mu = ContactMeasure(tuple(int(j) for j in nodes[keep]), tuple(weights[keep]))
        return residual, mu
    return residual


def _row_weights(state: StemState) -> np.ndarray:
    # trapezoid weights give the discrete L2 norm on [0, s_last]
    w = np.full(state.n_nodes, state.ds)
    w[0] = w[-1] = 0.5 * state.ds
    if state.n_nodes == 1:
        w[0] = 1.0
    return w

