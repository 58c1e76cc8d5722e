import math

import numpy as np
import pytest

from stemgrowth.obstacle import ObstacleSet, Sphere
from stemgrowth.stem import (ElongationLaw, contact_set, deepest_node, discrete_curvature,
                             elongate, extend_beyond_tip, make_state, penetration_depth,
                             rebuild_positions, state_from_curve, straight_state)

# frozen: total length t - (1 - e^{-alpha t}) / alpha at alpha = t = 1
LENGTH_ALPHA1_T1 = 0.36787944117144233


def test_straight_vertical_positions():
    st = straight_state([0, 0, 1], 11, 0.1)
    expected = np.column_stack([np.zeros(11), np.zeros(11), 0.1 * np.arange(11)])
    assert np.allclose(st.positions, expected, atol=1e-15)
    assert np.array_equal(st.positions[0], np.zeros(3))


def test_finite_alpha_positions():
    n = 1001
    st = make_state(np.tile([0.0, 0.0, 1.0], (n, 1)), 1.0 / (n - 1), t=1.0,
                    law=ElongationLaw(1.0))
    s = st.s
    exact = s - (np.exp(s - 1.0) - np.exp(-1.0))
    assert np.allclose(st.positions[:, 2], exact, atol=1e-7)
    assert st.positions[-1, 2] == pytest.approx(LENGTH_ALPHA1_T1, abs=1e-7)
    assert ElongationLaw(1.0).total_length(1.0) == pytest.approx(LENGTH_ALPHA1_T1, abs=1e-15)


def test_finite_alpha_length_second_order():
    errs = []
    for n in (21, 41, 81):
        st = make_state(np.tile([0.0, 0.0, 1.0], (n, 1)), 1.0 / (n - 1), t=1.0,
                        law=ElongationLaw(1.0))
        errs.append(abs(st.positions[-1, 2] - LENGTH_ALPHA1_T1))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_root_only_stem():
    st = make_state([[0.0, 1.0, 0.0]], 0.1)
    assert st.n_nodes == 1
    assert np.array_equal(st.positions, np.zeros((1, 3)))


def test_rebuild_positions_switches_law():
    st = straight_state([1, 0, 0], 5, 0.25)
    re = rebuild_positions(st, ElongationLaw(2.0))
    assert re.law.alpha == 2.0
    assert re.positions[-1, 0] < st.positions[-1, 0]


def test_elongation_law_validation():
    with pytest.raises(ValueError):
        ElongationLaw(0.0)
    assert ElongationLaw().instantaneous
    assert np.array_equal(ElongationLaw().weights(1.0, [0.0, 0.5]), [1.0, 1.0])


def test_elongate_continues_tip():
    st = straight_state([1, 0, 0], 4, 0.1)
    longer = elongate(st)
    assert longer.n_nodes == 5
    assert np.allclose(longer.tip, st.tip + [0.1, 0.0, 0.0])
    assert discrete_curvature(longer)[-1] == 0.0
    assert longer.t == st.t


def test_elongate_curved_tip_curvature_zero():
    phi = np.linspace(0, 1, 8)
    st = make_state(np.column_stack([np.cos(phi), np.sin(phi), 0 * phi]), 0.1)
    assert discrete_curvature(elongate(st))[-1] == 0.0


def test_extension_beyond_tip():
    phi = np.linspace(0, 1, 8)
    st = make_state(np.column_stack([np.cos(phi), np.sin(phi), 0 * phi]), 0.1)
    ev = extend_beyond_tip(st, st.s_last + 1.0)
    assert np.array_equal(ev(st.s_last), st.tip)
    beyond = ev(st.s_last + np.linspace(0.1, 1.0, 10))
    second = beyond[2:] - 2 * beyond[1:-1] + beyond[:-2]
    assert np.max(np.abs(second)) < 1e-14
    assert np.allclose(ev(st.s), st.positions)
    straight = straight_state([0, 1, 0], 5, 0.1)
    pts = extend_beyond_tip(straight, 2.0)(np.array([0.7, 1.5]))
    assert np.allclose(pts[:, 0], 0.0) and np.allclose(pts[:, 1], [0.7, 1.5])
    with pytest.raises(ValueError):
        extend_beyond_tip(st, 0.1)


def test_penetration_depth_cases():
    far = straight_state([1, 0, 0], 5, 0.1)
    ball = ObstacleSet((Sphere([5.0, 0.0], 0.5),))
    assert penetration_depth(far, ball) == 0.0
    st = straight_state([1, 0, 0], 3, 0.25)  # nodes at x = 0, 0.25, 0.5
    one = ObstacleSet((Sphere([0.5, 0.0], 0.25),))
    assert penetration_depth(st, one) == pytest.approx(0.25)
    # two penetrating nodes at depths 0.1 and 0.3, scanned exhaustively
    two = ObstacleSet((Sphere([0.5, 0.0], 0.3),))
    st2 = make_state(np.tile([1.0, 0.0, 0.0], (3, 1)), 0.2)
    st2 = st2.__class__(t=st2.t, ds=st2.ds, tangents=st2.tangents,
                        positions=np.array([[0.0, 0, 0], [0.3, 0, 0], [0.5, 0, 0]]))
    phis = np.linalg.norm(st2.positions - [0.5, 0, 0], axis=1) - 0.3
    assert np.allclose(sorted(-phis[phis < 0]), [0.1, 0.3])
    assert penetration_depth(st2, two) == pytest.approx(0.3)
    assert deepest_node(st2, two) == (2, pytest.approx(0.3))


def test_contact_set_threshold():
    st = straight_state([1, 0, 0], 4, 0.25)
    obs = ObstacleSet((Sphere([1.25 + 1e-7, 0.0], 0.5),))  # tip at distance 1e-7 -> node 3
    cs = contact_set(st, obs, 1e-6)
    assert list(cs.indices) == [3] and 3 in cs
    obs2 = ObstacleSet((Sphere([1.25 + 1e-5, 0.0], 0.5),))
    assert len(contact_set(st, obs2, 1e-6)) == 0
    on = ObstacleSet((Sphere([1.25, 0.0], 0.5),))  # node 3 exactly on boundary
    assert 3 in contact_set(st, on, 1e-12)
    assert len(contact_set(st, ObstacleSet(), 1e-6)) == 0
    with pytest.raises(ValueError):
        contact_set(st, obs, 0.0)


def test_state_from_curve_resamples():
    y = np.linspace(0, 1, 2001)
    pts = np.column_stack([np.zeros_like(y), y])
    st = state_from_curve(pts, 0.1)
    assert st.n_nodes == 11
    assert np.allclose(st.tangents, [0, 1, 0])
    assert st.t == pytest.approx(1.0)
    with pytest.raises(ValueError):
        state_from_curve(np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]), 0.1)


def test_total_length_matches_arc_length():
    phi = np.linspace(0, 2, 41)
    st = make_state(np.column_stack([np.cos(phi), np.sin(phi), 0 * phi]), 0.05)
    chord_sum = np.sum(np.linalg.norm(np.diff(st.positions, axis=0), axis=1))
    assert abs(chord_sum - st.s_last) <= 2 * st.ds
    assert math.isclose(st.s_last, 2.0)
