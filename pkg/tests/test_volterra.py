import numpy as np
import pytest

from stemgrowth.stem import make_state, straight_state
from stemgrowth.volterra import (IllConditionedFrameError, displacement_from_field,
                                 recover_field_from_displacement)


def random_stem(rng, n=200, ds=0.01):
    turn = np.cumsum(rng.normal(scale=0.05, size=(n, 2)), axis=0)
    k = np.column_stack([np.cos(turn[:, 0]) * np.cos(turn[:, 1]),
                         np.sin(turn[:, 0]) * np.cos(turn[:, 1]), np.sin(turn[:, 1])])
    return make_state(k, ds)


def random_perp_field(rng, st):
    w = rng.normal(size=st.tangents.shape)
    w -= np.sum(w * st.tangents, axis=1, keepdims=True) * st.tangents
    w[-2:] = 0.0  # the last two entries reach no node
    return w


def test_zero_displacement_gives_zero_field():
    st = straight_state([1, 0, 0], 20, 0.05)
    assert np.array_equal(recover_field_from_displacement(st, np.zeros((20, 3))),
                          np.zeros((20, 3)))


@pytest.mark.parametrize("method", ["direct", "fixed_point"])
def test_round_trip(rng, method):
    st = random_stem(rng)
    for _ in range(5):
        w = random_perp_field(rng, st)
        v = displacement_from_field(st, w)
        rec = recover_field_from_displacement(st, v, method=method)
        assert np.linalg.norm(rec - w) / np.linalg.norm(w) <= 1e-6
        assert np.max(np.abs(np.sum(rec * st.tangents, axis=1))) <= 1e-10


def test_methods_agree(rng):
    st = random_stem(rng)
    v = displacement_from_field(st, random_perp_field(rng, st))
    a = recover_field_from_displacement(st, v, method="direct")
    b = recover_field_from_displacement(st, v, method="fixed_point")
    assert np.allclose(a, b, atol=1e-12)


def test_forward_map_approximates_integral():
    # constant field about z on a straight x stem: v(s) = int_0^s w x (s - sigma) e1 = w s^2 / 2 e2
    n = 401
    st = straight_state([1, 0, 0], n, 1.0 / (n - 1))
    w = np.tile([0.0, 0.0, 2.0], (n, 1))
    v = displacement_from_field(st, w)
    assert np.allclose(v[:, 1], st.s ** 2, atol=2 * st.ds)
    assert np.max(np.abs(v[:, [0, 2]])) == 0.0


def test_tangential_part_is_dropped():
    rng = np.random.default_rng(3)
    st = straight_state([1, 0, 0], 30, 0.05)
    w = random_perp_field(rng, st)
    phi = np.sin(st.s)[:, None] * st.tangents
    v_plain = displacement_from_field(st, w)
    v_twisted = displacement_from_field(st, w + phi)
    assert np.allclose(v_plain, v_twisted, atol=1e-15)
    assert np.allclose(recover_field_from_displacement(st, v_twisted), w, atol=1e-10)


def test_preconditions_enforced(rng):
    st = random_stem(rng, n=30, ds=0.05)
    v = displacement_from_field(st, random_perp_field(rng, st))
    with pytest.raises(ValueError):
        recover_field_from_displacement(st, v + [1e-3, 0.0, 0.0])
    bad = v.copy()
    bad[1] += 1e-3 * st.tangents[0]
    with pytest.raises(ValueError):
        recover_field_from_displacement(st, bad)
    along = v.copy()
    along[10:] += 1e-3 * (np.arange(20)[:, None]) * np.array([1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        recover_field_from_displacement(st, along)
    with pytest.raises(ValueError):
        recover_field_from_displacement(st, v, method="other")


def test_fixed_point_sweep_cap(rng):
    st = random_stem(rng, n=40, ds=0.05)
    v = displacement_from_field(st, random_perp_field(rng, st))
    with pytest.raises(IllConditionedFrameError):
        recover_field_from_displacement(st, v, method="fixed_point", max_sweeps=1)


def test_right_angle_kink_is_ill_conditioned():
    k = np.array([[1.0, 0, 0]] * 5 + [[0, 1.0, 0]] * 5)
    st = make_state(k, 0.1)
    st = st.__class__(t=st.t, ds=st.ds, tangents=st.tangents,
                      positions=np.vstack([np.zeros(3), np.cumsum(0.1 * k[:-1], axis=0)]))
    with pytest.raises(IllConditionedFrameError):
        recover_field_from_displacement(st, np.zeros((10, 3)) + 0.0 * st.positions)
