import numpy as np

from stemgrowth.breakdown import check_breakdown
from stemgrowth.obstacle import HalfSpace, ObstacleSet, Sphere
from stemgrowth.scenarios import curved_contact
from stemgrowth.stem import make_state, straight_state


def wall_at(y):
    return ObstacleSet((HalfSpace([0.0, y, 0.0], [0.0, -1.0, 0.0]),))


def test_far_from_obstacles():
    st = straight_state([0, 1, 0], 11, 0.1)
    rep = check_breakdown(st, ObstacleSet((Sphere([5.0, 5.0], 1.0),)))
    assert not rep.is_breakdown and not rep.tip_on_boundary and rep.straight_off_contact


def test_head_on_straight_stem():
    st = straight_state([0, 1, 0], 11, 0.1)
    rep = check_breakdown(st, wall_at(st.tip[1]))
    assert rep.tip_on_boundary and rep.tip_perpendicular and rep.straight_off_contact
    assert rep.is_breakdown and rep.angle_defect == 0.0
    assert rep.as_dict()["is_breakdown"] is True


def test_head_on_along_e3():
    st = straight_state([0, 0, 1], 11, 0.1)
    roof = ObstacleSet((HalfSpace([0.0, 0.0, st.tip[2]], [0.0, 0.0, -1.0]),))
    assert check_breakdown(st, roof).is_breakdown


def test_curved_free_arc_is_not_breakdown():
    cfg, st = curved_contact()
    rep = check_breakdown(st, cfg.obstacles)
    assert rep.tip_on_boundary and rep.tip_perpendicular
    assert not rep.straight_off_contact and not rep.is_breakdown
    # discrete curvature scan: the turn of pi/4 over length 1 gives about pi/4 per unit length
    assert abs(rep.max_off_contact_curvature - np.pi / 4) < 1e-3


def test_oblique_tip_not_perpendicular():
    k = np.tile([np.sin(0.1), np.cos(0.1), 0.0], (11, 1))
    st = make_state(k, 0.1)
    rep = check_breakdown(st, wall_at(st.tip[1]))
    assert rep.tip_on_boundary and not rep.tip_perpendicular
    assert abs(rep.angle_defect - 0.1) < 1e-12


def test_tolerance_bands():
    st = straight_state([0, 1, 0], 11, 0.1)
    near = wall_at(st.tip[1] + 1e-7)
    assert check_breakdown(st, near).is_breakdown
    assert not check_breakdown(st, near, tol_dist=1e-8).is_breakdown
    k = np.tile([0.0, 1.0, 0.0], (11, 1))
    k[3] = [np.sin(5e-3), np.cos(5e-3), 0.0]
    bent = make_state(k, 0.1)
    obs = wall_at(bent.tip[1])
    assert not check_breakdown(bent, obs).straight_off_contact
    assert check_breakdown(bent, obs, tol_curv=0.1).straight_off_contact


def test_no_obstacles():
    rep = check_breakdown(straight_state([0, 1, 0], 5, 0.1), ObstacleSet())
    assert not rep.is_breakdown
