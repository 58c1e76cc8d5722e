import numpy as np
import pytest

from stemgrowth.config import preset
from stemgrowth.obstacle import ObstacleSet, Sphere
from stemgrowth.output import (CSV_HEADER, OutputError, read_frames, render_svg,
                               render_svg_text, write_frames)
from stemgrowth.scenarios import head_on
from stemgrowth.sim import Frame, FrameLog, prepare_initial_state, run


def single_frame_log():
    pos = np.array([[0.0, 0.0, 0.0], [0.1, 0.2, 0.0], [0.3, 0.1 + 1e-17, 0.0]])
    k = np.array([[1.0, 0.0, 0.0]] * 3)
    return FrameLog(ds=0.1, stride=1, frames=[Frame(0, 0.2, pos, k, np.array([2]))])


def test_single_frame_rows(tmp_path):
    path = tmp_path / "f.csv"
    write_frames(single_frame_log(), path)
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "frame_index,t,s,x,y,z,kx,ky,kz,phi,in_contact"
    assert tuple(lines[0].split(",")) == CSV_HEADER
    assert lines[1].split(",")[-2] == "inf" and lines[3].endswith(",1")


def test_empty_log_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_frames(FrameLog(ds=0.1, stride=1), tmp_path / "f.csv")


def test_unwritable_path(tmp_path):
    with pytest.raises(OutputError, match="missing"):
        write_frames(single_frame_log(), tmp_path / "missing" / "f.csv")


def test_bit_exact_round_trip(tmp_path):
    cfg = preset("sim1-left")
    out = run(cfg)
    path = tmp_path / "f.csv"
    write_frames(out.log, path, cfg.obstacles)
    data = read_frames(path)
    pos = np.vstack([fr.positions for fr in out.log.frames])
    tan = np.vstack([fr.tangents for fr in out.log.frames])
    assert np.array_equal(np.column_stack([data["x"], data["y"], data["z"]]), pos)
    assert np.array_equal(np.column_stack([data["kx"], data["ky"], data["kz"]]), tan)
    # rows sorted by (frame_index, s)
    order = np.lexsort((data["s"], data["frame_index"]))
    assert np.array_equal(order, np.arange(order.size))
    # node-count law: final frame holds initial nodes plus one per step
    n0 = prepare_initial_state(cfg).n_nodes
    last = data["frame_index"] == data["frame_index"].max()
    assert last.sum() == n0 + out.steps


def test_svg_sim1_disc_position(tmp_path):
    cfg = preset("sim1-left")
    out = run(cfg)
    text = render_svg_text(out.log, cfg.obstacles)
    pts = np.vstack([fr.positions[:, :2] for fr in out.log.frames[::10] + [out.log.last]])
    lo = np.minimum(pts.min(axis=0), [0.7, 1.0])
    hi = np.maximum(pts.max(axis=0), [1.7, 2.0])
    pad = 0.1 * (hi - lo).max()
    scale = 600.0 / (hi[0] - lo[0] + 2 * pad)
    cx = (1.2 - lo[0] + pad) * scale
    cy = (hi[1] + pad - 1.5) * scale
    assert f'cx="{cx:.3f}" cy="{cy:.3f}" r="{0.5 * scale:.3f}"' in text
    assert text.count("<circle") == 1 and 'class="stem final"' in text


def test_svg_without_obstacles_has_only_polylines():
    text = render_svg_text(single_frame_log(), ObstacleSet())
    assert "<circle" not in text and "<polygon" not in text and "<polyline" in text


def test_svg_half_space_drawn_as_polygon():
    cfg = head_on()
    text = render_svg_text(run(cfg).log, cfg.obstacles)
    assert text.count("<polygon") == 1


def test_svg_deterministic(tmp_path):
    cfg = preset("sim2-gamma7")
    out = run(cfg)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_svg(out.log, cfg.obstacles, a)
    render_svg(out.log, cfg.obstacles, b)
    assert a.read_bytes() == b.read_bytes()


def test_svg_rejects_nonplanar():
    log = single_frame_log()
    log.frames[0].positions[1, 2] = 0.1
    with pytest.raises(ValueError):
        render_svg_text(log, ObstacleSet())
    flat = single_frame_log()
    with pytest.raises(ValueError):
        render_svg_text(flat, ObstacleSet((Sphere([0.0, 0.0, 1.0], 0.5),)))
    with pytest.raises(ValueError):
        render_svg_text(FrameLog(ds=0.1, stride=1), ObstacleSet())
