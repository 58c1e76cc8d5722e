import json

import numpy as np
import pytest

from stemgrowth.cli import main
from stemgrowth.config import preset_dict
from stemgrowth.scenarios import head_on_dict

SUMMARY_KEYS = {"status", "t_final", "penetration_final", "max_step_omega_norm",
                "max_step_measure_mass", "frames_written"}


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_preset_sim1_left(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["preset", "--name", "sim1-left", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["figure.png", "figure.svg", "frames.csv",
                                                     "summary.json"]
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) == SUMMARY_KEYS and summary["status"] == "completed"
    assert summary["penetration_final"] <= 1e-9
    assert "status\tcompleted" in capsys.readouterr().out


def test_preset_without_png(tmp_path):
    out = tmp_path / "o"
    assert main(["preset", "--name", "sim1-right", "--out", str(out), "--no-png",
                 "--save-config"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["config.json", "figure.svg", "frames.csv",
                                                     "summary.json"]
    assert main(["run", "--config", str(out / "config.json"), "--out", str(tmp_path / "r"),
                 "--no-png"]) == 0
    assert (tmp_path / "r" / "frames.csv").read_bytes() == (out / "frames.csv").read_bytes()


def test_run_penetrating_initial_curve(tmp_path, capsys):
    doc = preset_dict("sim1-left")
    doc["obstacles"][0]["center"] = [0.9, 0.8]
    code = main(["run", "--config", str(write(tmp_path / "c.json", doc)),
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "penetrates" in capsys.readouterr().err


def test_run_head_on_breakdown(tmp_path):
    out = tmp_path / "o"
    code = main(["run", "--config", str(write(tmp_path / "c.json", head_on_dict())),
                 "--out", str(out)])
    assert code == 2
    assert json.loads((out / "summary.json").read_text())["status"] == "breakdown"


def test_run_push_failure(tmp_path):
    doc = preset_dict("sim2-gamma3")
    doc["run"].update(push_max_iter=1, push_tol=1e-14)
    code = main(["run", "--config", str(write(tmp_path / "c.json", doc)),
                 "--out", str(tmp_path / "o"), "--no-png"])
    assert code == 3
    assert json.loads((tmp_path / "o" / "summary.json").read_text())["status"] == "push_failure"


def test_run_nonplanar_skips_figures(tmp_path):
    doc = preset_dict("sim1-left")
    doc["model"]["up"] = [0.0, 0.0, 1.0]
    doc["obstacles"] = [{"type": "sphere", "center": [1.2, 0.3, 1.5], "radius": 0.5}]
    out = tmp_path / "o"
    assert main(["run", "--config", str(write(tmp_path / "c.json", doc)), "--out",
                 str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["frames.csv", "summary.json"]


def test_verify(tmp_path, capsys):
    path = write(tmp_path / "c.json", preset_dict("sim2-gamma7"))
    assert main(["verify", "--config", str(path), "--steps", "20"]) == 0
    lines = capsys.readouterr().out.splitlines()
    names = [ln.split()[1].rstrip(":") for ln in lines]
    assert names == ["rotation_orthogonality", "unit_tangents", "planarity_closure",
                     "feasibility", "determinism"]
    assert all(ln.startswith("PASS") for ln in lines)


def test_verify_bad_steps(tmp_path):
    path = write(tmp_path / "c.json", preset_dict("sim1-left"))
    assert main(["verify", "--config", str(path), "--steps", "0"]) == 1


@pytest.mark.parametrize("argv", [[], ["bogus"], ["run", "--config"],
                                  ["preset", "--name", "sim9", "--out", "x"],
                                  ["run", "--config", "a.json", "--out", "o", "--flag"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_config_error_names_key(tmp_path, capsys):
    doc = preset_dict("sim1-left")
    doc["run"]["ds"] = -0.05
    assert main(["run", "--config", str(write(tmp_path / "c.json", doc)),
                 "--out", str(tmp_path / "o")]) == 1
    assert "run.ds" in capsys.readouterr().err


def test_frames_csv_matches_summary(tmp_path):
    out = tmp_path / "o"
    main(["preset", "--name", "sim2-gamma4", "--out", str(out), "--no-png"])
    summary = json.loads((out / "summary.json").read_text())
    idx = np.loadtxt(out / "frames.csv", delimiter=",", skiprows=1, usecols=0)
    assert np.unique(idx).size == summary["frames_written"]
