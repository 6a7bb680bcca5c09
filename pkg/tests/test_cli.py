"""Tests for `implicit_shape_matching.cli` module."""
import json

import numpy as np
import pytest

from implicit_shape_matching import cli
from implicit_shape_matching.data import PkgDataAccess
from implicit_shape_matching.model import ShapeMatchingModel
from implicit_shape_matching.scene import read_scene
from implicit_shape_matching.verification import REPORT_HEADER

# Globals
FREE_FALL = {
    "name": "free_fall",
    "dim": 2,
    "particles": [
        {"rest_position": [0.0, 0.0], "stiffness": 0.0},
        {"rest_position": [1.0, 0.0], "stiffness": 0.0},
        {"rest_position": [1.0, 1.0], "stiffness": 0.0},
    ],
    "params": {"alpha": 0.0, "beta": 0.0},
    "integrator": {"dt": 0.1, "scheme": "backward-euler", "gravity": [0.0, -10.0]},
}
SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def write_scene(tmp_path, data, name="scene.json"):
    file_path = tmp_path / name
    file_path.write_text(json.dumps(data))
    return str(file_path)


def read_rows(file_path):
    lines = file_path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def test_simulate_free_fall(tmp_path, capsys):
    out = tmp_path / "fall.csv"
    scene = write_scene(tmp_path, FREE_FALL)
    code = cli.main(["simulate", "--scene", scene, "--out", str(out), "--steps", "1"])
    assert code == cli.EXIT_OK
    header, rows = read_rows(out)
    assert header == "frame,particle,px,py,vx,vy"
    final = [row for row in rows if row[0] == "1"]
    assert len(final) == 3
    assert all(row[5] == "-1.0" for row in final)
    assert all(row[4] == "0.0" for row in final)
    assert capsys.readouterr().out.startswith("steps=1 newton_iters=1 ")


def test_simulate_rest_scene_is_static(tmp_path):
    out = tmp_path / "rest.csv"
    code = cli.main(
        [
            "simulate",
            "--scene",
            "rest_3d",
            "--out",
            str(out),
            "--steps",
            "10",
            "--scheme",
            "backward-euler",
        ]
    )
    assert code == cli.EXIT_OK
    header, rows = read_rows(out)
    assert header == "frame,particle,px,py,pz,vx,vy,vz"
    frames = {}
    for row in rows:
        frames.setdefault(row[0], []).append(row[1:])
    assert sorted(frames, key=int) == [str(k) for k in range(11)]
    assert all(frames[key] == frames["0"] for key in frames)


def test_simulate_zero_steps_round_trip(tmp_path):
    out = tmp_path / "zero.csv"
    code = cli.main(
        ["simulate", "--scene", "stiff_square_2d", "--out", str(out), "--steps", "0"]
    )
    assert code == cli.EXIT_OK
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    initial = PkgDataAccess.load_scene("stiff_square_2d").initial
    assert np.array_equal(data[:, 2:4], initial.positions)
    assert np.array_equal(data[:, 4:6], initial.velocities)


def test_simulate_unknown_key(tmp_path, capsys):
    data = json.loads(json.dumps(FREE_FALL))
    data["particles"][2]["charge"] = 1.0
    scene = write_scene(tmp_path, data)
    out = tmp_path / "never.csv"
    code = cli.main(["simulate", "--scene", scene, "--out", str(out)])
    assert code == cli.EXIT_INPUT
    assert "particles[2].charge" in capsys.readouterr().err
    assert not out.exists()


def test_simulate_unknown_scene(tmp_path, capsys):
    out = tmp_path / "never.csv"
    code = cli.main(["simulate", "--scene", "no_such_scene", "--out", str(out)])
    assert code == cli.EXIT_INPUT
    assert "no_such_scene" in capsys.readouterr().err


def test_simulate_solver_failure(tmp_path, capsys):
    data = json.loads(json.dumps(FREE_FALL))
    for particle in data["particles"]:
        particle["stiffness"] = 1e4
    data["particles"][1]["initial_position"] = [3.0, 0.5]
    data["integrator"]["newton_tol"] = 1e-14
    data["integrator"]["max_iters"] = 1
    scene = write_scene(tmp_path, data)
    code = cli.main(["simulate", "--scene", scene, "--out", str(tmp_path / "x.csv")])
    assert code == cli.EXIT_SOLVER
    assert "frame 1" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["simulate", "--out", "x.csv"],
        ["simulate", "--scene", "rest_3d", "--out", "x.csv", "--scheme", "rk4"],
        ["check-derivatives"],
        ["check-derivatives", "--scene", "rest_3d", "--random", "5", "3", "0"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == cli.EXIT_INPUT


def test_check_derivatives_random(capsys):
    code = cli.main(["check-derivatives", "--random", "6", "3", "42"])
    lines = capsys.readouterr().out.splitlines()
    assert code == cli.EXIT_OK
    assert lines[0] == REPORT_HEADER
    assert all(line.endswith((",pass", ",skipped")) for line in lines[1:])


def test_check_derivatives_linear_scene(tmp_path):
    out = tmp_path / "report.csv"
    code = cli.main(["check-derivatives", "--scene", "gamma_one_2d", "--out", str(out)])
    assert code == cli.EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == REPORT_HEADER
    assert sum(line.endswith(",skipped") for line in lines) == 5
    assert "omega_second,nan,1e-05,skipped" in lines


def test_check_derivatives_detects_wrong_sign(monkeypatch, capsys):
    monkeypatch.setattr(
        "implicit_shape_matching.rotation.second._STRETCH_RATE_SIGN", 1.0
    )
    code = cli.main(["check-derivatives", "--random", "6", "3", "42"])
    assert code == cli.EXIT_CHECK
    assert "omega_second" in [
        line.split(",")[0]
        for line in capsys.readouterr().out.splitlines()
        if line.endswith(",fail")
    ]


def test_check_derivatives_invalid_random(capsys):
    assert cli.main(["check-derivatives", "--random", "2", "3", "0"]) == cli.EXIT_INPUT
    assert "error" in capsys.readouterr().err


def test_energy_report_at_rest(capsys):
    code = cli.main(["energy-report", "--scene", "rest_3d"])
    assert code == cli.EXIT_OK
    values = dict(
        line.split("=", 1) for line in capsys.readouterr().out.splitlines()
    )
    assert list(values) == [
        "V",
        "V_da",
        "V_db",
        "V_d",
        "grad_norm",
        "hess_eig_min",
        "hess_eig_max",
    ]
    assert float(values["V"]) < 1e-20
    assert float(values["V_d"]) == 0.0


def square_scene(positions, velocities=None):
    particles = []
    for index, rest in enumerate(SQUARE):
        particle = {"rest_position": rest, "initial_position": list(positions[index])}
        if velocities is not None:
            particle["initial_velocity"] = list(velocities[index])
        particles.append(particle)
    return {"name": "square", "dim": 2, "particles": particles}


def report_values(capsys):
    return dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())


@pytest.mark.parametrize("command", ["simulate", "energy-report"])
def test_non_utf8_scene_is_input_error(tmp_path, capsys, command):
    scene = tmp_path / "binary.json"
    scene.write_bytes(b"\xff\xfe{\x00")
    argv = [command, "--scene", str(scene)]
    if command == "simulate":
        argv += ["--out", str(tmp_path / "never.csv")]
    assert cli.main(argv) == cli.EXIT_INPUT
    assert "<file>" in capsys.readouterr().err


@pytest.mark.parametrize("key", ["mass", "stiffness"])
@pytest.mark.parametrize("command", ["simulate", "energy-report"])
def test_nan_particle_weight_is_input_error(tmp_path, capsys, command, key):
    text = json.dumps(FREE_FALL).replace(
        '"stiffness": 0.0}', f'"stiffness": 0.0, "{key}": NaN}}', 1
    )
    if key == "stiffness":
        text = text.replace('"stiffness": 0.0, ', "", 1)
    scene = tmp_path / "nan.json"
    scene.write_text(text)
    argv = [command, "--scene", str(scene)]
    if command == "simulate":
        argv += ["--out", str(tmp_path / "never.csv")]
    assert cli.main(argv) == cli.EXIT_INPUT
    assert f"particles[0].{key}" in capsys.readouterr().err


def test_check_derivatives_mirrored_scene_is_input_error(tmp_path, capsys):
    mirrored = [[-x, y] for x, y in SQUARE]
    scene = write_scene(tmp_path, square_scene(mirrored))
    code = cli.main(["check-derivatives", "--scene", scene])
    captured = capsys.readouterr()
    assert code == cli.EXIT_INPUT
    assert "inverted or degenerate" in captured.err
    assert captured.out == ""


def test_simulate_is_bit_identical(tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        argv = ["simulate", "--scene", "stiff_square_2d", "--out", str(out)]
        assert cli.main(argv + ["--steps", "40"]) == cli.EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_energy_report_rigidly_rotated_scene(tmp_path, capsys):
    angle = 0.6
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    positions = np.array(SQUARE) @ rot.T + [2.0, -1.0]
    scene = write_scene(tmp_path, square_scene(positions.tolist()))
    assert cli.main(["energy-report", "--scene", scene]) == cli.EXIT_OK
    values = report_values(capsys)
    assert float(values["V"]) < 1e-24
    assert float(values["V_d"]) == 0.0
    assert float(values["grad_norm"]) < 1e-12


def test_energy_report_matches_library(tmp_path, capsys):
    positions = [[1.3 * x, 0.9 * y + 0.1 * x] for x, y in SQUARE]
    velocities = [[0.2, 0.0], [0.0, -0.1], [0.3, 0.1], [-0.2, 0.2]]
    data = square_scene(positions, velocities)
    data["params"] = {"gamma": 0.3, "alpha": 0.1, "beta": 0.05}
    scene = write_scene(tmp_path, data)
    assert cli.main(["energy-report", "--scene", scene]) == cli.EXIT_OK
    values = report_values(capsys)
    expected = ShapeMatchingModel(read_scene(scene)).energy_report()
    assert values == {key: repr(value) for key, value in expected.items()}
    assert float(values["V"]) > 0.0
    assert float(values["V_d"]) > 0.0
