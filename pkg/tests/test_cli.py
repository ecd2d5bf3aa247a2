"""Command-line behavior: formats, determinism, exit codes, config file."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from heisgeo.cli import main

TWO_PI = 2.0 * math.pi


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGeodesicCommand:
    def test_csv_columns_and_values(self, capsys, tmp_path):
        out = tmp_path / "line.csv"
        code, _, _ = run(
            ["geodesic", "--gamma", "0", "--phi", "0", "--smax", "2", "--n", "4",
             "--out", str(out)],
            capsys,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "s,x,y,z,alpha,beta,gamma"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 5
        # Straight line in the xy-plane: z column all zeros.
        assert all(float(row[3]) == 0.0 for row in rows)
        assert float(rows[-1][1]) == 2.0

    def test_vertical_line(self, capsys, tmp_path):
        out = tmp_path / "vert.csv"
        code, _, _ = run(
            ["geodesic", "--gamma", "1", "--smax", "3", "--n", "3", "--out", str(out)],
            capsys,
        )
        assert code == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        assert all(float(r[1]) == 0.0 and float(r[2]) == 0.0 for r in rows)
        assert abs(float(rows[-1][3]) - 3.0) < 1e-12

    def test_axis_return_endpoint(self, capsys, tmp_path):
        out = tmp_path / "loop.csv"
        code, _, _ = run(
            ["geodesic", "--gamma", "0.5", "--phi", "0", "--smax", "6.2832",
             "--n", "100", "--out", str(out)],
            capsys,
        )
        assert code == 0
        last = out.read_text().splitlines()[-1].split(",")
        end = np.array([float(last[1]), float(last[2]), float(last[3])])
        want = np.array([0.0, 0.0, 5 * math.pi / 2])
        assert np.max(np.abs(end - want)) < 1e-3

    def test_jsonl_format(self, capsys, tmp_path):
        out = tmp_path / "line.jsonl"
        code, _, _ = run(
            ["geodesic", "--gamma", "0", "--smax", "1", "--n", "2",
             "--format", "jsonl", "--out", str(out)],
            capsys,
        )
        assert code == 0
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(records) == 3
        assert set(records[0]) == {"s", "x", "y", "z", "alpha", "beta", "gamma"}

    def test_stdout_output(self, capsys):
        code, out, _ = run(["geodesic", "--gamma", "0", "--smax", "1", "--n", "2"], capsys)
        assert code == 0
        assert out.startswith("s,x,y,z")

    def test_base_translation(self, capsys, tmp_path):
        out = tmp_path / "based.csv"
        code, _, _ = run(
            ["geodesic", "--gamma", "0", "--phi", "1.5707963267948966",
             "--smax", "1", "--n", "2", "--base", "1,0,0", "--out", str(out)],
            capsys,
        )
        assert code == 0
        last = out.read_text().splitlines()[-1].split(",")
        assert abs(float(last[1]) - 1.0) < 1e-12
        assert abs(float(last[2]) - 1.0) < 1e-12
        assert abs(float(last[3]) - 1.0) < 1e-12


class TestSphereCommand:
    def test_obj_structure(self, capsys, tmp_path):
        out = tmp_path / "s.obj"
        code, _, _ = run(
            ["sphere", "--radius", "1", "--nphi", "12", "--ngamma", "8",
             "--out", str(out)],
            capsys,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        v_lines = [l for l in lines if l.startswith("v ")]
        f_lines = [l for l in lines if l.startswith("f ")]
        assert len(v_lines) == 2 + 6 * 12
        indices = [int(tok) for l in f_lines for tok in l.split()[1:]]
        assert min(indices) == 1 and max(indices) == len(v_lines)

    def test_ply_structure(self, capsys, tmp_path):
        out = tmp_path / "s.ply"
        code, _, _ = run(
            ["sphere", "--radius", "1", "--nphi", "8", "--ngamma", "6",
             "--format", "ply", "--out", str(out)],
            capsys,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "ply"
        assert "property double gamma" in lines
        n_vertex = int(next(l for l in lines if l.startswith("element vertex")).split()[-1])
        assert n_vertex == 2 + 4 * 8

    def test_half_flag(self, capsys, tmp_path):
        out = tmp_path / "half.obj"
        code, _, _ = run(
            ["sphere", "--radius", "1", "--nphi", "12", "--ngamma", "8",
             "--half", "--out", str(out)],
            capsys,
        )
        assert code == 0
        ys = [float(l.split()[2]) for l in out.read_text().splitlines() if l.startswith("v ")]
        assert max(ys) <= 1e-12

    def test_near_flat_small_radius(self, capsys, tmp_path):
        out = tmp_path / "tiny.obj"
        code, _, _ = run(
            ["sphere", "--radius", "0.01", "--nphi", "16", "--ngamma", "12",
             "--out", str(out)],
            capsys,
        )
        assert code == 0
        vs = np.array(
            [list(map(float, l.split()[1:]))
             for l in out.read_text().splitlines() if l.startswith("v ")]
        )
        assert np.max(np.abs(np.linalg.norm(vs, axis=1) - 0.01)) < 1e-3 * 0.01

    def test_clip_to_metric(self, capsys, tmp_path):
        plain = tmp_path / "plain.obj"
        clipped = tmp_path / "clipped.obj"
        base = ["sphere", "--radius", "4", "--nphi", "6", "--ngamma", "6"]
        assert run(base + ["--out", str(plain)], capsys)[0] == 0
        assert run(base + ["--clip-to-metric", "--out", str(clipped)], capsys)[0] == 0
        n_plain = sum(1 for l in plain.read_text().splitlines() if l.startswith("v "))
        n_clip = sum(1 for l in clipped.read_text().splitlines() if l.startswith("v "))
        assert n_clip < n_plain


class TestSurfaceCommand:
    def test_runs_and_validates(self, capsys, tmp_path):
        out = tmp_path / "surf.obj"
        code, _, _ = run(
            ["surface", "--smax", "3", "--ntheta", "16", "--ns", "8",
             "--out", str(out)],
            capsys,
        )
        assert code == 0
        assert out.read_text().startswith("v 0 0 0")


class TestDistanceCommand:
    def test_cygan_values(self, capsys):
        code, out, _ = run(["distance", "--metric", "cygan", "0,0,0", "3,4,0"], capsys)
        assert code == 0 and out.strip() == "5"
        code, out, _ = run(["distance", "--metric", "cygan", "0,0,0", "0,0,9"], capsys)
        assert code == 0 and out.strip() == "3"

    def test_riemannian_value(self, capsys):
        code, out, _ = run(["distance", "--metric", "riemannian", "0,0,0", "1,0,0"], capsys)
        assert code == 0
        assert abs(float(out.strip()) - 1.0) < 1e-6

    def test_same_point(self, capsys):
        code, out, _ = run(["distance", "--metric", "riemannian", "1,2,3", "1,2,3"], capsys)
        assert code == 0 and float(out.strip()) == 0.0

    def test_all_candidates(self, capsys):
        z = 5 * math.pi / 2
        code, out, _ = run(
            ["distance", "--metric", "riemannian", "0,0,0", f"0,0,{z}",
             "--all-candidates"],
            capsys,
        )
        assert code == 0
        records = [json.loads(line) for line in out.strip().splitlines()]
        assert len(records) >= 3
        assert {"gamma", "phi", "s", "residual"} <= set(records[0])
        assert abs(records[0]["s"] - TWO_PI) < 1e-7
        assert records[0]["axis_family"] is True

    def test_candidates_need_distinct_points(self, capsys):
        code, _, err = run(
            ["distance", "--metric", "riemannian", "1,0,0", "1,0,0",
             "--all-candidates"],
            capsys,
        )
        assert code == 2 and "distinct" in err


class TestCurvatureCommand:
    def test_output(self, capsys):
        code, out, _ = run(["curvature"], capsys)
        assert code == 0
        assert "K(X,Y) = -3" in out
        assert "K(X,T) = 1" in out
        assert "nabla_X Y = T" in out
        assert "nabla_Y X = -T" in out


class TestExitCodes:
    def test_bad_subcommand(self):
        with pytest.raises(SystemExit) as info:
            main(["not-a-command"])
        assert info.value.code == 2

    def test_missing_required_option(self, capsys):
        code, _, err = run(["geodesic", "--smax", "1"], capsys)  # no --gamma
        assert code == 2 and "--gamma" in err

    def test_invalid_point(self):
        with pytest.raises(SystemExit) as info:
            main(["distance", "0,0", "1,0,0"])
        assert info.value.code == 2

    def test_invalid_values(self, capsys):
        code, _, err = run(["geodesic", "--gamma", "0", "--smax", "-1"], capsys)
        assert code == 2 and "smax" in err

    def test_io_failure(self, capsys, tmp_path):
        code, _, err = run(
            ["sphere", "--radius", "1", "--nphi", "8", "--ngamma", "6",
             "--out", str(tmp_path / "missing" / "s.obj")],
            capsys,
        )
        assert code == 3 and "I/O" in err

    def test_solver_failure(self, capsys):
        code, _, err = run(
            ["distance", "--metric", "riemannian", "0,0,0", "1,0,0",
             "--tol", "1e-30"],
            capsys,
        )
        assert code == 4 and "solver" in err

    def test_console_entrypoint(self):
        result = subprocess.run(
            [sys.executable, "-m", "heisgeo.cli", "distance", "--metric",
             "cygan", "0,0,0", "3,4,0"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert result.stdout.strip() == "5"


class TestConfigFile:
    def test_config_supplies_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"radius": 2.0, "nphi": 8, "ngamma": 6}))
        out = tmp_path / "s.obj"
        code, _, _ = run(
            ["sphere", "--config", str(cfg), "--out", str(out)], capsys
        )
        assert code == 0
        n_v = sum(1 for l in out.read_text().splitlines() if l.startswith("v "))
        assert n_v == 2 + 4 * 8

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"radius": 2.0, "nphi": 8, "ngamma": 6}))
        out = tmp_path / "s.obj"
        code, _, _ = run(
            ["sphere", "--config", str(cfg), "--nphi", "10", "--out", str(out)],
            capsys,
        )
        assert code == 0
        n_v = sum(1 for l in out.read_text().splitlines() if l.startswith("v "))
        assert n_v == 2 + 4 * 10

    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"radios": 2.0}))
        code, _, err = run(
            ["sphere", "--config", str(cfg), "--radius", "1", "--out", "x.obj"],
            capsys,
        )
        assert code == 2 and "radios" in err

    def test_missing_config_is_io_error(self, capsys, tmp_path):
        code, _, _ = run(
            ["sphere", "--radius", "1", "--config", str(tmp_path / "nope.json"),
             "--out", "x.obj"],
            capsys,
        )
        assert code == 3


class TestDeterminism:
    def test_geodesic_reruns_identical(self, capsys, tmp_path):
        args = ["geodesic", "--gamma", "0.37", "--phi", "1.1", "--smax", "5",
                "--n", "64"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", str(a)], capsys)[0] == 0
        assert run(args + ["--out", str(b)], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_sphere_reruns_identical(self, capsys, tmp_path):
        args = ["sphere", "--radius", "2.5", "--nphi", "24", "--ngamma", "18",
                "--format", "ply"]
        a, b = tmp_path / "a.ply", tmp_path / "b.ply"
        assert run(args + ["--out", str(a)], capsys)[0] == 0
        assert run(args + ["--out", str(b)], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_distance_reruns_identical(self, capsys):
        args = ["distance", "--metric", "riemannian", "0.2,0.3,0.4", "1,0.5,-0.25",
                "--all-candidates"]
        _, out_a, _ = run(args, capsys)
        _, out_b, _ = run(args, capsys)
        assert out_a == out_b
