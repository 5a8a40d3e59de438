"""Tests for cli.py: subcommand output, atomic --out writes and the exit-code mapping."""

import json
import os

import pytest

import cli

CHANNEL = '{"P": 10, "N": [1, 2, 4]}'
G14_G22 = '{"Q": 3, "arcs": [[3, 1], [2, 3]]}'
G18_G21 = '{"Q": 3, "arcs": [[2, 1], [3, 1], [3, 2]]}'
G11_G21 = '{"Q": 3, "arcs": []}'
FAST = ["--param-grid", "16", "--refine-steps", "4", "--workers", "1"]


def _exit_code(argv):
    with pytest.raises(SystemExit) as e:
        cli.main(argv)
    return e.value.code


class TestClassify:
    def test_reads_sys_argv(self, monkeypatch, capsys):
        monkeypatch.setattr(cli.sys, "argv", ["sideinfo-bc", "classify", "--graph", G14_G22])
        cli.main()
        out = capsys.readouterr().out
        assert "group 4, member 2, capacity unknown" in out
        assert "G14∪G22" in out
        assert "O_2 = {3}" in out

    def test_all_configurations(self, capsys):
        cli.main(["classify", "--all"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "G11: KKKKKKKK"
        assert lines[3] == "G14: ........"
        assert lines[-1] == "64 configurations, 52 capacity known, 12 unknown"

    def test_json_output(self, tmp_path, capsys):
        out = tmp_path / "class.json"
        cli.main(["classify", "--graph", G18_G21, "--out", str(out)])
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["label"] == "G18∪G21"
        assert data["capacity_known"] is True
        assert data["side_information"]["3"] == [1, 2]
        assert "✅" in capsys.readouterr().err

    def test_needs_a_graph(self):
        assert _exit_code(["classify"]) == cli.EXIT_INPUT

    def test_four_receivers_not_classified(self):
        assert _exit_code(["classify", "--graph", '{"Q": 4, "arcs": []}']) == cli.EXIT_INPUT


class TestRegion:
    def test_csv_written_atomically(self, tmp_path):
        out = tmp_path / "slice.csv"
        cli.main(["region", "--graph", G18_G21, "--channel", CHANNEL, "--bound", "capacity",
                  "--fix", "R1=0", "--sweep", "R2", "--response", "R3", "--grid", "4",
                  "--out", str(out)] + FAST)
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "sweep,response"
        assert len(lines) == 5
        assert os.listdir(tmp_path) == ["slice.csv"]

    def test_outside_fixed_rate_warns(self, capsys):
        cli.main(["region", "--graph", G18_G21, "--channel", CHANNEL, "--bound", "capacity",
                  "--fix", "R1=9", "--grid", "4"] + FAST)
        captured = capsys.readouterr()
        assert captured.out == "sweep,response\n"
        assert "⚠️" in captured.err

    def test_selector_not_defined(self, capsys):
        code = _exit_code(["region", "--graph", G14_G22, "--channel", CHANNEL, "--bound", "capacity"] + FAST)
        assert code == cli.EXIT_SELECTOR
        assert "❌" in capsys.readouterr().err

    def test_bad_channel(self):
        bad = '{"P": 10, "N": [4, 2, 1]}'
        assert _exit_code(["region", "--graph", G18_G21, "--channel", bad, "--bound", "capacity"]) == cli.EXIT_INPUT
        assert _exit_code(["region", "--graph", G18_G21, "--channel", "{", "--bound", "capacity"]) == cli.EXIT_INPUT

    def test_bad_fix(self):
        code = _exit_code(["region", "--graph", G18_G21, "--channel", CHANNEL, "--bound", "capacity",
                           "--fix", "R1"] + FAST)
        assert code == cli.EXIT_INPUT

    def test_bad_config(self, tmp_path):
        config = tmp_path / "settings.json"
        config.write_text('{"param_grid": 1}', encoding="utf-8")
        code = _exit_code(["region", "--graph", G18_G21, "--channel", CHANNEL, "--bound", "capacity",
                           "--config", str(config)])
        assert code == cli.EXIT_INPUT


class TestCompare:
    def test_capacity_inside_prior_outer(self, capsys):
        cli.main(["compare", "--graph", G18_G21, "--channel", CHANNEL, "--outer", "bestknown-outer",
                  "--inner", "capacity", "--samples", "8", "--fix", "R1=0", "--grid", "4"] + FAST)
        data = json.loads(capsys.readouterr().out)
        assert data["contains"] is True
        assert data["witness"] is None
        assert data["gap"] == pytest.approx(0.0, abs=1e-3)


class TestThresholds:
    def test_listed_values(self, capsys):
        cli.main(["thresholds", "--channel", CHANNEL, "--r1", "0,1.0"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "r1,r_thr3,r_thr3_prime"
        assert lines[1] == "0,0,0"
        assert len(lines) == 3

    def test_grid(self, capsys):
        cli.main(["thresholds", "--channel", CHANNEL, "--steps", "5"])
        assert len(capsys.readouterr().out.splitlines()) == 6


class TestFme:
    def test_system_file(self, tmp_path, capsys):
        path = tmp_path / "square.txt"
        path.write_text("nonneg: b\nvars: x y\nx + y <= b\nx >= 0\ny >= 0\n", encoding="utf-8")
        cli.main(["fme", str(path), "--eliminate", "y"])
        out = capsys.readouterr().out
        assert "vars: x\n" in out
        assert "x <= b" in out

    def test_parse_error(self, tmp_path, capsys):
        path = tmp_path / "broken.txt"
        path.write_text("nonneg: b\nx + y\n", encoding="utf-8")
        assert _exit_code(["fme", str(path)]) == cli.EXIT_INPUT
        assert "line 2" in capsys.readouterr().err

    def test_builtin_matches_target(self, capsys):
        cli.main(["fme", "--builtin", "group1-unsplit", "--assignments", "10"])
        captured = capsys.readouterr()
        assert "✅ group1-unsplit" in captured.err
        assert captured.out.startswith("nonneg: B1 B2 B3 E21 E31 E32\n")

    def test_unknown_builtin(self):
        assert _exit_code(["fme", "--builtin", "nope"]) == cli.EXIT_INPUT

    def test_list(self, capsys):
        cli.main(["fme", "--list"])
        out = capsys.readouterr().out
        assert "group6-split:" in out
        assert "group7-member4:" in out


class TestSimulate:
    def test_joint_report(self, capsys):
        cli.main(["simulate", "--graph", G11_G21, "--channel", CHANNEL, "--rates", "0.25,0.25,0.25",
                  "--n", "4", "--trials", "5", "--workers", "1"])
        data = json.loads(capsys.readouterr().out)
        assert data["trials"] == 5
        assert data["mode"] == "joint"
        assert data["config"]["bits"] == {"m1": 1, "m2": 1, "m3": 1}

    def test_compare_modes(self, capsys):
        cli.main(["simulate", "--graph", G18_G21, "--channel", CHANNEL, "--rates", "0.5,0.5,0.5",
                  "--n", "4", "--trials", "3", "--mode", "compare", "--workers", "1"])
        data = json.loads(capsys.readouterr().out)
        assert sorted(data) == ["joint", "separate"]

    def test_dirty_paper_group_unsupported(self):
        code = _exit_code(["simulate", "--graph", G14_G22, "--channel", CHANNEL, "--rates", "0.1,0.1,0.1"])
        assert code == cli.EXIT_UNSUPPORTED

    def test_guard(self):
        code = _exit_code(["simulate", "--graph", G18_G21, "--channel", CHANNEL, "--rates", "2,2,2",
                           "--n", "4", "--trials", "1"])
        assert code == cli.EXIT_GUARD
