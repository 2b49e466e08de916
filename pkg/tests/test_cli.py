# tests/test_cli.py

import csv
import json
import os
import sys
from unittest.mock import patch

import pytest

from behaviormap import cli


def run(capsys, *args):
    """Run the CLI and return (exit code, stdout, stderr)."""
    with patch.object(sys, "argv", ["behaviormap", *args]), \
         patch("behaviormap.cli.print_logo"):
        with pytest.raises(SystemExit) as exc:
            cli.main()
    out, err = capsys.readouterr()
    return exc.value.code, out, err


FAST = ["--quiet", "--no-progress", "--workers", "1"]


class TestTopLevel:
    def test_no_args_prints_help(self, capsys):
        code, _, err = run(capsys)
        assert code == 0
        assert "behaviormap" in err

    def test_help_flag(self, capsys):
        code, _, err = run(capsys, "map", "--help")
        assert code == 0
        assert "edge_switches" in err

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert cli.__version__ in out

    def test_usage_error_exits_1(self, capsys):
        code, _, err = run(capsys, "map", "--res", "many")
        assert code == 1
        assert "Error" in err

    def test_banner_unless_quiet(self, tmp_path):
        out = tmp_path / "m.csv"
        argv = ["behaviormap", "map", "--world", "chain", "--res", "3", "--no-progress", "--out", str(out)]
        with patch.object(sys, "argv", argv), \
             patch("behaviormap.cli.print_logo") as mock_logo:
            with pytest.raises(SystemExit):
                cli.main()
            mock_logo.assert_called_once()
        with patch.object(sys, "argv", argv + ["--quiet"]), \
             patch("behaviormap.cli.print_logo") as mock_logo:
            with pytest.raises(SystemExit):
                cli.main()
            mock_logo.assert_not_called()


class TestMap:
    def test_map_prints_signature(self, capsys, tmp_path):
        out = tmp_path / "chain.csv"
        code, stdout, _ = run(capsys, "map", "--world", "chain", "--res", "5", "--out", str(out), *FAST)
        assert code == 0
        sig = json.loads(stdout.strip().splitlines()[-1])
        assert sig == {"world": "chain", "num_behaviors": 2, "edge_switches": [1, 0, 1, 0]}
        with out.open() as fp:
            rows = list(csv.reader(fp))
        assert rows[0] == ["gamma", "p", "label_index", "label_name"]
        assert len(rows) == 26

    def test_map_svg_and_palette(self, capsys, tmp_path):
        svg, pal = tmp_path / "out" / "m.svg", tmp_path / "out" / "palette.json"
        code, _, _ = run(
            capsys,
            "map", "--world", "chain", "--res", "5",
            "--out", str(tmp_path / "m.csv"),
            "--svg", str(svg),
            "--palette-out", str(pal),
            "--color", "exercise=#000000",
            *FAST,
        )
        assert code == 0
        assert "#000000" in svg.read_text()
        entries = json.loads(pal.read_text())
        assert entries[0] == {"index": 0, "name": "exercise", "color": "#000000"}

    def test_bad_color_flag(self, capsys, tmp_path):
        code, _, _ = run(capsys, "map", "--world", "chain", "--color", "exercise", *FAST)
        assert code == 1

    def test_cliff_map(self, capsys, tmp_path):
        code, stdout, _ = run(
            capsys, "map", "--world", "cliff", "--res", "3", "--out", str(tmp_path / "cliff.csv"), *FAST
        )
        assert code == 0
        assert json.loads(stdout.strip().splitlines()[-1]) == {"world": "cliff", "num_behaviors": 2, "edge_switches": [1, 1, 0, 0]}

    def test_wander_on_edge_exits_2_after_writing(self, capsys, tmp_path):
        out = tmp_path / "cliff.csv"
        code, stdout, err = run(
            capsys,
            "map", "--world", "cliff", "--res", "3",
            "--reward-cliff=-1000", "--step-reward=0",
            "--out", str(out),
            *FAST,
        )
        assert code == 2
        assert "wander" in err
        assert stdout == ""
        assert len(out.read_text().splitlines()) == 10

    def test_invalid_world_params(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "map", "--world", "big-small", "--width", "1", "--out", str(tmp_path / "x.csv"), *FAST
        )
        assert code == 1
        assert "width >= 2" in err

    def test_world_required(self, capsys):
        code, _, err = run(capsys, "map", *FAST)
        assert code == 1
        assert "world kind is required" in err

    def test_config_file(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        out = tmp_path / "chain.csv"
        config.write_text(json.dumps({"world": "chain", "res": 3, "out": str(out)}))
        code, stdout, _ = run(capsys, "map", "--config", str(config), *FAST)
        assert code == 0
        assert '"world": "chain"' in stdout
        assert len(out.read_text().splitlines()) == 10

    def test_bad_config_file(self, capsys, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"wrld": "chain"}))
        code, _, err = run(capsys, "map", "--config", str(config), *FAST)
        assert code == 1
        assert "Unknown config key" in err

    def test_log_file(self, capsys, tmp_path):
        log = tmp_path / "logs" / "run.log"
        code, _, _ = run(
            capsys,
            "map", "--world", "chain", "--res", "3",
            "--out", str(tmp_path / "m.csv"),
            "--log-file", str(log),
            *FAST,
        )
        assert code == 0
        text = log.read_text()
        assert "behaviormap map --world chain" in text
        assert "signature" in text


class TestEquiv:
    def test_equivalent_worlds(self, capsys):
        code, stdout, _ = run(capsys, "equiv", "big-small", "chain", "--res", "21", *FAST)
        assert code == 0
        lines = stdout.strip().splitlines()
        assert json.loads(lines[0])["world"] == "big_small"
        assert lines[-1] == "verdict: equivalent"

    def test_not_equivalent(self, capsys):
        code, stdout, _ = run(capsys, "equiv", "big-small", "cliff", "--res", "21", *FAST)
        assert code == 3
        assert json.loads(stdout.splitlines()[1])["edge_switches"] == [1, 1, 0, 0]
        assert stdout.strip().endswith("verdict: not equivalent")

    def test_csv_inputs(self, capsys, tmp_path):
        out = tmp_path / "chain.csv"
        run(capsys, "map", "--world", "chain", "--res", "5", "--out", str(out), *FAST)
        code, stdout, _ = run(capsys, "equiv", str(out), str(out), *FAST)
        assert code == 0
        assert "verdict: equivalent" in stdout

    def test_missing_csv(self, capsys, tmp_path):
        code, _, err = run(capsys, "equiv", str(tmp_path / "nope.csv"), "chain", *FAST)
        assert code == 1
        assert "Error" in err


class TestSweep:
    def test_failed_cell_exits_3(self, capsys, tmp_path):
        report = tmp_path / "sweep.json"
        code, stdout, err = run(
            capsys,
            "sweep", "--world", "chain", "--vary", "length=1,4", "--res", "5",
            "--report", str(report),
            *FAST,
        )
        assert code == 3
        summary = json.loads(stdout)
        assert summary["verdict"] is False
        assert summary["cells"] == 2 and summary["failures"] == 1
        assert summary["modal_signature"]["edge_switches"] == [1, 0, 1, 0]
        assert report.exists() and report.with_suffix(".csv").exists()
        assert "InvalidParamsError" in err

    def test_uniform_sweep_exits_0(self, capsys):
        code, stdout, _ = run(
            capsys, "sweep", "--world", "chain", "--vary", "reward-disengage=5,20", "--res", "21", *FAST
        )
        assert code == 0
        assert json.loads(stdout)["verdict"] is True

    @pytest.mark.parametrize("vary", ["length", "length=", "length=a,b"])
    def test_bad_vary(self, capsys, vary):
        code, _, _ = run(capsys, "sweep", "--world", "chain", "--vary", vary, "--res", "5", *FAST)
        assert code == 1

    def test_cap(self, capsys):
        code, _, err = run(
            capsys, "sweep", "--world", "chain", "--vary", "length=3,4,5", "--cap", "2", "--res", "5", *FAST
        )
        assert code == 1
        assert "cap" in err


class TestPath:
    def test_crossings_and_transfer(self, capsys, tmp_path):
        out = tmp_path / "path.json"
        code, stdout, _ = run(
            capsys,
            "path", "--world", "big-small", "--res", "21",
            "--from", "0.05,0.9", "--to", "0.95,0.9",
            "--transfer-to", "chain",
            "--out", str(out),
            *FAST,
        )
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[0] == "crossings: 1"
        assert lines[1].startswith("transferred: [[")
        data = json.loads(out.read_text())
        assert data["crossings"] == 1
        assert data["transfer"]["crossings"] == 1

    def test_path_file_on_map_csv(self, capsys, tmp_path):
        out = tmp_path / "chain.csv"
        run(capsys, "map", "--world", "chain", "--res", "5", "--out", str(out), *FAST)
        path_file = tmp_path / "p.json"
        path_file.write_text("[[0.0, 0.0], [1.0, 0.0]]")
        code, stdout, _ = run(capsys, "path", "--map", str(out), "--path-file", str(path_file), *FAST)
        assert code == 0
        assert stdout.strip() == "crossings: 1"

    def test_missing_points(self, capsys):
        code, _, err = run(capsys, "path", "--world", "chain", "--res", "3", *FAST)
        assert code == 1
        assert "--from" in err

    def test_out_of_bounds(self, capsys):
        code, _, _ = run(capsys, "path", "--world", "chain", "--from", "0,0", "--to", "2,0", *FAST)
        assert code == 1

    def test_transfer_to_inequivalent(self, capsys):
        code, stdout, _ = run(
            capsys,
            "path", "--world", "big-small", "--res", "21",
            "--from", "0.05,0.9", "--to", "0.95,0.9",
            "--transfer-to", "cliff",
            *FAST,
        )
        assert code == 3
        assert stdout.strip() == "crossings: 1"


class TestOtherCommands:
    def test_compose(self, capsys):
        code, stdout, _ = run(capsys, "compose", "--kind", "cliff-disengage", "--res", "21", *FAST)
        assert code == 0
        lines = stdout.strip().splitlines()
        assert json.loads(lines[0])["num_behaviors"] == 3
        assert lines[-1] == "behaviors: 3"

    def test_compose_rejects_base_world(self, capsys):
        code, _, _ = run(capsys, "compose", "--kind", "cliff", "--res", "3", *FAST)
        assert code == 1

    def test_worlds(self, capsys):
        with patch.dict(os.environ, {"COLUMNS": "250"}):
            code, stdout, _ = run(capsys, "worlds", "--quiet")
        assert code == 0
        assert "World catalog" in stdout
        assert "cliff-disengage" in stdout

    def test_dump(self, capsys, tmp_path):
        out = tmp_path / "t.csv"
        code, stdout, _ = run(capsys, "dump", "--world", "chain", "--p", "0.8", "--out", str(out), "--quiet")
        assert code == 0
        rows = int(stdout.strip().split(": ")[1])
        assert len(out.read_text().splitlines()) == rows + 1

    def test_dump_requires_p(self, capsys, tmp_path):
        code, _, _ = run(capsys, "dump", "--world", "chain", "--out", str(tmp_path / "t.csv"), "--quiet")
        assert code == 1

    def test_dump_bad_confidence(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "dump", "--world", "chain", "--p", "1.5", "--out", str(tmp_path / "t.csv"), "--quiet"
        )
        assert code == 1
        assert "p must lie in" in err
