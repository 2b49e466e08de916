# tests/test_config.py

import json
from argparse import Namespace
from pathlib import Path

import pytest

from behaviormap.atlas_engine import GridSpec
from behaviormap.config import RunConfig, load_run_config, merge_cli_args, parse_range
from behaviormap.errors import InvalidParamsError


class TestParseRange:
    def test_string(self):
        assert parse_range("0.1:0.9") == (0.1, 0.9)

    def test_list(self):
        assert parse_range([0.34, 1]) == (0.34, 1.0)

    @pytest.mark.parametrize("value", ["0.9:0.1", "0.5", "a:b", None, [1, 2, 3]])
    def test_rejects(self, value):
        with pytest.raises(InvalidParamsError):
            parse_range(value)


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.spec == GridSpec.linspace()
        assert config.min_run == 1
        assert config.palette == {}

    def test_from_mapping(self):
        config = RunConfig.from_mapping(
            {
                "world": "wall",
                "width": 6,
                "res": 11,
                "p_range": "0.5:1.0",
                "tol": 1e-6,
                "out": "maps/wall.csv",
                "palette": {"around-wall": "#00ff00"},
            }
        )
        assert config.world == "wall"
        assert config.params.width == 6
        assert config.spec.shape == (11, 11)
        assert config.spec.p_samples[0] == 0.5
        assert config.tol == 1e-6
        assert config.out == Path("maps/wall.csv")
        assert config.palette == {"around-wall": "#00ff00"}

    def test_unknown_key(self):
        with pytest.raises(InvalidParamsError, match="Unknown config key"):
            RunConfig.from_mapping({"resolution": 11})

    @pytest.mark.parametrize(
        "data",
        [{"tol": 0}, {"max_iter": 0}, {"min_run": 0}, {"workers": 0}, {"tol": "fast"}, {"palette": [1]}],
    )
    def test_bad_values(self, data):
        with pytest.raises(InvalidParamsError):
            RunConfig.from_mapping(data)


class TestFiles:
    def test_load(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"world": "chain", "length": 5, "res": 7}))
        config = load_run_config(path)
        assert config.params.length == 5
        assert config.spec.shape == (7, 7)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{")
        with pytest.raises(InvalidParamsError, match="invalid JSON"):
            load_run_config(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(InvalidParamsError, match="JSON object"):
            load_run_config(path)


class TestMerge:
    def test_flags_override_file(self):
        config = RunConfig.from_mapping({"world": "wall", "width": 6, "height": 7, "res": 11})
        args = Namespace(world=None, width=8, height=None, res=None, p_res=5, tol=None, out="x.csv")
        merged = merge_cli_args(config, args)
        assert merged.world == "wall"
        assert merged.params.width == 8
        assert merged.params.height == 7
        assert merged.spec.shape == (5, 11)
        assert merged.out == Path("x.csv")
        assert config.params.width == 6

    def test_palette_merges(self):
        config = RunConfig(palette={"big": "#000000", "small": "#111111"})
        merged = merge_cli_args(config, Namespace(palette={"big": "#ffffff"}))
        assert merged.palette == {"big": "#ffffff", "small": "#111111"}

    def test_range_flags(self):
        merged = merge_cli_args(RunConfig(), Namespace(gamma_range="0.2:0.8", res=None))
        assert merged.spec.gamma_samples[0] == 0.2
        assert merged.spec.gamma_samples[-1] == 0.8
        assert merged.spec.shape == (101, 101)

    def test_non_config_flags_ignored(self):
        merged = merge_cli_args(RunConfig(), Namespace(command="map", verbose=True))
        assert merged.world is None
