import json

import pytest

from enk import __version__
from enk.config import load_run_config, parse_overrides, resolve_run_config, write_manifest
from enk.config.run_config import read_run_file
from enk.errors import ConfigError, FileError


def run_file(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


class TestOverrides:
    def test_space_and_equals_forms(self):
        assert parse_overrides(["--train.seed", "3", "--model.variant=org"]) == {
            "train.seed": "3", "model.variant": "org"}

    def test_negative_value(self):
        assert parse_overrides(["--model.enk_b_init", "-0.5"]) == {"model.enk_b_init": "-0.5"}

    def test_missing_value(self):
        with pytest.raises(ConfigError):
            parse_overrides(["--train.seed"])

    def test_unknown_flag(self):
        with pytest.raises(ConfigError):
            parse_overrides(["--bogus"])
        with pytest.raises(ConfigError):
            parse_overrides(["--other.key", "1"])


class TestResolve:
    def test_defaults(self, settings):
        config = resolve_run_config({}, {}, settings)
        assert config.data.preset == "latency"
        assert config.model.family == "compact-toy"
        assert config.train.batch_size == 16
        assert config.train.reproducible is True
        assert config.output.dir == settings.output_dir

    @pytest.mark.parametrize("preset, batch", [("cc", 16), ("phrc", 16), ("p300", 8), ("mrcp", 4)])
    def test_preset_batch_sizes(self, settings, preset, batch):
        assert resolve_run_config({"data.preset": preset}, {}, settings).train.batch_size == batch

    def test_flags_override_file(self, settings, tmp_path):
        path = run_file(tmp_path, "data.preset=p300\ntrain.batch_size=2\ntrain.epochs=4\n")
        config = load_run_config(path, ["--train.epochs", "6"], settings)
        assert config.data.preset == "p300"
        assert config.train.batch_size == 2
        assert config.train.epochs == 6

    def test_comments_and_quotes(self, settings, tmp_path):
        path = run_file(tmp_path, "# a run\nmodel.family=\"deep-toy\"\ntrain.reproducible=false\n")
        config = load_run_config(path, [], settings)
        assert config.model.family == "deep-toy"
        assert config.train.reproducible is False

    def test_unknown_key(self, settings):
        with pytest.raises(ConfigError):
            resolve_run_config({"train.momentum": "0.9"}, {}, settings)
        with pytest.raises(ConfigError):
            resolve_run_config({"seed": "1"}, {}, settings)

    def test_invalid_value(self, settings):
        with pytest.raises(ConfigError, match="model.variant"):
            resolve_run_config({}, {"model.variant": "big"}, settings)
        with pytest.raises(ConfigError):
            resolve_run_config({}, {"train.val_fraction": "1.0"}, settings)

    @pytest.mark.parametrize("key", ["data.seed", "model.init_seed", "train.seed"])
    def test_negative_seed(self, settings, key):
        with pytest.raises(ConfigError, match=key):
            resolve_run_config({}, {key: "-1"}, settings)

    def test_epoch_cap(self, settings):
        assert resolve_run_config({}, {"train.epochs": "500"}, settings).train.epochs == 500
        with pytest.raises(ConfigError):
            resolve_run_config({}, {"train.epochs": "501"}, settings)

    def test_missing_run_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_run_file(str(tmp_path / "absent.cfg"))

    def test_key_without_value(self, tmp_path):
        with pytest.raises(ConfigError):
            read_run_file(run_file(tmp_path, "data.preset\n"))


class TestOutputs:
    def test_run_id(self, settings):
        config = resolve_run_config({}, {"train.seed": "4"}, settings)
        assert config.run_id == "latency-compact-toy-enk-s4"
        assert config.run_id_for("org") == "latency-compact-toy-org-s4"
        named = resolve_run_config({}, {"output.run_id": "mine"}, settings)
        assert named.run_id == "mine"

    def test_output_dir_must_exist(self, settings, tmp_path):
        config = resolve_run_config({}, {"output.dir": str(tmp_path / "missing")}, settings)
        with pytest.raises(FileError):
            config.output_dir()

    def test_manifest(self, settings, tmp_path):
        config = resolve_run_config({}, {"output.dir": str(tmp_path)}, settings)
        path = write_manifest(config.output_dir(), "train", config, {"param_count": 12})
        manifest = json.loads(path.read_text())
        assert path.name == f"{config.run_id}.manifest.json"
        assert manifest["command"] == "train"
        assert manifest["version"] == __version__
        assert manifest["config"]["train"]["batch_size"] == 16
        assert manifest["results"] == {"param_count": 12}
        assert "timestamp" not in path.read_text()
