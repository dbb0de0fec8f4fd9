"""Run files: flat ``key=value`` text with ``data.``, ``model.``, ``train.`` and ``output.`` sections.

Precedence, lowest first: model defaults, dataset preset defaults, the run
file, ``--section.key value`` flags.
"""

import json
import logging
import re
from pathlib import Path
from typing import Dict, Literal, Mapping, Optional, Sequence

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .. import __version__
from ..errors import ConfigError, FileError
from ..presets import PRESETS
from .settings import Settings

logger = logging.getLogger(__name__)

SECTIONS = ("data", "model", "train", "output")
OVERRIDE_RE = re.compile(r"^--(?P<key>(?:%s)\.[A-Za-z_][A-Za-z0-9_]*)(?:=(?P<value>.*))?$" % "|".join(SECTIONS))


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DataConfig(_Section):
    preset: str = Field(default="latency", description="Synthetic preset: cc, phrc, p300, mrcp or latency")
    path: Optional[str] = Field(default=None, description="Epoch file to train/evaluate on")
    csv_data: Optional[str] = None
    csv_labels: Optional[str] = None
    csv_channels: Optional[int] = Field(default=None, ge=1)
    csv_sample_rate: float = Field(default=250.0, gt=0)
    trials: int = Field(default=200, ge=1)
    noise_std: float = Field(default=0.1, ge=0)
    amplitude: float = 1.0
    seed: int = Field(default=0, ge=0)
    precision: Literal["f32", "f64"] = "f32"
    out: Optional[str] = Field(default=None, description="Epoch file written by gen-data")


class ModelConfig(_Section):
    family: Literal["compact-toy", "shallow-toy", "deep-toy"] = "compact-toy"
    variant: Literal["org", "enk", "gauss"] = "enk"
    noise_sigma: float = Field(default=0.1, ge=0)
    enk_kernel_width: int = Field(default=1, ge=1)
    enk_trainable_kernel: bool = False
    enk_b_init: float = 0.0
    enk_impl: Literal["decomposed", "naive"] = "decomposed"
    init_seed: int = Field(default=0, ge=0)


class TrainConfig(_Section):
    epochs: int = Field(default=30, ge=1)
    batch_size: Optional[int] = Field(default=None, ge=1, description="Defaults to the preset's batch size")
    lr: float = Field(default=1e-3, ge=0)
    seed: int = Field(default=0, ge=0)
    val_fraction: float = Field(default=0.2, ge=0, lt=1)
    reproducible: bool = True


class OutputConfig(_Section):
    dir: Optional[str] = Field(default=None, description="Defaults to ENK_OUTPUT_DIR")
    run_id: Optional[str] = None
    overlay_html: bool = False
    heatmap_format: Literal["csv", "pgm", "both"] = "both"


class RunConfig(BaseModel):
    data: DataConfig = Field(default_factory=DataConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @property
    def dataset_name(self) -> str:
        if self.data.path:
            return Path(self.data.path).stem
        if self.data.csv_data:
            return Path(self.data.csv_data).stem
        return self.data.preset

    @property
    def run_id(self) -> str:
        return self.run_id_for(self.model.variant)

    def run_id_for(self, variant: str) -> str:
        if self.output.run_id:
            return self.output.run_id
        return f"{self.dataset_name}-{self.model.family}-{variant}-s{self.train.seed}"

    def output_dir(self) -> Path:
        """The configured output directory; it must already exist."""
        path = Path(self.output.dir)
        if not path.is_dir():
            raise FileError(f"output directory {path} does not exist")
        return path


class Manifest(BaseModel):
    command: str
    version: str = __version__
    config: dict
    results: dict = {}


def parse_overrides(tokens: Sequence[str]) -> Dict[str, str]:
    """``--section.key value`` / ``--section.key=value`` pairs left over by argparse."""
    overrides: Dict[str, str] = {}
    i = 0
    while i < len(tokens):
        match = OVERRIDE_RE.match(tokens[i])
        if not match:
            raise ConfigError(f"unrecognized argument '{tokens[i]}'")
        value = match.group("value")
        if value is None:
            if i + 1 >= len(tokens):
                raise ConfigError(f"flag {tokens[i]} expects a value")
            value = tokens[i + 1]
            i += 1
        overrides[match.group("key")] = value
        i += 1
    return overrides


def read_run_file(path: Optional[str]) -> Dict[str, str]:
    if path is None:
        return {}
    if not Path(path).is_file():
        raise ConfigError(f"run file {path} not found")
    values = dotenv_values(path)
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise ConfigError(f"run file {path}: key '{missing[0]}' has no value")
    return dict(values)


def group_sections(values: Mapping[str, str]) -> Dict[str, Dict[str, str]]:
    grouped: Dict[str, Dict[str, str]] = {name: {} for name in SECTIONS}
    for key, value in values.items():
        section, _, name = key.partition(".")
        if section not in grouped or not name:
            raise ConfigError(f"unknown config key '{key}'; keys look like data.x, model.x, train.x or output.x")
        grouped[section][name] = value
    return grouped


def _validation_message(exc: ValidationError, section: str) -> str:
    first = exc.errors()[0]
    field = ".".join(str(p) for p in first["loc"])
    return f"{section}.{field}: {first['msg']}"


def resolve_run_config(file_values: Mapping[str, str], overrides: Mapping[str, str],
                       settings: Settings) -> RunConfig:
    merged = dict(file_values)
    merged.update(overrides)
    grouped = group_sections(merged)

    preset = PRESETS.get(grouped["data"].get("preset", DataConfig().preset).lower())
    if preset is not None:
        grouped["train"].setdefault("batch_size", str(preset.batch_size))
    grouped["output"].setdefault("dir", settings.output_dir)

    sections = {}
    for name, model in (("data", DataConfig), ("model", ModelConfig), ("train", TrainConfig),
                        ("output", OutputConfig)):
        try:
            sections[name] = model.model_validate(grouped[name])
        except ValidationError as exc:
            raise ConfigError(_validation_message(exc, name)) from exc
    config = RunConfig(**sections)
    if config.train.epochs > settings.epoch_cap:
        raise ConfigError(f"train.epochs {config.train.epochs} exceeds the epoch cap {settings.epoch_cap}")
    if config.train.batch_size is None:
        config.train.batch_size = 16
    return config


def load_run_config(path: Optional[str], override_tokens: Sequence[str], settings: Settings) -> RunConfig:
    config = resolve_run_config(read_run_file(path), parse_overrides(override_tokens), settings)
    logger.debug("resolved run config: %s", config.model_dump())
    return config


def write_manifest(directory: Path, command: str, config: RunConfig, results: Optional[dict] = None,
                   name: Optional[str] = None) -> Path:
    """``<run_id>.manifest.json`` echoing the resolved config, library version and results."""
    manifest = Manifest(command=command, config=config.model_dump(mode="json"), results=results or {})
    path = directory / (name or f"{config.run_id}.manifest.json")
    try:
        path.write_text(json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise FileError(f"cannot write manifest {path}: {exc.strerror or exc}") from exc
    return path

