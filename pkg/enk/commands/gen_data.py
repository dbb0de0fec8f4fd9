"""gen-data: write a synthetic epoch file"""

import argparse
import logging
from pathlib import Path

import numpy as np

from ..config.run_config import RunConfig, write_manifest
from ..config.settings import Settings
from ..data.epochs import epochs_write
from ..data.synth import preset_spec, synth_generate
from ..errors import EXIT_OK, FileError
from .common import add_config_argument

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("gen-data", help="Generate a synthetic ERP-style epoch file")
    add_config_argument(parser)
    parser.set_defaults(handler=cmd_gen_data)
    return parser


def cmd_gen_data(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    data = config.data
    spec = preset_spec(data.preset, trials=data.trials, noise_std=data.noise_std, amplitude=data.amplitude,
                       seed=data.seed)
    epochs = synth_generate(spec)
    if data.precision == "f32":
        epochs = epochs.astype(np.float32)

    path = Path(data.out) if data.out else config.output_dir() / f"{data.preset}.enk"
    if not path.parent.is_dir():
        raise FileError(f"output directory {path.parent} does not exist")
    epochs_write(epochs, path)
    write_manifest(path.parent, "gen-data", config, {"file": path.name, "shape": list(epochs.data.shape)},
                   name=f"{path.stem}.manifest.json")
    print(f"{path}: {epochs.describe()}")
    return EXIT_OK
