"""train: fit one model variant and save checkpoint, curve and metrics"""

import argparse
import logging

from ..config.run_config import RunConfig, write_manifest
from ..config.settings import Settings
from ..errors import EXIT_OK
from ..metrics import write_csv
from ..nn.checkpoint import save_checkpoint
from .common import add_config_argument, curve_rows, format_row, load_dataset, run_training

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["epoch", "loss", "accuracy", "val_loss", "val_accuracy", "enk_b"]


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("train", help="Train a model variant on an epoch set")
    add_config_argument(parser)
    parser.set_defaults(handler=cmd_train)
    return parser


def cmd_train(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    """Writes ``<run_id>.enkm``, ``<run_id>.curve.csv``, ``<run_id>.metrics.csv`` and a manifest."""
    out = config.output_dir()
    epochs = load_dataset(config, settings)
    run = run_training(config, settings, epochs)

    run_id = config.run_id
    save_checkpoint(run.graph, out / f"{run_id}.enkm")
    write_csv(curve_rows(run.history), out / f"{run_id}.curve.csv", columns=CURVE_COLUMNS)
    write_csv([run.row], out / f"{run_id}.metrics.csv")
    write_manifest(out, "train", config, {
        "checkpoint": f"{run_id}.enkm",
        "param_count": run.row.param_count,
        "final_loss": run.history[-1].loss,
        "enk_b": run.history[-1].enk_b,
    })
    print(format_row(run.row))
    return EXIT_OK
