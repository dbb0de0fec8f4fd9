"""compare: train org, enk and gauss on the same data and seed"""

import argparse
import logging

from ..config.run_config import RunConfig, write_manifest
from ..config.settings import Settings
from ..errors import EXIT_OK
from ..metrics import write_csv
from ..models.zoo import VARIANTS
from .common import add_config_argument, format_row, load_dataset, run_training

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("compare", help="Train every variant of one family and tabulate the metrics")
    add_config_argument(parser)
    parser.set_defaults(handler=cmd_compare)
    return parser


def cmd_compare(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    out = config.output_dir()
    epochs = load_dataset(config, settings)
    rows = [run_training(config, settings, epochs, variant).row for variant in VARIANTS]

    name = f"{config.dataset_name}-{config.model.family}-compare-s{config.train.seed}"
    write_csv(rows, out / f"{name}.metrics.csv")
    by_variant = {row.variant: row for row in rows}
    delta = by_variant["enk"].f1_weighted - by_variant["org"].f1_weighted
    write_manifest(out, "compare", config, {"f1_weighted_enk_minus_org": delta}, name=f"{name}.manifest.json")
    for row in rows:
        print(format_row(row))
    print(f"enk vs org weighted F1: {delta:+.4f}")
    return EXIT_OK
