"""eval: score a saved checkpoint on an epoch set"""

import argparse
import logging

from ..config.run_config import RunConfig, write_manifest
from ..config.settings import Settings
from ..errors import EXIT_OK
from ..metrics import write_csv
from ..nn.checkpoint import load_checkpoint
from .common import add_config_argument, cast_graph, check_compatible, final_metrics, format_row, load_dataset

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("eval", help="Evaluate a checkpoint in eval mode")
    add_config_argument(parser)
    parser.add_argument("--checkpoint", required=True, metavar="FILE", help="ENKM checkpoint written by train")
    parser.set_defaults(handler=cmd_eval)
    return parser


def variant_of(graph) -> str:
    kinds = {layer.kind for layer in graph.layers}
    if "enk-conv" in kinds:
        return "enk"
    if "gaussian-noise" in kinds:
        return "gauss"
    return "org"


def cmd_eval(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    """Every trial of the configured data set is scored; writes ``<run_id>.eval.csv``."""
    out = config.output_dir()
    graph = cast_graph(load_checkpoint(args.checkpoint), settings.numpy_dtype).eval()
    epochs = load_dataset(config, settings)
    check_compatible(graph, epochs)

    variant = variant_of(graph)
    row = final_metrics(graph, epochs, config, variant, epochs_run=0)
    run_id = config.run_id_for(variant)
    write_csv([row], out / f"{run_id}.eval.csv")
    write_manifest(out, "eval", config, {"checkpoint": str(args.checkpoint), "accuracy": row.accuracy},
                   name=f"{run_id}.eval.manifest.json")
    print(format_row(row))
    return EXIT_OK
