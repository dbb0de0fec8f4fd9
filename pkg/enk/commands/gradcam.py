"""gradcam: heat maps of one or two checkpoints and their difference"""

import argparse
import logging
from pathlib import Path
from typing import List

from ..config.run_config import RunConfig, write_manifest
from ..config.settings import Settings
from ..errors import EXIT_OK, ConfigError, ParameterError
from ..gradcam import HeatMap, grad_cam, heatmap_diff, heatmap_export, heatmap_filename, heatmap_overlay_html, trial_export
from ..nn.checkpoint import load_checkpoint
from .common import add_config_argument, cast_graph, check_compatible, load_dataset
from .evaluate import variant_of

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("gradcam", help="Export Grad-CAM heat maps (org, enk and their difference)")
    add_config_argument(parser)
    parser.add_argument("--checkpoint", required=True, nargs="+", metavar="FILE",
                        help="One checkpoint, or two (e.g. org and enk) to also export their difference")
    parser.add_argument("--trials", type=int, nargs="+", default=[0], help="Trial indices of the data set")
    parser.add_argument("--class", dest="class_idx", type=int, default=None,
                        help="Target class; defaults to each trial's true label")
    parser.add_argument("--layer", type=int, default=None, help="Conv layer index; defaults to the first conv")
    parser.set_defaults(handler=cmd_gradcam)
    return parser


def _export(h: HeatMap, out: Path, run_id: str, label: str, trial: int, fmt: str) -> List[str]:
    formats = ["csv", "pgm"] if fmt == "both" else [fmt]
    written = []
    for suffix in formats:
        name = heatmap_filename(run_id, label, trial, h.class_index, suffix)
        heatmap_export(h, out / name, suffix)
        written.append(name)
    return written


def cmd_gradcam(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    if len(args.checkpoint) > 2:
        raise ConfigError("gradcam takes one or two checkpoints")
    out = config.output_dir()
    epochs = load_dataset(config, settings)
    graphs = [cast_graph(load_checkpoint(path), settings.numpy_dtype).eval() for path in args.checkpoint]
    labels = [variant_of(g) for g in graphs]
    if len(labels) == 2 and labels[0] == labels[1]:
        labels = [f"{labels[0]}{k}" for k in (1, 2)]
    for graph in graphs:
        check_compatible(graph, epochs)

    run_id = config.output.run_id or f"{config.dataset_name}-{config.model.family}"
    written: List[str] = []
    for trial in args.trials:
        if not 0 <= trial < epochs.trials:
            raise ParameterError(f"trial {trial} out of range for {epochs.trials} trials")
        x = epochs.model_input()[trial]
        class_idx = int(epochs.labels[trial]) if args.class_idx is None else args.class_idx
        maps = [grad_cam(graph, x, class_idx, args.layer) for graph in graphs]
        for h, label in zip(maps, labels):
            written += _export(h, out, run_id, label, trial, config.output.heatmap_format)
            if config.output.overlay_html:
                name = heatmap_filename(run_id, label, trial, class_idx, "html")
                heatmap_overlay_html(h, epochs.data[trial], out / name, title=f"{label} trial {trial} class {class_idx}")
                written.append(name)
        if len(maps) == 2:
            written += _export(heatmap_diff(*maps), out, run_id, "diff", trial, config.output.heatmap_format)
        raw = f"{run_id}_trial{trial}_raw.csv"
        trial_export(epochs.data[trial], out / raw)
        written.append(raw)

    write_manifest(out, "gradcam", config, {"files": written}, name=f"{run_id}.gradcam.manifest.json")
    print(f"wrote {len(written)} files to {out}")
    return EXIT_OK
