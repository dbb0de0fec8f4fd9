"""Helpers shared by the command modules"""

import argparse
import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from ..config.run_config import RunConfig
from ..config.settings import Settings
from ..data.batching import split_and_batch
from ..data.epochs import EpochSet, csv_import, epochs_read
from ..data.synth import preset_spec, synth_generate
from ..errors import ConfigError, GraphError
from ..metrics import MetricsRow, confusion, metrics_row
from ..models.zoo import ModelSpec, build_model
from ..nn.graph import ModelGraph
from ..nn.optim import AdamState
from ..nn.training import Batch, EpochRecord, evaluate, fit
from ..tensor import Shape2D

logger = logging.getLogger(__name__)


def add_config_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key=value run file (data./model./train./output. keys)")


def load_dataset(config: RunConfig, settings: Settings) -> EpochSet:
    """The epoch file, CSV pair or synthetic preset named by ``config.data``, cast to the run dtype."""
    data = config.data
    if data.path:
        epochs = epochs_read(data.path)
    elif data.csv_data:
        if not data.csv_labels or data.csv_channels is None:
            raise ConfigError("data.csv_data needs data.csv_labels and data.csv_channels")
        epochs = csv_import(data.csv_data, data.csv_labels, data.csv_channels, data.csv_sample_rate)
    else:
        spec = preset_spec(data.preset, trials=data.trials, noise_std=data.noise_std, amplitude=data.amplitude,
                           seed=data.seed)
        epochs = synth_generate(spec)
    return epochs.astype(settings.numpy_dtype)


def model_spec(config: RunConfig, epochs: EpochSet, variant: Optional[str] = None) -> ModelSpec:
    m = config.model
    return ModelSpec(
        family=m.family, channels=epochs.channels, samples=epochs.samples, class_count=epochs.class_count,
        variant=variant or m.variant, noise_sigma=m.noise_sigma, enk_kernel_width=m.enk_kernel_width,
        enk_trainable_kernel=m.enk_trainable_kernel, enk_b_init=m.enk_b_init, enk_impl=m.enk_impl,
        init_seed=m.init_seed,
    )


def cast_graph(graph: ModelGraph, dtype: np.dtype) -> ModelGraph:
    for layer in graph.layers:
        for name, array in layer.params.items():
            layer.params[name] = array.astype(dtype)
    return graph


def worker_count(config: RunConfig, settings: Settings) -> int:
    """Inline evaluation under the reproducibility flag, ENK_THREADS workers otherwise."""
    return 0 if config.train.reproducible else settings.threads


def check_compatible(graph: ModelGraph, epochs: EpochSet) -> None:
    if len(graph.input_shape) != 3 or graph.input_shape[0] != 1:
        raise GraphError(f"checkpoint input {list(graph.input_shape)} is not a single-plane trial")
    grid = Shape2D.of(graph.input_shape)
    if grid != epochs.grid:
        raise GraphError(f"checkpoint expects {grid.rows} x {grid.cols} trials, "
                         f"data trials are {epochs.grid.rows} x {epochs.grid.cols}")
    if graph.class_count < epochs.class_count:
        raise GraphError(f"checkpoint scores {graph.class_count} classes, data has {epochs.class_count}")


class TrainingRun(NamedTuple):
    graph: ModelGraph
    history: List[EpochRecord]
    row: MetricsRow
    val: EpochSet


def final_metrics(graph: ModelGraph, evaluation: EpochSet, config: RunConfig, variant: str,
                  epochs_run: int) -> MetricsRow:
    _, _, predictions = evaluate(graph, evaluation.model_input(), evaluation.labels)
    cm = confusion(evaluation.labels, predictions, evaluation.class_count)
    return metrics_row(
        cm, run_id=config.run_id_for(variant), dataset=config.dataset_name, family=config.model.family, variant=variant,
        seed=config.train.seed, epochs_run=epochs_run, param_count=graph.param_count(),
    )


def run_training(config: RunConfig, settings: Settings, epochs: EpochSet,
                 variant: Optional[str] = None) -> TrainingRun:
    """Split, build, fit and score one variant; metrics use the validation split when it is non-empty."""
    variant = variant or config.model.variant
    t = config.train
    batches, val = split_and_batch(epochs, t.val_fraction, t.batch_size, t.seed)
    graph = cast_graph(build_model(model_spec(config, epochs, variant)), settings.numpy_dtype)
    logger.info("training %s/%s on %s: %d trainable parameters, %d batches", config.model.family, variant,
                config.dataset_name, graph.param_count(), len(batches))

    val_batch: Optional[Batch] = Batch(val.model_input(), val.labels) if val.trials else None
    history = fit(graph, batches, t.epochs, AdamState(lr=t.lr), seed=t.seed, val=val_batch,
                  workers=worker_count(config, settings))
    scored = val if val.trials else epochs
    row = final_metrics(graph, scored, config, variant, len(history))
    return TrainingRun(graph, history, row, val)


def curve_rows(history: List[EpochRecord]) -> List[dict]:
    rows = []
    for record in history:
        scales = list(record.enk_b.values())
        rows.append({
            "epoch": record.epoch,
            "loss": record.loss,
            "accuracy": record.accuracy,
            "val_loss": record.val_loss,
            "val_accuracy": record.val_accuracy,
            "enk_b": scales[0] if scales else None,
        })
    return rows


def format_row(row: MetricsRow) -> str:
    text = f"{row.family}/{row.variant}: accuracy={row.accuracy:.4f} f1_weighted={row.f1_weighted:.4f}"
    if row.f1_class1 is not None:
        text += f" f1_class1={row.f1_class1:.4f}"
    return text + f" params={row.param_count}"


def parse_shape(text: str) -> Tuple[int, int]:
    """``"3x7"`` -> ``(3, 7)``"""
    try:
        kh, kw = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got '{text}'")
    if kh < 1 or kw < 1:
        raise argparse.ArgumentTypeError(f"kernel extents must be positive, got '{text}'")
    return kh, kw


def seed_value(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got '{text}'")
    if seed < 0:
        raise argparse.ArgumentTypeError(f"seeds must be non-negative, got {seed}")
    return seed
