"""Epoch loop: seeded shuffling, batch-averaged gradients, Adam updates"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ..errors import ParameterError
from .graph import ModelGraph
from .loss import cross_entropy_loss
from .optim import AdamState, adam_step

logger = logging.getLogger(__name__)


class Batch(NamedTuple):
    x: np.ndarray
    y: np.ndarray


class EpochMetrics(BaseModel):
    loss: float
    accuracy: float


class EpochRecord(BaseModel):
    epoch: int
    loss: float
    accuracy: float
    val_loss: Optional[float] = None
    val_accuracy: Optional[float] = None
    enk_b: Dict[int, float] = {}


def _chunk_pass(graph: ModelGraph, x: np.ndarray, y: np.ndarray, total: int,
                rng: np.random.Generator) -> Tuple[float, int, Dict[str, np.ndarray]]:
    scores, trace = graph.run(x, training=True, rng=rng, keep_trace=True)
    loss, d_scores = cross_entropy_loss(scores, y)
    d_scores *= len(y) / total
    grads = graph.backprop(trace, d_scores).param_grads
    correct = int(np.sum(scores.argmax(axis=-1) == y))
    return loss * len(y), correct, grads


def _batch_pass(graph: ModelGraph, batch: Batch, seed_seq: np.random.SeedSequence,
                pool: Optional[ThreadPoolExecutor], workers: int) -> Tuple[float, int, Dict[str, np.ndarray]]:
    """Loss sum, correct count and batch-mean gradients for one batch.

    With a pool the batch is split into ``workers`` fixed chunks whose gradients
    are summed in chunk order, so the result is deterministic for a fixed worker count.
    """
    total = len(batch.y)
    if pool is None or workers <= 1 or total < 2:
        return _chunk_pass(graph, batch.x, batch.y, total, np.random.default_rng(seed_seq))

    chunks = [idx for idx in np.array_split(np.arange(total), min(workers, total)) if len(idx)]
    rngs = [np.random.default_rng(s) for s in seed_seq.spawn(len(chunks))]
    futures = [pool.submit(_chunk_pass, graph, batch.x[idx], batch.y[idx], total, rng)
               for idx, rng in zip(chunks, rngs)]
    loss_sum, correct, grads = 0.0, 0, {}
    for future in futures:
        chunk_loss, chunk_correct, chunk_grads = future.result()
        loss_sum += chunk_loss
        correct += chunk_correct
        for name, g in chunk_grads.items():
            grads[name] = grads[name] + g if name in grads else g
    return loss_sum, correct, grads


def train_epoch(graph: ModelGraph, batches: Sequence[Batch], state: AdamState, seed: int,
                workers: int = 0) -> EpochMetrics:
    """One pass over ``batches`` in seeded shuffle order."""
    if not batches:
        raise ParameterError("cannot train on an empty dataset")
    graph.train()
    order_seq, noise_seq = np.random.SeedSequence(seed).spawn(2)
    order = np.random.default_rng(order_seq).permutation(len(batches))
    batch_seqs = noise_seq.spawn(len(batches))

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        loss_sum, correct, seen = 0.0, 0, 0
        for k in order:
            batch = batches[k]
            batch_loss, batch_correct, grads = _batch_pass(graph, batch, batch_seqs[k], pool, workers)
            params = graph.named_parameters()
            adam_step(state, params, {name: grads[name] for name in params})
            loss_sum += batch_loss
            correct += batch_correct
            seen += len(batch.y)
    finally:
        if pool is not None:
            pool.shutdown()
    return EpochMetrics(loss=loss_sum / seen, accuracy=correct / seen)


def predict_scores(graph: ModelGraph, x: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """Eval-mode class scores for every row of ``x``."""
    graph.eval()
    outputs = [graph.run(x[i:i + batch_size], training=False)[0] for i in range(0, len(x), batch_size)]
    return np.concatenate(outputs, axis=0)


def evaluate(graph: ModelGraph, x: np.ndarray, y: np.ndarray, batch_size: int = 64) -> Tuple[float, float, np.ndarray]:
    """Mean loss, accuracy and predicted classes in eval mode."""
    if len(y) == 0:
        raise ParameterError("cannot evaluate on an empty dataset")
    scores = predict_scores(graph, x, batch_size)
    loss, _ = cross_entropy_loss(scores, y)
    predictions = scores.argmax(axis=-1)
    return loss, float(np.mean(predictions == y)), predictions


def fit(graph: ModelGraph, batches: Sequence[Batch], epochs: int, state: AdamState, seed: int,
        val: Optional[Batch] = None, workers: int = 0,
        on_epoch: Optional[Callable[[EpochRecord], None]] = None) -> List[EpochRecord]:
    """Run ``epochs`` epochs, evaluating on ``val`` after each one."""
    history: List[EpochRecord] = []
    for epoch in range(1, epochs + 1):
        metrics = train_epoch(graph, batches, state, seed=seed * 100003 + epoch, workers=workers)
        record = EpochRecord(epoch=epoch, loss=metrics.loss, accuracy=metrics.accuracy, enk_b=graph.enk_scales())
        if val is not None and len(val.y):
            record.val_loss, record.val_accuracy, _ = evaluate(graph, val.x, val.y)
        history.append(record)
        logger.debug("epoch %d loss=%.6f acc=%.4f val_acc=%s b=%s", epoch, record.loss, record.accuracy,
                     record.val_accuracy, record.enk_b)
        if on_epoch is not None:
            on_epoch(record)
    graph.eval()
    return history
