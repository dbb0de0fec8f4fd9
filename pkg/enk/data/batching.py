"""Stratified train/validation split and mini-batching"""

from typing import List, Tuple

import numpy as np

from ..errors import ParameterError
from ..nn.training import Batch
from .epochs import EpochSet


def stratified_split(labels: np.ndarray, class_count: int, val_fraction: float,
                     rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Train and validation indices; each class gives ``round(count * val_fraction)`` trials to validation."""
    train, val = [], []
    for k in range(class_count):
        members = rng.permutation(np.flatnonzero(labels == k))
        n_val = int(round(len(members) * val_fraction))
        val.append(members[:n_val])
        train.append(members[n_val:])
    return np.concatenate(train).astype(np.int64), np.sort(np.concatenate(val)).astype(np.int64)


def split_and_batch(e: EpochSet, val_fraction: float, batch_size: int, seed: int) -> Tuple[List[Batch], EpochSet]:
    """Seeded stratified split, then the shuffled training trials cut into batches (last may be short).

    Batch inputs are shaped ``[n, 1, channels, samples]``.
    """
    if not 0 <= val_fraction < 1:
        raise ParameterError(f"val_fraction must lie in [0, 1), got {val_fraction}")
    if batch_size < 1:
        raise ParameterError(f"batch_size must be >= 1, got {batch_size}")
    rng = np.random.default_rng(seed)
    train_idx, val_idx = stratified_split(e.labels, e.class_count, val_fraction, rng)
    if batch_size > len(train_idx):
        raise ParameterError(f"batch_size {batch_size} exceeds the {len(train_idx)} training trials")

    train_idx = rng.permutation(train_idx)
    x = e.model_input()
    batches = [
        Batch(x=x[train_idx[i:i + batch_size]], y=e.labels[train_idx[i:i + batch_size]])
        for i in range(0, len(train_idx), batch_size)
    ]
    return batches, e.subset(val_idx)
