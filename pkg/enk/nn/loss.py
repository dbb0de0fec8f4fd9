"""Softmax cross-entropy"""

from typing import Tuple, Union

import numpy as np

from ..errors import ParameterError
from ..tensor import Tensor

Labels = Union[int, np.ndarray]


def softmax(scores: Tensor) -> Tensor:
    shifted = np.exp(scores - scores.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def cross_entropy_loss(scores: Tensor, label: Labels) -> Tuple[float, Tensor]:
    """Loss ``-log softmax(scores)[label]`` and its gradient w.r.t. the scores.

    ``scores`` may be one score vector with an integer label, or a batch
    ``[N, classes]`` with ``N`` labels; the batch loss and gradient are means.
    """
    single = scores.ndim == 1
    batch = scores[None] if single else scores
    labels = np.atleast_1d(np.asarray(label, dtype=np.int64))
    n, classes = batch.shape
    if labels.shape != (n,):
        raise ParameterError(f"expected {n} labels, got {labels.shape[0]}")
    if np.any(labels < 0) or np.any(labels >= classes):
        raise ParameterError(f"label out of range for {classes} classes")

    shifted = batch - batch.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=-1))
    log_probs = shifted[np.arange(n), labels] - log_norm
    loss = float(-log_probs.mean())

    d_scores = softmax(batch)
    d_scores[np.arange(n), labels] -= 1.0
    d_scores /= n
    return loss, d_scores[0] if single else d_scores
