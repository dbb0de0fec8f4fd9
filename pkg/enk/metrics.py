"""Accuracy, per-class and support-weighted F1, confusion matrices and CSV rows.

Zero-division convention: a class never predicted has precision 0, a class
with no true instances has recall 0, and F1 is 0 whenever P + R == 0.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from .errors import FileError, ParameterError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"


class ConfusionMatrix(BaseModel):
    """``counts[true, predicted]``"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    counts: np.ndarray

    @property
    def class_count(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def confusion(labels: Sequence[int], predictions: Sequence[int], class_count: int) -> ConfusionMatrix:
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    predictions = np.asarray(predictions, dtype=np.int64).reshape(-1)
    if labels.shape != predictions.shape:
        raise ParameterError(f"{len(labels)} labels but {len(predictions)} predictions")
    for name, values in (("label", labels), ("prediction", predictions)):
        if values.size and (values.min() < 0 or values.max() >= class_count):
            raise ParameterError(f"{name} out of range for {class_count} classes")
    counts = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(counts, (labels, predictions), 1)
    return ConfusionMatrix(counts=counts)


def _require_total(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise ParameterError("metrics of an empty confusion matrix are undefined")


def accuracy(cm: ConfusionMatrix) -> float:
    _require_total(cm)
    return float(np.trace(cm.counts)) / cm.total


def f1_per_class(cm: ConfusionMatrix) -> np.ndarray:
    _require_total(cm)
    tp = np.diag(cm.counts).astype(np.float64)
    predicted = cm.counts.sum(axis=0)
    actual = cm.counts.sum(axis=1)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    denom = precision + recall
    return np.divide(2 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)


def f1_weighted(cm: ConfusionMatrix) -> float:
    """Per-class F1 averaged with weights proportional to true-class support."""
    support = cm.support()
    return float(np.dot(f1_per_class(cm), support) / support.sum())


def f1_class1(cm: ConfusionMatrix) -> float:
    """Positive-class F1, the headline figure of binary runs."""
    if cm.class_count != 2:
        raise ParameterError("positive-class F1 is defined for binary runs only")
    return float(f1_per_class(cm)[1])


class MetricsRow(BaseModel):
    run_id: str
    dataset: str
    family: str
    variant: str
    seed: int
    accuracy: float
    f1_weighted: float
    f1_class1: Optional[float] = None
    epochs_run: int
    param_count: int


def metrics_row(cm: ConfusionMatrix, **fields) -> MetricsRow:
    return MetricsRow(
        accuracy=accuracy(cm),
        f1_weighted=f1_weighted(cm),
        f1_class1=f1_class1(cm) if cm.class_count == 2 else None,
        **fields,
    )


def write_csv(rows: Iterable[Union[BaseModel, dict]], path: Union[str, Path],
              columns: Optional[List[str]] = None) -> Path:
    """Comma-separated with a header row; floats carry 9 significant digits."""
    path = Path(path)
    records = [r.model_dump() if isinstance(r, BaseModel) else dict(r) for r in rows]
    frame = pd.DataFrame.from_records(records, columns=columns)
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc.strerror or exc}") from exc
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path
