"""Dense tensor value type and the primitives every other module consumes.

Tensors are plain row-major numpy arrays of 64-bit floats (32-bit opt-in).
Every function here returns a fresh array and never mutates its inputs.
"""

from typing import Iterable, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, DTypeLike, NDArray
from pydantic import BaseModel, ConfigDict, PositiveInt, ValidationError

from .errors import NonFiniteError, ShapeError

Tensor = NDArray[np.floating]
Scalar = Union[int, float, np.floating]

DEFAULT_DTYPE = np.float64
SUPPORTED_DTYPES = (np.dtype(np.float64), np.dtype(np.float32))


class Shape2D(BaseModel):
    """Rows (EEG channels) by columns (time samples)."""

    model_config = ConfigDict(frozen=True)

    rows: PositiveInt
    cols: PositiveInt

    @classmethod
    def of(cls, shape: Sequence[int]) -> "Shape2D":
        """The trailing two extents of ``shape``."""
        if len(shape) < 2:
            raise ShapeError(f"expected at least two extents, got {list(shape)}")
        try:
            return cls(rows=int(shape[-2]), cols=int(shape[-1]))
        except ValidationError as exc:
            raise ShapeError(f"rows and cols must be >= 1, got {list(shape[-2:])}") from exc


def resolve_dtype(dtype: Optional[DTypeLike] = None) -> np.dtype:
    resolved = np.dtype(DEFAULT_DTYPE if dtype is None else dtype)
    if resolved not in SUPPORTED_DTYPES:
        raise ShapeError(f"unsupported element type {resolved}; use float64 or float32")
    return resolved


def _check_extents(shape: Iterable[int]) -> tuple:
    extents = tuple(int(s) for s in shape)
    if not extents:
        raise ShapeError("shape must have at least one extent")
    if any(s < 1 for s in extents):
        raise ShapeError(f"every extent must be >= 1, got {list(extents)}")
    return extents


def tensor_new(shape: Sequence[int], fill: Scalar = 0.0, dtype: Optional[DTypeLike] = None) -> Tensor:
    """Tensor of ``shape`` with every element equal to ``fill``."""
    return np.full(_check_extents(shape), fill, dtype=resolve_dtype(dtype))


def as_tensor(data: ArrayLike, dtype: Optional[DTypeLike] = None) -> Tensor:
    """Copy ``data`` into a contiguous tensor, validating extents and finiteness."""
    array = np.array(data, dtype=resolve_dtype(dtype), order="C", copy=True)
    if array.ndim == 0:
        array = array.reshape(1)
    _check_extents(array.shape)
    return ensure_finite(array, "tensor data")


def tensor_add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"cannot add shapes {list(a.shape)} and {list(b.shape)}")
    return ensure_finite(np.add(a, b), "tensor_add")


def tensor_scale(a: Tensor, s: Scalar) -> Tensor:
    return ensure_finite(np.multiply(a, a.dtype.type(s)), "tensor_scale")


def tensor_reduce_sum(a: Tensor) -> float:
    """Sum of all elements, accumulated in 64-bit precision."""
    return float(np.sum(a, dtype=np.float64))


def ensure_finite(a: Tensor, where: str) -> Tensor:
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{where} produced non-finite values")
    return a
