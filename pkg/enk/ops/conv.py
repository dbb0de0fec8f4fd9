"""Valid 2D convolution and the EnK time-encoding convolution.

Conventions shared by every function in this module:

* stride 1, no padding, cross-correlation orientation (no kernel flip);
* inputs are ``[C, h, w]`` or carry a leading batch axis ``[N, C, h, w]``;
  outputs follow the same convention (``[F, hout, wout]`` / ``[N, F, hout, wout]``);
* rows are EEG channels, columns are time samples.

EnK adds ``(q + 1) * b`` to every kernel element when the kernel sits at output
column ``q`` (one-based position, constant down the rows). Expanding the sum
gives ``EnK(x) = conv(x, K) + b * D * S`` with ``D[q] = q + 1`` and ``S`` the
channel-summed window sum, which is what the decomposed path evaluates.

Backward derivation (``d`` = upstream gradient, ``W[p, q] = x[:, p:p+kh, q:q+kw]``):

* ``d_kernel[f, c, a, j] = sum_{p,q} d[f, p, q] * x[c, p+a, q+j]``
* ``d_b = sum_{f,p,q} d[f, p, q] * (q + 1) * S[p, q]``
* ``d_input[c, p+a, q+j] += sum_f d[f, p, q] * (kernel[f, c, a, j] + (q + 1) * b)``
* ``d_bias[f] = sum_{p,q} d[f, p, q]``
"""

from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, field_validator, model_validator

from ..errors import DimsError, ParameterError
from ..tensor import Tensor, ensure_finite


class EnkConvParams(BaseModel):
    """Kernel ``[F, C, kh, kw]``, per-filter bias ``[F]`` and the time scale ``b``."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kernel: np.ndarray
    bias: np.ndarray
    b: float = 0.0
    trainable_kernel: bool = Field(default=True, description="False freezes kernel and bias; b stays trainable")

    @field_validator("kernel")
    @classmethod
    def validate_kernel(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 4 or min(v.shape) < 1:
            raise ValueError(f"kernel must be [filters, in_channels, kh, kw], got shape {list(v.shape)}")
        return v

    @model_validator(mode="after")
    def validate_bias(self) -> "EnkConvParams":
        if self.bias.shape != (self.kernel.shape[0],):
            raise ValueError(f"bias must have shape [{self.kernel.shape[0]}], got {list(self.bias.shape)}")
        return self

    @property
    def filters(self) -> int:
        return self.kernel.shape[0]

    @property
    def in_channels(self) -> int:
        return self.kernel.shape[1]


class ConvGrads(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    d_input: np.ndarray
    d_kernel: np.ndarray
    d_b: float
    d_bias: np.ndarray


class ConvDims(BaseModel):
    h: PositiveInt
    w: PositiveInt
    kh: PositiveInt
    kw: PositiveInt

    @model_validator(mode="after")
    def validate_extents(self) -> "ConvDims":
        if self.kh > self.h or self.kw > self.w:
            raise ValueError(f"kernel {self.kh}x{self.kw} larger than input {self.h}x{self.w}")
        return self

    @property
    def hout(self) -> int:
        return self.h - self.kh + 1

    @property
    def wout(self) -> int:
        return self.w - self.kw + 1


def conv_dims(h: int, w: int, kh: int, kw: int) -> ConvDims:
    if kh > h or kw > w or min(h, w, kh, kw) < 1:
        raise DimsError(f"kernel {kh}x{kw} does not fit input {h}x{w}")
    return ConvDims(h=h, w=w, kh=kh, kw=kw)


def _as_batch(x: Tensor) -> Tuple[Tensor, bool]:
    if x.ndim == 3:
        return x[None], True
    if x.ndim == 4:
        return x, False
    raise DimsError(f"input must be [C, h, w] or [N, C, h, w], got shape {list(x.shape)}")


def _unbatch(y: Tensor, squeeze: bool) -> Tensor:
    return y[0] if squeeze else y


def _checked(x4: Tensor, params: EnkConvParams) -> ConvDims:
    if x4.shape[1] != params.in_channels:
        raise DimsError(f"input has {x4.shape[1]} channels, kernel expects {params.in_channels}")
    _, _, kh, kw = params.kernel.shape
    return conv_dims(x4.shape[2], x4.shape[3], kh, kw)


def column_positions(wout: int, dtype=np.float64) -> np.ndarray:
    """One-based output column index ``D[q] = q + 1``."""
    return np.arange(1, wout + 1, dtype=dtype)


def _tap_accumulate(x4: Tensor, kernel: Tensor, bias: Tensor, dims: ConvDims,
                    column_offset: Optional[np.ndarray]) -> Tensor:
    """Shared reference evaluation: accumulate one kernel tap at a time.

    ``column_offset[q]`` is added to every kernel element at output column q.
    Taps are visited in (channel, row, column) order and the bias is added last,
    so ``column_offset == 0`` reproduces the plain convolution bit for bit.
    """
    n, c = x4.shape[:2]
    f = kernel.shape[0]
    hout, wout = dims.hout, dims.wout
    dtype = np.result_type(x4.dtype, kernel.dtype)
    out = np.zeros((n, f, hout, wout), dtype=dtype)
    for ch in range(c):
        for a in range(dims.kh):
            for j in range(dims.kw):
                patch = x4[:, ch, a:a + hout, j:j + wout]
                weight = kernel[:, ch, a, j][:, None, None]
                if column_offset is not None:
                    weight = weight + column_offset[None, None, :]
                out += weight[None] * patch[:, None]
    out += bias.astype(dtype)[None, :, None, None]
    return out


def conv2d_forward(x: Tensor, params: EnkConvParams) -> Tensor:
    """Standard valid convolution; ``params.b`` is ignored."""
    x4, squeeze = _as_batch(x)
    dims = _checked(x4, params)
    y = _tap_accumulate(x4, params.kernel, params.bias, dims, column_offset=None)
    return _unbatch(ensure_finite(y, "conv2d_forward"), squeeze)


def window_sum(x: Tensor, kh: int, kw: int) -> Tensor:
    """``S[p, q]``: sum over channels and the kh x kw footprint at (p, q)."""
    x4, squeeze = _as_batch(x)
    conv_dims(x4.shape[2], x4.shape[3], kh, kw)
    summed = x4.sum(axis=1)
    windows = sliding_window_view(summed, (kh, kw), axis=(1, 2))
    s = windows.sum(axis=(-2, -1))
    return _unbatch(s, squeeze)


def enk_forward_naive(x: Tensor, params: EnkConvParams) -> Tensor:
    """Reference EnK: the offset kernel is evaluated directly at every window."""
    x4, squeeze = _as_batch(x)
    dims = _checked(x4, params)
    dtype = np.result_type(x4.dtype, params.kernel.dtype)
    offset = column_positions(dims.wout, dtype) * dtype.type(params.b)
    y = _tap_accumulate(x4, params.kernel, params.bias, dims, column_offset=offset)
    return _unbatch(ensure_finite(y, "enk_forward_naive"), squeeze)


def enk_forward_decomposed(x: Tensor, params: EnkConvParams) -> Tensor:
    """Fast EnK: one standard convolution plus ``b * D * S``."""
    x4, squeeze = _as_batch(x)
    dims = _checked(x4, params)
    y = conv2d_forward(x4, params)
    s = window_sum(x4, dims.kh, dims.kw)
    scale = column_positions(dims.wout, y.dtype) * y.dtype.type(params.b)
    y = y + (scale[None, :] * s)[:, None]
    return _unbatch(ensure_finite(y, "enk_forward_decomposed"), squeeze)


def _backward(x: Tensor, params: EnkConvParams, d_out: Tensor, with_offset: bool) -> ConvGrads:
    x4, squeeze = _as_batch(x)
    d4, _ = _as_batch(d_out)
    dims = _checked(x4, params)
    expected = (x4.shape[0], params.filters, dims.hout, dims.wout)
    if d4.shape != expected:
        raise DimsError(f"d_out shape {list(d_out.shape)} does not match forward output {list(expected[squeeze:])}")

    kernel = params.kernel
    dtype = np.result_type(x4.dtype, kernel.dtype, d4.dtype)
    hout, wout = dims.hout, dims.wout
    d_kernel = np.zeros(kernel.shape, dtype=dtype)
    d_input = np.zeros(x4.shape, dtype=dtype)

    positions = column_positions(wout, dtype)
    filter_sum = d4.sum(axis=1)
    offset_grad = filter_sum * (positions * dtype.type(params.b))[None, None, :] if with_offset else None

    for ch in range(x4.shape[1]):
        for a in range(dims.kh):
            for j in range(dims.kw):
                patch = x4[:, ch, a:a + hout, j:j + wout]
                d_kernel[:, ch, a, j] = np.einsum("nfpq,npq->f", d4, patch)
                contribution = np.einsum("nfpq,f->npq", d4, kernel[:, ch, a, j])
                if offset_grad is not None:
                    contribution = contribution + offset_grad
                d_input[:, ch, a:a + hout, j:j + wout] += contribution

    d_b = 0.0
    if with_offset:
        s = window_sum(x4, dims.kh, dims.kw)
        d_b = float(np.sum(filter_sum * positions[None, None, :] * s, dtype=np.float64))

    return ConvGrads(
        d_input=_unbatch(d_input, squeeze),
        d_kernel=d_kernel,
        d_b=d_b,
        d_bias=d4.sum(axis=(0, 2, 3)),
    )


def enk_backward(x: Tensor, params: EnkConvParams, d_out: Tensor) -> ConvGrads:
    return _backward(x, params, d_out, with_offset=True)


def conv2d_backward(x: Tensor, params: EnkConvParams, d_out: Tensor) -> ConvGrads:
    """Standard convolution backward; ``d_b`` is always 0."""
    return _backward(x, params, d_out, with_offset=False)


def make_params(kernel, bias=None, b: float = 0.0, trainable_kernel: bool = True) -> EnkConvParams:
    """Convenience constructor accepting nested lists or 2D kernels."""
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim == 2:
        kernel = kernel[None, None]
    elif kernel.ndim != 4:
        raise ParameterError(f"kernel must be 2D or 4D, got {kernel.ndim}D")
    bias = np.zeros(kernel.shape[0]) if bias is None else np.asarray(bias, dtype=np.float64).reshape(-1)
    try:
        return EnkConvParams(kernel=kernel, bias=bias, b=float(b), trainable_kernel=trainable_kernel)
    except ValidationError as exc:
        raise ParameterError(str(exc)) from exc
