"""im2col lowering of the standard convolution.

Not used by the reference paths; it exists so the benchmark can compare the
tap-accumulation convolution against a GEMM formulation.
"""

import numpy as np

from ..tensor import Tensor
from .conv import EnkConvParams, _as_batch, _checked, _unbatch


def im2col(x4: Tensor, kh: int, kw: int) -> np.ndarray:
    """Rows ordered (batch, out row, out col); columns ordered (channel, kh, kw)."""
    n, c, h, w = x4.shape
    hout, wout = h - kh + 1, w - kw + 1
    col = np.empty((n, c, kh, kw, hout, wout), dtype=x4.dtype)
    for a in range(kh):
        for j in range(kw):
            col[:, :, a, j] = x4[:, :, a:a + hout, j:j + wout]
    return col.transpose(0, 4, 5, 1, 2, 3).reshape(n * hout * wout, c * kh * kw)


def conv2d_forward_lowered(x: Tensor, params: EnkConvParams) -> Tensor:
    x4, squeeze = _as_batch(x)
    dims = _checked(x4, params)
    f = params.filters
    cols = im2col(x4, dims.kh, dims.kw)
    y = cols @ params.kernel.reshape(f, -1).T + params.bias
    y = y.reshape(x4.shape[0], dims.hout, dims.wout, f).transpose(0, 3, 1, 2)
    return _unbatch(np.ascontiguousarray(y), squeeze)
