"""Layer kinds of the model graph.

Every layer works on batches: activations carry a leading batch axis that the
declared shapes (``output_shape``) leave out. ``forward`` returns the output and
a cache that ``backward`` consumes, so a layer holds no per-call state and a
frozen graph can be evaluated from several threads.
"""

from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from ..errors import DimsError, GraphError, ParameterError
from ..ops.conv import (
    EnkConvParams,
    conv2d_backward,
    conv2d_forward,
    conv_dims,
    enk_backward,
    enk_forward_decomposed,
    enk_forward_naive,
)
from ..ops.noise import gaussian_noise_backward, gaussian_noise_forward

Shape = Tuple[int, ...]
Grads = Dict[str, np.ndarray]

ELU_ALPHA = 1.0
LOG_FLOOR = 1e-6


class Layer:
    """Base layer: named parameter arrays plus forward/backward."""

    kind: str = ""
    param_names: Tuple[str, ...] = ()

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.frozen: Set[str] = set()

    def output_shape(self, in_shape: Shape) -> Shape:
        return in_shape

    def forward(self, x: np.ndarray, training: bool, rng: Optional[np.random.Generator]) -> Tuple[np.ndarray, Any]:
        raise NotImplementedError

    def backward(self, cache: Any, d_out: np.ndarray) -> Tuple[np.ndarray, Grads]:
        raise NotImplementedError

    def trainable_count(self) -> int:
        return sum(int(p.size) for name, p in self.params.items() if name not in self.frozen)

    # checkpoint hooks
    def int_config(self) -> List[int]:
        return []

    def float_config(self) -> List[float]:
        return []

    def __repr__(self) -> str:
        shapes = ", ".join(f"{k}={list(v.shape)}" for k, v in self.params.items())
        return f"{type(self).__name__}({shapes})"


class ConvLayer(Layer):
    kind = "conv"
    param_names = ("kernel", "bias")

    def __init__(self, kernel: np.ndarray, bias: np.ndarray):
        super().__init__()
        self.params = {"kernel": kernel, "bias": bias}

    def conv_params(self) -> EnkConvParams:
        return EnkConvParams(kernel=self.params["kernel"], bias=self.params["bias"])

    def output_shape(self, in_shape: Shape) -> Shape:
        kernel = self.params["kernel"]
        if len(in_shape) != 3:
            raise GraphError(f"{self.kind} expects [channels, rows, cols] input, got {list(in_shape)}")
        if in_shape[0] != kernel.shape[1]:
            raise GraphError(f"{self.kind} expects {kernel.shape[1]} input channels, got {in_shape[0]}")
        dims = conv_dims(in_shape[1], in_shape[2], kernel.shape[2], kernel.shape[3])
        return (kernel.shape[0], dims.hout, dims.wout)

    def forward(self, x, training, rng):
        return conv2d_forward(x, self.conv_params()), x

    def backward(self, cache, d_out):
        grads = conv2d_backward(cache, self.conv_params(), d_out)
        return grads.d_input, {"kernel": grads.d_kernel, "bias": grads.d_bias}


class EnkConvLayer(ConvLayer):
    """Convolution with the time-encoding offset ``(q + 1) * b``."""

    kind = "enk-conv"
    param_names = ("kernel", "bias", "b")
    IMPLS = ("decomposed", "naive")

    def __init__(self, kernel: np.ndarray, bias: np.ndarray, b: float = 0.0,
                 trainable_kernel: bool = True, impl: str = "decomposed"):
        super().__init__(kernel, bias)
        if impl not in self.IMPLS:
            raise ParameterError(f"unknown EnK implementation '{impl}'")
        self.params["b"] = np.array(b, dtype=kernel.dtype)
        self.trainable_kernel = trainable_kernel
        self.impl = impl
        if not trainable_kernel:
            self.frozen = {"kernel", "bias"}

    @property
    def b(self) -> float:
        return float(self.params["b"])

    def conv_params(self) -> EnkConvParams:
        return EnkConvParams(
            kernel=self.params["kernel"], bias=self.params["bias"], b=self.b,
            trainable_kernel=self.trainable_kernel,
        )

    def forward(self, x, training, rng):
        forward = enk_forward_decomposed if self.impl == "decomposed" else enk_forward_naive
        return forward(x, self.conv_params()), x

    def backward(self, cache, d_out):
        grads = enk_backward(cache, self.conv_params(), d_out)
        return grads.d_input, {
            "kernel": grads.d_kernel,
            "bias": grads.d_bias,
            "b": np.array(grads.d_b, dtype=self.params["b"].dtype),
        }

    def int_config(self) -> List[int]:
        return [int(self.trainable_kernel), self.IMPLS.index(self.impl)]


class GaussianNoiseLayer(Layer):
    kind = "gaussian-noise"

    def __init__(self, sigma: float):
        super().__init__()
        if sigma < 0:
            raise ParameterError(f"sigma must be >= 0, got {sigma}")
        self.sigma = float(sigma)

    def forward(self, x, training, rng):
        if training and self.sigma > 0 and rng is None:
            raise ParameterError("gaussian-noise needs a random generator in training mode")
        return gaussian_noise_forward(x, self.sigma, training, rng), None

    def backward(self, cache, d_out):
        return gaussian_noise_backward(d_out), {}

    def float_config(self) -> List[float]:
        return [self.sigma]


class ReluLayer(Layer):
    kind = "relu"

    def forward(self, x, training, rng):
        return np.maximum(x, 0), x

    def backward(self, cache, d_out):
        return d_out * (cache > 0), {}


class EluLayer(Layer):
    kind = "elu"

    def forward(self, x, training, rng):
        y = np.where(x > 0, x, ELU_ALPHA * np.expm1(np.minimum(x, 0)))
        return y, (x, y)

    def backward(self, cache, d_out):
        x, y = cache
        return d_out * np.where(x > 0, 1.0, y + ELU_ALPHA), {}


class SquareLayer(Layer):
    kind = "square"

    def forward(self, x, training, rng):
        return x * x, x

    def backward(self, cache, d_out):
        return 2.0 * cache * d_out, {}


class LogLayer(Layer):
    """Natural log with the input clamped at LOG_FLOOR."""

    kind = "log"

    def forward(self, x, training, rng):
        return np.log(np.maximum(x, LOG_FLOOR)), x

    def backward(self, cache, d_out):
        safe = np.maximum(cache, LOG_FLOOR)
        return np.where(cache > LOG_FLOOR, d_out / safe, 0.0), {}


class _PoolLayer(Layer):
    """Non-overlapping pooling, stride = window, trailing remainder dropped."""

    def __init__(self, window: Sequence[int]):
        super().__init__()
        ph, pw = (int(v) for v in window)
        if ph < 1 or pw < 1:
            raise ParameterError(f"pool window must be positive, got {ph}x{pw}")
        self.window = (ph, pw)

    def output_shape(self, in_shape: Shape) -> Shape:
        if len(in_shape) != 3:
            raise GraphError(f"{self.kind} expects [channels, rows, cols] input, got {list(in_shape)}")
        c, h, w = in_shape
        ph, pw = self.window
        if ph > h or pw > w:
            raise DimsError(f"pool window {ph}x{pw} larger than input {h}x{w}")
        return (c, h // ph, w // pw)

    def _blocks(self, x: np.ndarray) -> np.ndarray:
        n, c, h, w = x.shape
        ph, pw = self.window
        ho, wo = h // ph, w // pw
        blocks = x[:, :, :ho * ph, :wo * pw].reshape(n, c, ho, ph, wo, pw)
        return blocks.transpose(0, 1, 2, 4, 3, 5).reshape(n, c, ho, wo, ph * pw)

    def _unblocks(self, blocks: np.ndarray, in_shape: Shape) -> np.ndarray:
        n, c, h, w = in_shape
        ph, pw = self.window
        ho, wo = h // ph, w // pw
        d_x = np.zeros(in_shape, dtype=blocks.dtype)
        d_x[:, :, :ho * ph, :wo * pw] = (
            blocks.reshape(n, c, ho, wo, ph, pw).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, ho * ph, wo * pw)
        )
        return d_x

    def int_config(self) -> List[int]:
        return list(self.window)


class AvgPoolLayer(_PoolLayer):
    kind = "avg-pool"

    def forward(self, x, training, rng):
        return self._blocks(x).mean(axis=-1), x.shape

    def backward(self, cache, d_out):
        size = self.window[0] * self.window[1]
        blocks = np.repeat(d_out[..., None] / size, size, axis=-1)
        return self._unblocks(blocks, cache), {}


class MaxPoolLayer(_PoolLayer):
    """Ties route the gradient to the first maximal element in scan order."""

    kind = "max-pool"

    def forward(self, x, training, rng):
        blocks = self._blocks(x)
        winner = blocks.argmax(axis=-1)
        return np.take_along_axis(blocks, winner[..., None], axis=-1)[..., 0], (x.shape, winner)

    def backward(self, cache, d_out):
        in_shape, winner = cache
        size = self.window[0] * self.window[1]
        blocks = np.zeros(d_out.shape + (size,), dtype=d_out.dtype)
        np.put_along_axis(blocks, winner[..., None], d_out[..., None], axis=-1)
        return self._unblocks(blocks, in_shape), {}


class FlattenLayer(Layer):
    kind = "flatten"

    def output_shape(self, in_shape: Shape) -> Shape:
        return (int(np.prod(in_shape)),)

    def forward(self, x, training, rng):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, cache, d_out):
        return d_out.reshape(cache), {}


class DenseLayer(Layer):
    kind = "dense"
    param_names = ("weight", "bias")

    def __init__(self, weight: np.ndarray, bias: np.ndarray):
        super().__init__()
        if weight.ndim != 2 or bias.shape != (weight.shape[1],):
            raise ParameterError(f"dense expects weight [in, out] and bias [out], got {weight.shape}, {bias.shape}")
        self.params = {"weight": weight, "bias": bias}

    def output_shape(self, in_shape: Shape) -> Shape:
        if in_shape != (self.params["weight"].shape[0],):
            raise GraphError(f"dense expects input [{self.params['weight'].shape[0]}], got {list(in_shape)}")
        return (self.params["weight"].shape[1],)

    def forward(self, x, training, rng):
        return x @ self.params["weight"] + self.params["bias"], x

    def backward(self, cache, d_out):
        return d_out @ self.params["weight"].T, {"weight": cache.T @ d_out, "bias": d_out.sum(axis=0)}


class SoftmaxLayer(Layer):
    kind = "softmax"

    def forward(self, x, training, rng):
        shifted = np.exp(x - x.max(axis=-1, keepdims=True))
        y = shifted / shifted.sum(axis=-1, keepdims=True)
        return y, y

    def backward(self, cache, d_out):
        y = cache
        return y * (d_out - (d_out * y).sum(axis=-1, keepdims=True)), {}


KIND_TAGS: Dict[str, int] = {
    "conv": 1,
    "enk-conv": 2,
    "gaussian-noise": 3,
    "relu": 4,
    "elu": 5,
    "avg-pool": 6,
    "max-pool": 7,
    "flatten": 8,
    "dense": 9,
    "softmax": 10,
    "square": 11,
    "log": 12,
}
TAG_KINDS = {tag: kind for kind, tag in KIND_TAGS.items()}


def layer_from_config(kind: str, ints: Sequence[int], floats: Sequence[float], params: Dict[str, np.ndarray]) -> Layer:
    """Rebuild a layer from the pieces a checkpoint stores."""
    if kind == "conv":
        return ConvLayer(params["kernel"], params["bias"])
    if kind == "enk-conv":
        return EnkConvLayer(
            params["kernel"], params["bias"], float(params["b"]),
            trainable_kernel=bool(ints[0]), impl=EnkConvLayer.IMPLS[ints[1]],
        )
    if kind == "gaussian-noise":
        return GaussianNoiseLayer(floats[0])
    if kind == "avg-pool":
        return AvgPoolLayer(ints)
    if kind == "max-pool":
        return MaxPoolLayer(ints)
    if kind == "dense":
        return DenseLayer(params["weight"], params["bias"])
    simple = {"relu": ReluLayer, "elu": EluLayer, "flatten": FlattenLayer, "softmax": SoftmaxLayer,
              "square": SquareLayer, "log": LogLayer}
    if kind in simple:
        return simple[kind]()
    raise GraphError(f"unknown layer kind '{kind}'")
