"""Ordered layer graph: shape validation, forward/backward and parameter census"""

import logging
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimsError, EnkError, GraphError
from ..tensor import Tensor, ensure_finite
from .layers import EnkConvLayer, Layer, Shape

logger = logging.getLogger(__name__)

TRAIN = "train"
EVAL = "eval"


class Trace(NamedTuple):
    """Per-layer caches and outputs recorded by a forward pass."""

    caches: List[Any]
    outputs: List[np.ndarray]


class Backprop(NamedTuple):
    param_grads: Dict[str, np.ndarray]
    d_input: np.ndarray
    d_outputs: List[np.ndarray]


def param_key(index: int, name: str) -> str:
    return f"{index}.{name}"


class ModelGraph:
    """Layers applied in order to batches shaped ``[N, *input_shape]``."""

    def __init__(self, layers: Sequence[Layer], input_shape: Sequence[int], noise_seed: int = 0):
        if not layers:
            raise GraphError("graph has no layers")
        self.layers: List[Layer] = list(layers)
        self.input_shape: Shape = tuple(int(s) for s in input_shape)
        self.shapes: List[Shape] = self._infer_shapes()
        self.mode = TRAIN
        self.rng = np.random.default_rng(noise_seed)
        self._trace: Optional[Trace] = None

    def _infer_shapes(self) -> List[Shape]:
        shapes = [self.input_shape]
        for i, layer in enumerate(self.layers):
            try:
                shapes.append(tuple(layer.output_shape(shapes[-1])))
            except DimsError as exc:
                raise DimsError(f"layer {i} ({layer.kind}): {exc.detail}") from exc
            except EnkError as exc:
                raise GraphError(f"{layer.kind}: {exc.detail}", layer_index=i) from exc
        return shapes

    @property
    def output_shape(self) -> Shape:
        return self.shapes[-1]

    @property
    def class_count(self) -> int:
        return self.output_shape[-1]

    def train(self) -> "ModelGraph":
        self.mode = TRAIN
        return self

    def eval(self) -> "ModelGraph":
        self.mode = EVAL
        self._trace = None
        return self

    def _batched(self, x: Tensor) -> Tuple[Tensor, bool]:
        if x.shape == self.input_shape:
            return x[None], True
        if x.shape[1:] == self.input_shape:
            return x, False
        raise GraphError(f"input shape {list(x.shape)} does not match declared {list(self.input_shape)}", layer_index=0)

    def run(self, x: Tensor, training: bool, rng: Optional[np.random.Generator] = None,
            keep_trace: bool = False) -> Tuple[Tensor, Optional[Trace]]:
        """Pure forward pass over a batch; the graph itself is not mutated."""
        x, _ = self._batched(x)
        trace = Trace([], []) if keep_trace else None
        for i, layer in enumerate(self.layers):
            try:
                y, cache = layer.forward(x, training, rng)
            except DimsError as exc:
                raise GraphError(f"{layer.kind}: {exc.detail}", layer_index=i) from exc
            if trace is not None:
                trace.caches.append(cache)
                trace.outputs.append(y)
            x = y
        return ensure_finite(x, "graph forward"), trace

    def backprop(self, trace: Trace, d_scores: Tensor) -> Backprop:
        """Reverse pass over a recorded trace, visiting layers in exact reverse order."""
        if trace is None or len(trace.caches) != len(self.layers):
            raise GraphError("backward needs a trace recorded by a forward pass")
        param_grads: Dict[str, np.ndarray] = {}
        d_outputs: List[Optional[np.ndarray]] = [None] * len(self.layers)
        d = d_scores
        for i in reversed(range(len(self.layers))):
            d_outputs[i] = d
            d, grads = self.layers[i].backward(trace.caches[i], d)
            for name, grad in grads.items():
                param_grads[param_key(i, name)] = grad
        return Backprop(param_grads, d, d_outputs)

    def forward(self, x: Tensor) -> Tensor:
        """Mode-aware forward: caches activations and draws noise only in train mode."""
        training = self.mode == TRAIN
        single = x.shape == self.input_shape
        out, self._trace = self.run(x, training=training, rng=self.rng, keep_trace=training)
        return out[0] if single else out

    def backward(self, d_scores: Tensor) -> Backprop:
        if self._trace is None:
            raise GraphError("backward called without a cached train-mode forward pass")
        if d_scores.ndim == 1:
            d_scores = d_scores[None]
        return self.backprop(self._trace, d_scores)

    def named_parameters(self, trainable_only: bool = True) -> Dict[str, np.ndarray]:
        named: Dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.layers):
            for name, array in layer.params.items():
                if trainable_only and name in layer.frozen:
                    continue
                named[param_key(i, name)] = array
        return named

    def param_count(self) -> int:
        return sum(layer.trainable_count() for layer in self.layers)

    def enk_scales(self) -> Dict[int, float]:
        """Current ``b`` of every EnK layer, keyed by layer index."""
        return {i: layer.b for i, layer in enumerate(self.layers) if isinstance(layer, EnkConvLayer)}

    def summary(self) -> str:
        lines = [f"input {list(self.input_shape)}"]
        for i, layer in enumerate(self.layers):
            lines.append(f"{i:>3} {layer.kind:<15} -> {list(self.shapes[i + 1])}  params={layer.trainable_count()}")
        lines.append(f"trainable parameters: {self.param_count()}")
        return "\n".join(lines)


def graph_forward(g: ModelGraph, x: Tensor) -> Tensor:
    return g.forward(x)


def param_count(g: ModelGraph) -> int:
    return g.param_count()
