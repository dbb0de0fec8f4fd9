"""Toy CNN classifiers shaped after common EEG baselines.

All three families take a single-plane input ``[1, channels, samples]`` and
start with a temporal convolution. The ``enk`` variant inserts one EnK layer
right after that first convolution and ``gauss`` inserts a Gaussian-noise layer
in the same slot; otherwise the layer lists are identical.

The EnK slot layer uses a frozen identity 1x1 kernel, so it adds
``(q + 1) * b * sum_ch x[ch, p, q]`` to its input, keeps every shape unchanged
and contributes exactly one trainable parameter (``b``).

These are toy analogs: depthwise-separable convolution, batch normalization
and dropout are left out.

* compact-toy  (EEGNet-like): temporal conv, spatial conv, ELU, avg-pool,
  second narrow conv block, ELU, avg-pool, dense.
* shallow-toy  (ShallowConvNet-like): large temporal kernel, spatial conv,
  square, avg-pool, log, dense.
* deep-toy     (DeepConvNet-like): temporal + spatial conv block followed by
  three conv/ELU/max-pool blocks, dense.
"""

import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..errors import DimsError, ParameterError
from ..nn.graph import ModelGraph
from ..nn.layers import (
    AvgPoolLayer,
    ConvLayer,
    DenseLayer,
    EluLayer,
    EnkConvLayer,
    FlattenLayer,
    GaussianNoiseLayer,
    Layer,
    LogLayer,
    MaxPoolLayer,
    SquareLayer,
)
from ..presets import PRESETS

logger = logging.getLogger(__name__)

Family = Literal["compact-toy", "shallow-toy", "deep-toy"]
Variant = Literal["org", "enk", "gauss"]

FAMILIES: Tuple[str, ...] = ("compact-toy", "shallow-toy", "deep-toy")
VARIANTS: Tuple[str, ...] = ("org", "enk", "gauss")


class ModelWidths(BaseModel):
    """Filter counts and kernel extents; ``None`` extents adapt to the input width."""

    temporal_filters: int = Field(default=8, ge=1)
    spatial_filters: int = Field(default=8, ge=1)
    block_filters: int = Field(default=8, ge=1)
    temporal_kernel: Optional[int] = Field(default=None, ge=1)
    block_kernel: Optional[int] = Field(default=None, ge=1)
    pool: Optional[int] = Field(default=None, ge=1)


FAMILY_WIDTHS: Dict[str, ModelWidths] = {
    "compact-toy": ModelWidths(temporal_filters=4, spatial_filters=8, block_filters=8),
    "shallow-toy": ModelWidths(temporal_filters=8, spatial_filters=8, block_filters=8),
    "deep-toy": ModelWidths(temporal_filters=8, spatial_filters=8, block_filters=8),
}


class ModelSpec(BaseModel):
    family: Family
    channels: int = Field(..., ge=1)
    samples: int = Field(..., ge=1)
    class_count: int = Field(..., ge=2)
    variant: Variant = "org"
    widths: Optional[ModelWidths] = None
    noise_sigma: float = Field(default=0.1, ge=0)
    enk_kernel_width: int = Field(default=1, ge=1)
    enk_trainable_kernel: bool = False
    enk_b_init: float = 0.0
    enk_impl: Literal["decomposed", "naive"] = "decomposed"
    init_seed: int = Field(default=0, ge=0)
    name: Optional[str] = None

    @field_validator("family", "variant", mode="before")
    @classmethod
    def normalize(cls, v):
        return v.lower() if isinstance(v, str) else v

    def resolved_widths(self) -> ModelWidths:
        return self.widths or FAMILY_WIDTHS[self.family]


def glorot_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class _Builder:
    """Tracks the running activation shape while layers are appended."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.init_seed)
        self.shape = (1, spec.channels, spec.samples)
        self.layers: List[Layer] = []

    def _append(self, layer: Layer) -> None:
        self.shape = layer.output_shape(self.shape)
        self.layers.append(layer)

    def conv(self, filters: int, kh: int, kw: int) -> None:
        c, h, w = self.shape
        if kh > h or kw > w:
            raise DimsError(f"kernel {kh}x{kw} exceeds activation {h}x{w} at layer {len(self.layers)}")
        kernel = glorot_uniform(self.rng, (filters, c, kh, kw), c * kh * kw, filters * kh * kw)
        self._append(ConvLayer(kernel, np.zeros(filters)))

    def slot(self) -> None:
        """The layer after the first convolution: EnK, Gaussian noise, or nothing."""
        spec = self.spec
        c, h, w = self.shape
        if spec.variant == "gauss":
            self._append(GaussianNoiseLayer(spec.noise_sigma))
        elif spec.variant == "enk":
            kw = spec.enk_kernel_width
            if kw > w:
                raise DimsError(f"EnK kernel width {kw} exceeds activation width {w}")
            if spec.enk_trainable_kernel:
                kernel = glorot_uniform(self.rng, (c, c, 1, kw), c * kw, c * kw)
            else:
                kernel = np.zeros((c, c, 1, kw))
                kernel[np.arange(c), np.arange(c), 0, 0] = 1.0
            layer = EnkConvLayer(kernel, np.zeros(c), b=spec.enk_b_init,
                                 trainable_kernel=spec.enk_trainable_kernel, impl=spec.enk_impl)
            self._append(layer)

    def pool(self, kind: str, requested: Optional[int], default: int) -> None:
        w = self.shape[2]
        size = min(default, w) if requested is None else requested
        layer = AvgPoolLayer((1, size)) if kind == "avg" else MaxPoolLayer((1, size))
        self._append(layer)

    def add(self, layer: Layer) -> None:
        self._append(layer)

    def dense(self) -> None:
        self._append(FlattenLayer())
        (n_in,) = self.shape
        k = self.spec.class_count
        self._append(DenseLayer(glorot_uniform(self.rng, (n_in, k), n_in, k), np.zeros(k)))


def _auto(requested: Optional[int], default: int, available: int) -> int:
    return requested if requested is not None else max(1, min(default, available))


def _build_compact(b: _Builder, widths: ModelWidths) -> None:
    spec = b.spec
    b.conv(widths.temporal_filters, 1, _auto(widths.temporal_kernel, 16, spec.samples // 4))
    b.slot()
    b.conv(widths.spatial_filters, spec.channels, 1)
    b.add(EluLayer())
    b.pool("avg", widths.pool, 4)
    b.conv(widths.block_filters, 1, _auto(widths.block_kernel, 8, b.shape[2]))
    b.add(EluLayer())
    b.pool("avg", widths.pool, 8)
    b.dense()


def _build_shallow(b: _Builder, widths: ModelWidths) -> None:
    spec = b.spec
    b.conv(widths.temporal_filters, 1, _auto(widths.temporal_kernel, 25, spec.samples // 2))
    b.slot()
    b.conv(widths.spatial_filters, spec.channels, 1)
    b.add(SquareLayer())
    b.pool("avg", widths.pool, max(1, b.shape[2] // 6))
    b.add(LogLayer())
    b.dense()


def _build_deep(b: _Builder, widths: ModelWidths) -> None:
    spec = b.spec
    b.conv(widths.temporal_filters, 1, _auto(widths.temporal_kernel, 10, spec.samples // 4))
    b.slot()
    b.conv(widths.spatial_filters, spec.channels, 1)
    b.add(EluLayer())
    b.pool("max", widths.pool, 2)
    for _ in range(3):
        b.conv(widths.block_filters, 1, _auto(widths.block_kernel, 5, b.shape[2]))
        b.add(EluLayer())
        b.pool("max", widths.pool, 2)
    b.dense()


BUILDERS = {"compact-toy": _build_compact, "shallow-toy": _build_shallow, "deep-toy": _build_deep}


def build_model(spec: ModelSpec) -> ModelGraph:
    """Build and validate the graph described by ``spec``."""
    builder = _Builder(spec)
    BUILDERS[spec.family](builder, spec.resolved_widths())
    graph = ModelGraph(builder.layers, (1, spec.channels, spec.samples), noise_seed=spec.init_seed)
    logger.debug("built %s/%s: %d layers, %d parameters", spec.family, spec.variant, len(graph.layers),
                  graph.param_count())
    return graph


def build_control(enk_graph: ModelGraph) -> ModelGraph:
    """Copy of ``enk_graph`` with its EnK layer replaced by a plain conv carrying the same kernel and bias.

    Every other layer keeps its weights, so with ``b`` at 0 both graphs compute the same function.
    """
    index = slot_index(enk_graph)
    enk_layer = enk_graph.layers[index]
    if not isinstance(enk_layer, EnkConvLayer):
        raise ParameterError(f"layer {index} of the given graph is not an EnK layer")
    layers = list(enk_graph.layers)
    layers[index] = ConvLayer(enk_layer.params["kernel"].copy(), enk_layer.params["bias"].copy())
    return ModelGraph(layers, enk_graph.input_shape)


def slot_index(graph: ModelGraph) -> int:
    """Index of the layer following the first convolution."""
    for i, layer in enumerate(graph.layers):
        if layer.kind in ("conv", "enk-conv"):
            return i + 1
    raise ParameterError("graph has no convolution layer")


def list_presets() -> List[ModelSpec]:
    """Every dataset preset crossed with every family (org variant)."""
    specs = []
    for preset in PRESETS.values():
        for family in FAMILIES:
            specs.append(ModelSpec(
                name=f"{preset.name}/{family}", family=family, channels=preset.channels,
                samples=preset.samples, class_count=preset.class_count,
            ))
    return specs
