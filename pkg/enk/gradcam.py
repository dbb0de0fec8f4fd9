"""Gradient-weighted class activation maps over a conv layer of a ModelGraph.

The map of layer ``L`` for class ``k`` is ``ReLU(sum_f alpha_f * A_f)`` where
``A`` is the layer output and ``alpha_f`` the spatial mean of
``d score[k] / d A_f``. It is upsampled (nearest neighbour) to the input's
channels x samples grid and divided by its maximum.
"""

import logging
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import pandas as pd
import plotly.graph_objects as go
from PIL import Image
from pydantic import BaseModel, ConfigDict

from .errors import FileError, ParameterError
from .metrics import FLOAT_FORMAT
from .nn.graph import ModelGraph
from .tensor import Shape2D

logger = logging.getLogger(__name__)

CONV_KINDS = ("conv", "enk-conv")
OVERLAY_DIV_ID = "enk-gradcam"

PathLike = Union[str, Path]


class HeatMap(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    layer_index: int
    class_index: int
    max_value: float

    @property
    def shape(self):
        return self.values.shape


def first_conv_index(graph: ModelGraph) -> int:
    for i, layer in enumerate(graph.layers):
        if layer.kind in CONV_KINDS:
            return i
    raise ParameterError("graph has no convolution layer")


def upsample_nearest(cam: np.ndarray, rows: int, cols: int) -> np.ndarray:
    r = (np.arange(rows) * cam.shape[0]) // rows
    c = (np.arange(cols) * cam.shape[1]) // cols
    return cam[np.ix_(r, c)]


def normalize(raw: np.ndarray, layer_index: int, class_index: int) -> HeatMap:
    peak = float(raw.max()) if raw.size else 0.0
    values = raw / peak if peak > 0 else np.zeros_like(raw)
    return HeatMap(values=values, layer_index=layer_index, class_index=class_index, max_value=peak)


def grad_cam(graph: ModelGraph, x: np.ndarray, class_idx: int, layer_idx: Optional[int] = None) -> HeatMap:
    """Heat map of one trial ``x`` (shaped like the graph input) on the graph's channels x samples grid."""
    if layer_idx is None:
        layer_idx = first_conv_index(graph)
    if not 0 <= layer_idx < len(graph.layers) or graph.layers[layer_idx].kind not in CONV_KINDS:
        raise ParameterError(f"layer {layer_idx} is not a conv or enk-conv layer")
    if not 0 <= class_idx < graph.class_count:
        raise ParameterError(f"class {class_idx} out of range for {graph.class_count} classes")

    scores, trace = graph.run(x, training=False, keep_trace=True)
    d_scores = np.zeros_like(scores)
    d_scores[0, class_idx] = 1.0
    d_activation = graph.backprop(trace, d_scores).d_outputs[layer_idx][0]
    activation = trace.outputs[layer_idx][0]

    alpha = d_activation.mean(axis=(1, 2))
    cam = np.maximum(np.tensordot(alpha, activation, axes=1), 0.0)
    grid = Shape2D.of(graph.input_shape)
    return normalize(upsample_nearest(cam, grid.rows, grid.cols), layer_idx, class_idx)


def heatmap_diff(a: HeatMap, b: HeatMap) -> HeatMap:
    """``|a - b|`` renormalized; keeps ``a``'s layer and class."""
    if a.shape != b.shape:
        raise ParameterError(f"cannot diff heat maps of shapes {list(a.shape)} and {list(b.shape)}")
    return normalize(np.abs(a.values - b.values), a.layer_index, a.class_index)


def heatmap_filename(run_id: str, variant: str, trial: int, class_idx: int, suffix: str) -> str:
    return f"{run_id}_{variant}_trial{trial}_class{class_idx}.{suffix}"


def heatmap_export(h: HeatMap, path: PathLike, format: Literal["csv", "pgm"] = "csv") -> Path:
    """CSV: channels rows x samples columns. PGM: binary 8-bit grayscale, 255 at the maximum.

    The PGM header is the single line ``P5 <w> <h> 255``.
    """
    path = Path(path)
    try:
        if format == "csv":
            pd.DataFrame(h.values).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT,
                                          lineterminator="\n")
        elif format == "pgm":
            pixels = np.clip(np.rint(h.values * 255.0), 0, 255).astype(np.uint8)
            image = Image.fromarray(pixels, mode="L")
            header = f"P5 {image.width} {image.height} 255\n".encode("ascii")
            path.write_bytes(header + image.tobytes())
        else:
            raise ParameterError(f"unknown heat map format '{format}'")
    except OSError as exc:
        raise FileError(f"cannot write heat map {path}: {exc.strerror or exc}") from exc
    logger.debug("wrote heat map %s", path)
    return path


def trial_export(trial: np.ndarray, path: PathLike) -> Path:
    """Raw channels x samples trial as CSV, for overlay plotting."""
    path = Path(path)
    try:
        pd.DataFrame(np.asarray(trial).reshape(trial.shape[-2], trial.shape[-1])).to_csv(
            path, header=False, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise FileError(f"cannot write trial {path}: {exc.strerror or exc}") from exc
    return path


def heatmap_overlay_html(h: HeatMap, trial: np.ndarray, path: PathLike, title: str = "") -> Path:
    """Heat map with each channel's trace drawn over its row."""
    trial = np.asarray(trial).reshape(h.shape)
    fig = go.Figure(go.Heatmap(z=h.values, colorscale="Jet", zmin=0.0, zmax=1.0, colorbar={"title": "Grad-CAM"}))
    span = float(np.abs(trial).max()) or 1.0
    for ch, trace in enumerate(trial):
        fig.add_trace(go.Scatter(y=ch + 0.4 * trace / span, mode="lines", line={"color": "black", "width": 1},
                                 name=f"ch {ch}", showlegend=False))
    fig.update_layout(title=title, xaxis_title="sample", yaxis_title="channel")
    try:
        fig.write_html(str(path), include_plotlyjs="cdn", full_html=True, div_id=OVERLAY_DIV_ID)
    except OSError as exc:
        raise FileError(f"cannot write overlay {path}: {exc.strerror or exc}") from exc
    return Path(path)
