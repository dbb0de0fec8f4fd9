"""ENKM model checkpoint codec (little-endian).

Layout::

    magic "ENKM" | version u32 | layer count u32
    input ndim u8 | input dims u32 * ndim
    per layer:
        kind tag u8
        int count u8 | ints u32 * count          (pool window, EnK flags)
        float count u8 | floats f64 * count      (noise sigma)
        param count u8
        per param: ndim u8 | dims u32 * ndim | f64 payload

Parameters are written in each kind's fixed order; EnK's ``b`` is a 0-d array,
i.e. a single f64.
"""

import logging
import struct
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from ..errors import EnkError, FileError, FormatError
from .graph import ModelGraph
from .layers import KIND_TAGS, TAG_KINDS, layer_from_config

logger = logging.getLogger(__name__)

MAGIC = b"ENKM"
VERSION = 1

PARAM_ORDER: Dict[str, List[str]] = {
    "conv": ["kernel", "bias"],
    "enk-conv": ["kernel", "bias", "b"],
    "dense": ["weight", "bias"],
}


def encode_checkpoint(graph: ModelGraph) -> bytes:
    out = bytearray(MAGIC)
    out += struct.pack("<II", VERSION, len(graph.layers))
    out += struct.pack("<B", len(graph.input_shape))
    out += struct.pack(f"<{len(graph.input_shape)}I", *graph.input_shape)
    for layer in graph.layers:
        ints, floats = layer.int_config(), layer.float_config()
        names = PARAM_ORDER.get(layer.kind, [])
        out += struct.pack("<BB", KIND_TAGS[layer.kind], len(ints))
        out += struct.pack(f"<{len(ints)}I", *ints)
        out += struct.pack("<B", len(floats))
        out += struct.pack(f"<{len(floats)}d", *floats)
        out += struct.pack("<B", len(names))
        for name in names:
            array = layer.params[name]
            out += struct.pack("<B", array.ndim)
            out += struct.pack(f"<{array.ndim}I", *array.shape)
            out += np.ascontiguousarray(array, dtype="<f8").tobytes()
    return bytes(out)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.buf):
            raise FormatError("truncated checkpoint", offset=self.pos)
        values = struct.unpack_from(fmt, self.buf, self.pos)
        self.pos += size
        return values

    def array(self, shape) -> np.ndarray:
        count = int(np.prod(shape)) if shape else 1
        size = count * 8
        if self.pos + size > len(self.buf):
            raise FormatError("truncated parameter payload", offset=self.pos)
        data = np.frombuffer(self.buf, dtype="<f8", count=count, offset=self.pos)
        self.pos += size
        return data.astype(np.float64).reshape(shape)


def decode_checkpoint(buf: bytes) -> ModelGraph:
    if buf[:4] != MAGIC:
        raise FormatError(f"bad magic {buf[:4]!r}, expected {MAGIC!r}", offset=0)
    reader = _Reader(buf)
    reader.pos = 4
    version, layer_count = reader.take("<II")
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", offset=4)
    (ndim,) = reader.take("<B")
    input_shape = reader.take(f"<{ndim}I")

    layers = []
    for _ in range(layer_count):
        start = reader.pos
        tag, int_count = reader.take("<BB")
        if tag not in TAG_KINDS:
            raise FormatError(f"unknown layer tag {tag}", offset=start)
        kind = TAG_KINDS[tag]
        ints = reader.take(f"<{int_count}I")
        (float_count,) = reader.take("<B")
        floats = reader.take(f"<{float_count}d")
        (param_count,) = reader.take("<B")
        names = PARAM_ORDER.get(kind, [])
        if param_count != len(names):
            raise FormatError(f"{kind} layer stores {param_count} parameters, expected {len(names)}", offset=start)
        params = {}
        for name in names:
            (p_ndim,) = reader.take("<B")
            shape = reader.take(f"<{p_ndim}I")
            params[name] = reader.array(shape)
        try:
            layers.append(layer_from_config(kind, ints, floats, params))
        except (IndexError, KeyError, ValueError, EnkError) as exc:
            raise FormatError(f"malformed {kind} layer: {exc}", offset=start) from exc
    if reader.pos != len(buf):
        raise FormatError("trailing bytes after last layer", offset=reader.pos)
    return ModelGraph(layers, input_shape)


def save_checkpoint(graph: ModelGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.write_bytes(encode_checkpoint(graph))
    except OSError as exc:
        raise FileError(f"cannot write checkpoint {path}: {exc.strerror or exc}") from exc
    logger.info("wrote checkpoint %s (%d layers, %d parameters)", path, len(graph.layers), graph.param_count())
    return path


def load_checkpoint(path: Union[str, Path]) -> ModelGraph:
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise FileError(f"cannot read checkpoint {path}: {exc.strerror or exc}") from exc
    return decode_checkpoint(buf)
