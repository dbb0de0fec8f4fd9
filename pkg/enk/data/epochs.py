"""EpochSet and its file formats: the ENK1 binary codec and CSV import.

ENK1 layout (little-endian)::

    magic "ENK1" | version u32 | trials u32 | channels u32 | samples u32
    class_count u32 | sample_rate f64 | labels u16 * trials
    payload * (trials * channels * samples), trial-major row-major

Version 1 payloads are f32, version 2 payloads are f64. The writer picks the
version from the set's dtype so a round-trip is always bit-exact.
"""

import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import FileError, FormatError, ParameterError
from ..tensor import Shape2D

logger = logging.getLogger(__name__)

MAGIC = b"ENK1"
PAYLOAD_DTYPES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
MAX_LABEL = np.iinfo(np.uint16).max

HEADER = np.dtype([
    ("magic", "S4"),
    ("version", "<u4"),
    ("trials", "<u4"),
    ("channels", "<u4"),
    ("samples", "<u4"),
    ("class_count", "<u4"),
    ("sample_rate", "<f8"),
])

PathLike = Union[str, Path]


class EpochSet(BaseModel):
    """Labeled trials stored trial-major: ``data[trial, channel, sample]``."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    data: np.ndarray
    labels: np.ndarray
    sample_rate: float = Field(..., gt=0)
    class_count: int = Field(..., ge=2)

    @field_validator("data", mode="before")
    @classmethod
    def as_float_array(cls, v):
        array = np.asarray(v)
        return array if array.dtype in (np.float32, np.float64) else array.astype(np.float64)

    @field_validator("labels", mode="before")
    @classmethod
    def as_label_array(cls, v):
        return np.asarray(v, dtype=np.int64)

    @model_validator(mode="after")
    def check_consistency(self):
        if self.data.ndim != 3:
            raise ValueError(f"data must be trials x channels x samples, got shape {list(self.data.shape)}")
        if self.data.shape[1] < 1 or self.data.shape[2] < 1:
            raise ValueError("channels and samples must be >= 1")
        if self.labels.shape != (self.data.shape[0],):
            raise ValueError(f"{self.labels.shape[0] if self.labels.ndim else 0} labels for {self.data.shape[0]} trials")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise ValueError(f"labels must lie in [0, {self.class_count})")
        return self

    @property
    def trials(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]

    @property
    def samples(self) -> int:
        return self.data.shape[2]

    @property
    def grid(self) -> Shape2D:
        return Shape2D(rows=self.channels, cols=self.samples)

    def subset(self, indices: np.ndarray) -> "EpochSet":
        return EpochSet(data=self.data[indices], labels=self.labels[indices], sample_rate=self.sample_rate,
                        class_count=self.class_count)

    def astype(self, dtype) -> "EpochSet":
        return EpochSet(data=self.data.astype(dtype), labels=self.labels, sample_rate=self.sample_rate,
                        class_count=self.class_count)

    def model_input(self) -> np.ndarray:
        """Trials shaped ``[N, 1, channels, samples]`` for the model zoo."""
        return self.data[:, None, :, :]

    def describe(self) -> str:
        counts = np.bincount(self.labels, minlength=self.class_count).tolist()
        return (f"{self.trials} trials x {self.channels} channels x {self.samples} samples, "
                f"{self.class_count} classes {counts}, {self.sample_rate:g} Hz, {self.data.dtype}")


def encode_epochs(e: EpochSet) -> bytes:
    if e.trials == 0:
        raise FormatError("cannot write an epoch set with zero trials")
    if int(e.labels.max()) > MAX_LABEL:
        raise FormatError(f"labels above {MAX_LABEL} do not fit the u16 label field")
    version = 2 if e.data.dtype == np.float64 else 1
    header = np.zeros(1, dtype=HEADER)
    header[0] = (MAGIC, version, e.trials, e.channels, e.samples, e.class_count, e.sample_rate)
    return b"".join([
        header.tobytes(),
        e.labels.astype("<u2").tobytes(),
        np.ascontiguousarray(e.data, dtype=PAYLOAD_DTYPES[version]).tobytes(),
    ])


def decode_epochs(buf: bytes) -> EpochSet:
    if buf[:4] != MAGIC:
        raise FormatError(f"bad magic {buf[:4]!r}, expected {MAGIC!r}", offset=0)
    if len(buf) < HEADER.itemsize:
        raise FormatError("truncated header", offset=len(buf))
    header = np.frombuffer(buf, dtype=HEADER, count=1)[0]
    version = int(header["version"])
    if version not in PAYLOAD_DTYPES:
        raise FormatError(f"unsupported epoch file version {version}", offset=4)
    trials, channels, samples = int(header["trials"]), int(header["channels"]), int(header["samples"])
    class_count = int(header["class_count"])
    if trials == 0 or channels == 0 or samples == 0:
        raise FormatError("header declares an empty extent", offset=8)

    offset = HEADER.itemsize
    label_bytes = 2 * trials
    if len(buf) < offset + label_bytes:
        raise FormatError("truncated labels", offset=len(buf))
    labels = np.frombuffer(buf, dtype="<u2", count=trials, offset=offset).astype(np.int64)
    bad = np.flatnonzero(labels >= class_count)
    if bad.size:
        raise FormatError(f"label {labels[bad[0]]} out of range for {class_count} classes", offset=offset + 2 * int(bad[0]))
    offset += label_bytes

    dtype = PAYLOAD_DTYPES[version]
    count = trials * channels * samples
    end = offset + count * dtype.itemsize
    if len(buf) < end:
        raise FormatError("truncated payload", offset=len(buf))
    if len(buf) > end:
        raise FormatError("trailing bytes after payload", offset=end)
    data = np.frombuffer(buf, dtype=dtype, count=count, offset=offset).astype(dtype.type)
    try:
        return EpochSet(data=data.reshape(trials, channels, samples), labels=labels,
                        sample_rate=float(header["sample_rate"]), class_count=class_count)
    except ValueError as exc:
        raise FormatError(f"invalid header: {exc}", offset=4) from exc


def epochs_write(e: EpochSet, path: PathLike) -> Path:
    path = Path(path)
    buf = encode_epochs(e)
    try:
        path.write_bytes(buf)
    except OSError as exc:
        raise FileError(f"cannot write epoch file {path}: {exc.strerror or exc}") from exc
    logger.info("wrote %s (%s)", path, e.describe())
    return path


def epochs_read(path: PathLike) -> EpochSet:
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise FileError(f"cannot read epoch file {path}: {exc.strerror or exc}") from exc
    return decode_epochs(buf)


_LINE_RE = re.compile(r"line (\d+)")


def _read_cells(path: Path, what: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, skip_blank_lines=True)
    except FileNotFoundError as exc:
        raise FileError(f"{what} file {path} not found") from exc
    except pd.errors.EmptyDataError as exc:
        raise FormatError(f"{what} file {path} is empty", row=1) from exc
    except pd.errors.ParserError as exc:
        match = _LINE_RE.search(str(exc))
        raise FormatError(f"ragged row in {what} file {path}",
                          row=int(match.group(1)) if match else None) from exc
    except OSError as exc:
        raise FileError(f"cannot read {what} file {path}: {exc.strerror or exc}") from exc


def _numeric(cells: pd.DataFrame, path: Path, what: str) -> np.ndarray:
    missing = cells.isna().any(axis=1).to_numpy()
    if missing.any():
        row = int(np.flatnonzero(missing)[0]) + 1
        raise FormatError(f"ragged row in {what} file {path}: expected {cells.shape[1]} values", row=row)
    values = cells.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    bad = values.isna().any(axis=1).to_numpy() | ~np.isfinite(values.to_numpy(dtype=np.float64)).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise FormatError(f"non-numeric cell in {what} file {path}", row=row)
    return values.to_numpy(dtype=np.float64)


def csv_import(data_path: PathLike, labels_path: PathLike, channels: int, sample_rate: float,
               class_count: Optional[int] = None) -> EpochSet:
    """Build an EpochSet from a data CSV (trials*channels rows x samples columns) and a labels file.

    Rows are grouped trial by trial: rows ``t*channels .. t*channels + channels - 1``
    hold trial ``t``. ``class_count`` defaults to ``max(label) + 1`` (at least 2).
    """
    if channels < 1:
        raise ParameterError(f"channels must be >= 1, got {channels}")
    data_path, labels_path = Path(data_path), Path(labels_path)
    values = _numeric(_read_cells(data_path, "data"), data_path, "data")
    if values.shape[0] % channels:
        raise FormatError(f"{values.shape[0]} data rows is not a multiple of {channels} channels",
                          row=values.shape[0])
    trials = values.shape[0] // channels

    label_values = _numeric(_read_cells(labels_path, "labels"), labels_path, "labels")
    if label_values.shape[1] != 1:
        raise FormatError(f"labels file {labels_path} must hold one integer per row", row=1)
    labels = label_values[:, 0]
    not_int = np.flatnonzero((labels != np.round(labels)) | (labels < 0))
    if not_int.size:
        raise FormatError(f"label is not a non-negative integer in {labels_path}", row=int(not_int[0]) + 1)
    if len(labels) != trials:
        raise FormatError(f"label/trial count mismatch: {len(labels)} labels for {trials} trials",
                          row=min(len(labels), trials) + 1)
    labels = labels.astype(np.int64)
    classes = class_count if class_count is not None else max(2, int(labels.max()) + 1)
    try:
        return EpochSet(data=values.reshape(trials, channels, values.shape[1]), labels=labels,
                        sample_rate=sample_rate, class_count=classes)
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
