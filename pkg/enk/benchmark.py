"""Wall-clock comparison of the convolution paths at the dataset preset shapes"""

import logging
import time
from typing import Callable, Dict, Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel

from .errors import NumericalCheckError
from .ops.conv import EnkConvParams, conv2d_forward, enk_forward_decomposed, enk_forward_naive
from .ops.lowering import conv2d_forward_lowered
from .presets import DatasetPreset

logger = logging.getLogger(__name__)

IMPLS: Dict[str, Callable[[np.ndarray, EnkConvParams], np.ndarray]] = {
    "enk-naive": enk_forward_naive,
    "enk-decomposed": enk_forward_decomposed,
    "conv": conv2d_forward,
    "conv-im2col": conv2d_forward_lowered,
}
AGREEMENT = {np.dtype(np.float64): 1e-10, np.dtype(np.float32): 1e-4}


class BenchmarkRow(BaseModel):
    preset: str
    channels: int
    samples: int
    filters: int
    kh: int
    kw: int
    impl: str
    repeats: int
    median_seconds: float


def max_relative_gap(reference: np.ndarray, other: np.ndarray) -> float:
    return float(np.max(np.abs(reference - other) / (1.0 + np.abs(reference))))


def random_problem(channels: int, samples: int, filters: int, kernel: Tuple[int, int], b: float,
                   rng: np.random.Generator, dtype=np.float64) -> Tuple[np.ndarray, EnkConvParams]:
    """A ``[1, channels, samples]`` trial and a single-input-plane kernel."""
    kh, kw = kernel
    x = rng.standard_normal((1, channels, samples)).astype(dtype)
    params = EnkConvParams(kernel=rng.standard_normal((filters, 1, kh, kw)).astype(dtype),
                           bias=rng.standard_normal(filters).astype(dtype), b=b)
    return x, params


def median_time(fn: Callable[[], object], repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def check_agreement(x: np.ndarray, params: EnkConvParams, label: str) -> float:
    """Naive vs decomposed EnK; raises when they disagree beyond the dtype's tolerance."""
    gap = max_relative_gap(enk_forward_naive(x, params), enk_forward_decomposed(x, params))
    tolerance = AGREEMENT[x.dtype]
    if gap >= tolerance:
        raise NumericalCheckError(f"{label}: naive and decomposed EnK differ by {gap:.3e} (tolerance {tolerance:.0e})")
    return gap


def run_benchmark(presets: Iterable[DatasetPreset], repeats: int = 9, filters: int = 8,
                  kernel: Tuple[int, int] = (3, 7), b: float = 0.3, seed: int = 0,
                  dtype=np.float64) -> List[BenchmarkRow]:
    rng = np.random.default_rng(seed)
    rows: List[BenchmarkRow] = []
    for preset in presets:
        x, params = random_problem(preset.channels, preset.samples, filters, kernel, b, rng, dtype)
        check_agreement(x, params, preset.name)
        for impl, fn in IMPLS.items():
            seconds = median_time(lambda: fn(x, params), repeats)
            logger.info("%s %s: median %.6f s over %d runs", preset.name, impl, seconds, repeats)
            rows.append(BenchmarkRow(preset=preset.name, channels=preset.channels, samples=preset.samples,
                                     filters=filters, kh=kernel[0], kw=kernel[1], impl=impl, repeats=repeats,
                                     median_seconds=seconds))
    return rows
