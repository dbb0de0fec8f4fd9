"""Gaussian-noise control transform (the layer EnK is compared against)."""

import numpy as np

from ..errors import ParameterError
from ..tensor import Tensor


def gaussian_noise_forward(x: Tensor, sigma: float, training: bool, rng: np.random.Generator) -> Tensor:
    """``x + N(0, sigma^2)`` in training mode, ``x`` unchanged otherwise."""
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    if not training or sigma == 0:
        return x.copy()
    return x + rng.normal(0.0, sigma, size=x.shape).astype(x.dtype, copy=False)


def gaussian_noise_backward(d_out: Tensor) -> Tensor:
    return d_out
