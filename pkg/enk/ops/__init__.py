"""Convolution operators: standard, EnK and the Gaussian-noise control"""

from .conv import (
    ConvDims,
    ConvGrads,
    EnkConvParams,
    conv2d_backward,
    conv2d_forward,
    conv_dims,
    enk_backward,
    enk_forward_decomposed,
    enk_forward_naive,
    make_params,
    window_sum,
)
from .lowering import conv2d_forward_lowered
from .noise import gaussian_noise_backward, gaussian_noise_forward

__all__ = [
    "ConvDims",
    "ConvGrads",
    "EnkConvParams",
    "conv2d_backward",
    "conv2d_forward",
    "conv2d_forward_lowered",
    "conv_dims",
    "enk_backward",
    "enk_forward_decomposed",
    "enk_forward_naive",
    "gaussian_noise_backward",
    "gaussian_noise_forward",
    "make_params",
    "window_sum",
]
