"""Layers, model graph, loss, optimizer, training loop and checkpoints"""

from .checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from .graph import ModelGraph, graph_forward, param_count
from .layers import (
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
    ReluLayer,
    SoftmaxLayer,
    SquareLayer,
)
from .loss import cross_entropy_loss, softmax
from .optim import AdamState, adam_step
from .training import Batch, EpochMetrics, EpochRecord, evaluate, fit, predict_scores, train_epoch

__all__ = [
    "AdamState",
    "AvgPoolLayer",
    "Batch",
    "ConvLayer",
    "DenseLayer",
    "EluLayer",
    "EnkConvLayer",
    "EpochMetrics",
    "EpochRecord",
    "FlattenLayer",
    "GaussianNoiseLayer",
    "Layer",
    "LogLayer",
    "MaxPoolLayer",
    "ModelGraph",
    "ReluLayer",
    "SoftmaxLayer",
    "SquareLayer",
    "adam_step",
    "cross_entropy_loss",
    "decode_checkpoint",
    "encode_checkpoint",
    "evaluate",
    "fit",
    "graph_forward",
    "load_checkpoint",
    "param_count",
    "predict_scores",
    "save_checkpoint",
    "softmax",
    "train_epoch",
]
