"""Shared fixtures"""

import numpy as np
import pytest

from enk.config.settings import Settings, get_settings
from enk.nn import EnkConvLayer, FlattenLayer, ModelGraph, encode_checkpoint
from enk.ops import make_params

# x=[[1,2,3],[4,5,6]] with a diagonal 2x2 kernel, the hand-checked example used across the suite
RUNNING_X = np.array([[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]])
RUNNING_KERNEL = [[1.0, 0.0], [0.0, 1.0]]


@pytest.fixture
def enk_checkpoint() -> bytes:
    """Checkpoint of a single EnK layer followed by flatten; its int config sits at bytes 27..34."""
    kernel = np.array([[[[1.0, 0.0], [0.0, 1.0]]]])
    graph = ModelGraph([EnkConvLayer(kernel, np.zeros(1), b=0.25), FlattenLayer()], input_shape=(1, 2, 3))
    return encode_checkpoint(graph)


@pytest.fixture
def running_x() -> np.ndarray:
    return RUNNING_X.copy()


@pytest.fixture
def running_params():
    def make(b: float = 0.0):
        return make_params(RUNNING_KERNEL, b=b)

    return make


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def settings(tmp_path, monkeypatch) -> Settings:
    """Settings isolated from the developer's environment and .env."""
    for name in ("ENK_THREADS", "ENK_DTYPE", "ENK_EPOCH_CAP", "ENK_OUTPUT_DIR", "ENK_LOG_LEVEL", "ENK_LOG_FILE"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield Settings(output_dir=str(tmp_path))
    get_settings.cache_clear()
