import numpy as np
import pandas as pd
import pytest
from PIL import Image

from enk.errors import ParameterError
from enk.gradcam import (
    OVERLAY_DIV_ID,
    grad_cam,
    heatmap_diff,
    heatmap_export,
    heatmap_filename,
    heatmap_overlay_html,
    normalize,
    upsample_nearest,
)
from enk.models import ModelSpec, build_model
from enk.nn import ConvLayer, DenseLayer, FlattenLayer, ModelGraph


def linear_graph(weight_scale: float = 1.0, kernel: float = 2.0) -> ModelGraph:
    """1x1 conv then a dense layer; class 0 scores ``weight_scale * sum(A)``."""
    conv = ConvLayer(np.full((1, 1, 1, 1), kernel), np.zeros(1))
    weight = np.zeros((10, 2))
    weight[:, 0] = weight_scale
    return ModelGraph([conv, FlattenLayer(), DenseLayer(weight, np.zeros(2))], input_shape=(1, 2, 5))


@pytest.fixture
def trial(rng):
    return rng.standard_normal((1, 2, 5))


def test_zero_gradient_gives_zero_map(trial):
    h = grad_cam(linear_graph(), trial, class_idx=1)
    assert not h.values.any()
    assert h.max_value == 0.0


def test_single_map_is_rectified_activation(trial):
    h = grad_cam(linear_graph(), trial, class_idx=0)
    expected = np.maximum(2.0 * trial[0], 0.0)
    np.testing.assert_allclose(h.values, expected / expected.max())
    assert h.values.shape == (2, 5)
    assert h.layer_index == 0 and h.class_index == 0


def test_score_scaling_leaves_map_unchanged(trial):
    a = grad_cam(linear_graph(1.0), trial, 0)
    b = grad_cam(linear_graph(7.5), trial, 0)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-12)


@pytest.mark.parametrize("family", ["compact-toy", "shallow-toy", "deep-toy"])
def test_normalized_and_non_negative(family, rng):
    g = build_model(ModelSpec(family=family, channels=4, samples=64, class_count=2, variant="enk",
                              enk_b_init=0.05, init_seed=1)).eval()
    for _ in range(3):
        h = grad_cam(g, rng.standard_normal(g.input_shape), class_idx=1)
        assert h.values.shape == (4, 64)
        assert h.values.min() >= 0.0
        assert h.values.max() == pytest.approx(1.0) or not h.values.any()


def test_explicit_enk_layer(rng):
    g = build_model(ModelSpec(family="compact-toy", channels=3, samples=32, class_count=2, variant="enk"))
    h = grad_cam(g, rng.standard_normal(g.input_shape), class_idx=0, layer_idx=1)
    assert h.layer_index == 1


def test_rejects_bad_targets(trial):
    g = linear_graph()
    with pytest.raises(ParameterError):
        grad_cam(g, trial, class_idx=0, layer_idx=1)
    with pytest.raises(ParameterError):
        grad_cam(g, trial, class_idx=2)


def test_upsample_nearest():
    cam = np.array([[1.0, 2.0]])
    np.testing.assert_array_equal(upsample_nearest(cam, 2, 4), [[1, 1, 2, 2], [1, 1, 2, 2]])


def test_diff():
    a = normalize(np.array([[1.0, 0.0], [0.5, 0.25]]), 0, 0)
    b = normalize(np.array([[0.0, 1.0], [0.5, 0.5]]), 0, 0)
    assert not heatmap_diff(a, a).values.any()
    np.testing.assert_array_equal(heatmap_diff(a, b).values, heatmap_diff(b, a).values)
    assert heatmap_diff(a, b).values.max() == 1.0
    with pytest.raises(ParameterError):
        heatmap_diff(a, normalize(np.ones((3, 2)), 0, 0))


class TestExport:
    def test_csv_round_trip(self, trial, tmp_path):
        h = grad_cam(linear_graph(), trial, 0)
        path = heatmap_export(h, tmp_path / "map.csv", "csv")
        restored = pd.read_csv(path, header=None).to_numpy()
        np.testing.assert_allclose(restored, h.values, atol=1e-6)

    def test_zero_map(self, tmp_path):
        h = normalize(np.zeros((2, 3)), 0, 0)
        csv = heatmap_export(h, tmp_path / "zero.csv", "csv")
        assert not pd.read_csv(csv, header=None).to_numpy().any()
        pgm = heatmap_export(h, tmp_path / "zero.pgm", "pgm").read_bytes()
        assert pgm[-6:] == bytes(6)

    def test_pgm_header(self, tmp_path):
        h = normalize(np.array([[0.0, 0.5, 1.0], [1.0, 0.25, 0.0]]), 0, 0)
        buf = heatmap_export(h, tmp_path / "map.pgm", "pgm").read_bytes()
        assert buf.startswith(b"P5 3 2 255\n")
        assert list(buf[len(b"P5 3 2 255\n"):]) == [0, 128, 255, 255, 64, 0]

    def test_pgm_reads_back(self, tmp_path):
        values = np.array([[0.0, 0.5, 1.0], [1.0, 0.25, 0.0]])
        path = heatmap_export(normalize(values, 0, 0), tmp_path / "map.pgm", "pgm")
        with Image.open(path) as image:
            assert image.mode == "L"
            assert image.size == (3, 2)
            np.testing.assert_array_equal(np.asarray(image), [[0, 128, 255], [255, 64, 0]])

    def test_overlay_html(self, trial, tmp_path):
        h = grad_cam(linear_graph(), trial, 0)
        path = heatmap_overlay_html(h, trial[0], tmp_path / "overlay.html", title="t")
        assert f'id="{OVERLAY_DIV_ID}"' in path.read_text()

    def test_filename(self):
        assert heatmap_filename("run", "enk", 3, 1, "pgm") == "run_enk_trial3_class1.pgm"
