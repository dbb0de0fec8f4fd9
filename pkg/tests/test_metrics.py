import numpy as np
import pandas as pd
import pytest
from sklearn.metrics import accuracy_score, confusion_matrix, f1_score

from enk.errors import FileError, ParameterError
from enk.metrics import (
    ConfusionMatrix,
    MetricsRow,
    accuracy,
    confusion,
    f1_class1,
    f1_per_class,
    f1_weighted,
    metrics_row,
    write_csv,
)


def matrix(counts) -> ConfusionMatrix:
    return ConfusionMatrix(counts=np.array(counts))


def brute_force(labels, predictions, class_count):
    """Pairwise counting without a confusion matrix."""
    pairs = list(zip(labels, predictions))
    acc = sum(t == p for t, p in pairs) / len(pairs)
    weighted = 0.0
    for k in range(class_count):
        tp = sum(t == k and p == k for t, p in pairs)
        fp = sum(t != k and p == k for t, p in pairs)
        fn = sum(t == k and p != k for t, p in pairs)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        weighted += f1 * (tp + fn)
    return acc, weighted / len(pairs)


class TestConfusion:
    def test_perfect_is_diagonal(self):
        cm = confusion([0, 1, 2, 1], [0, 1, 2, 1], 3)
        np.testing.assert_array_equal(cm.counts, np.diag([1, 2, 1]))

    def test_single_predicted_class(self):
        cm = confusion([0, 1, 1, 0], [0, 0, 0, 0], 2)
        np.testing.assert_array_equal(cm.counts, [[2, 0], [2, 0]])

    def test_empty(self):
        cm = confusion([], [], 2)
        assert cm.total == 0
        np.testing.assert_array_equal(cm.counts, np.zeros((2, 2)))

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            confusion([0, 1], [0], 2)
        with pytest.raises(ParameterError):
            confusion([0, 3], [0, 1], 2)

    def test_matches_sklearn(self, rng):
        labels, predictions = rng.integers(0, 4, 300), rng.integers(0, 4, 300)
        np.testing.assert_array_equal(confusion(labels, predictions, 4).counts,
                                      confusion_matrix(labels, predictions, labels=range(4)))


class TestScores:
    def test_accuracy(self):
        assert accuracy(matrix(np.eye(3, dtype=int))) == 1.0
        assert accuracy(matrix([[1, 1], [1, 1]])) == 0.5
        assert accuracy(matrix([[3, 1], [2, 4]])) == pytest.approx(0.7)

    def test_empty_matrix(self):
        with pytest.raises(ParameterError):
            accuracy(confusion([], [], 2))
        with pytest.raises(ParameterError):
            f1_weighted(confusion([], [], 2))

    def test_hand_case(self):
        cm = confusion([0, 0, 1, 1], [0, 0, 1, 0], 2)
        np.testing.assert_allclose(f1_per_class(cm), [0.8, 2.0 / 3.0])
        assert f1_weighted(cm) == pytest.approx(0.7333, abs=1e-4)
        assert f1_class1(cm) == pytest.approx(2.0 / 3.0)

    def test_perfect_and_all_wrong(self):
        assert f1_weighted(confusion([0, 1, 1], [0, 1, 1], 2)) == 1.0
        assert f1_weighted(confusion([0, 1, 1], [1, 0, 0], 2)) == 0.0

    def test_zero_division_convention(self):
        cm = confusion([0, 0, 1], [0, 0, 0], 2)
        assert f1_per_class(cm)[1] == 0.0

    def test_f1_class1_is_binary_only(self):
        with pytest.raises(ParameterError):
            f1_class1(confusion([0, 1, 2], [0, 1, 2], 3))

    def test_against_counting_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            k = int(rng.integers(2, 5))
            n = int(rng.integers(1, 30))
            labels, predictions = rng.integers(0, k, n), rng.integers(0, k, n)
            cm = confusion(labels, predictions, k)
            acc, weighted = brute_force(labels.tolist(), predictions.tolist(), k)
            assert abs(accuracy(cm) - acc) <= 1e-12
            assert abs(f1_weighted(cm) - weighted) <= 1e-12

    def test_against_sklearn(self, rng):
        labels, predictions = rng.integers(0, 3, 500), rng.integers(0, 3, 500)
        cm = confusion(labels, predictions, 3)
        assert accuracy(cm) == pytest.approx(accuracy_score(labels, predictions), abs=1e-12)
        expected = f1_score(labels, predictions, labels=[0, 1, 2], average="weighted", zero_division=0)
        assert f1_weighted(cm) == pytest.approx(expected, abs=1e-12)

    def test_permuting_classes(self, rng):
        labels, predictions = rng.integers(0, 3, 200), rng.integers(0, 3, 200)
        perm = np.array([2, 0, 1])
        a, b = confusion(labels, predictions, 3), confusion(perm[labels], perm[predictions], 3)
        assert accuracy(a) == accuracy(b)
        assert f1_weighted(a) == pytest.approx(f1_weighted(b), abs=1e-15)

    def test_bounds(self, rng):
        for _ in range(50):
            cm = confusion(rng.integers(0, 3, 20), rng.integers(0, 3, 20), 3)
            assert 0.0 <= f1_weighted(cm) <= 1.0


class TestCsv:
    def test_metrics_row(self, tmp_path):
        row = metrics_row(confusion([0, 0, 1, 1], [0, 0, 1, 0], 2), run_id="r1", dataset="latency",
                          family="compact-toy", variant="enk", seed=0, epochs_run=3, param_count=101)
        path = write_csv([row], tmp_path / "m.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(MetricsRow.model_fields)
        assert lines[1] == "r1,latency,compact-toy,enk,0,0.75,0.733333333,0.666666667,3,101"

    def test_multiclass_leaves_f1_class1_empty(self, tmp_path):
        row = metrics_row(confusion([0, 1, 2], [0, 1, 2], 3), run_id="r", dataset="d", family="deep-toy",
                          variant="org", seed=1, epochs_run=1, param_count=9)
        assert row.f1_class1 is None
        frame = pd.read_csv(write_csv([row], tmp_path / "m.csv"))
        assert pd.isna(frame.loc[0, "f1_class1"])

    def test_unwritable(self, tmp_path):
        with pytest.raises(FileError):
            write_csv([{"a": 1}], tmp_path / "missing" / "m.csv")
