import numpy as np
import pytest

from enk.errors import NonFiniteError, ShapeError
from enk.tensor import Shape2D, as_tensor, resolve_dtype, tensor_add, tensor_new, tensor_reduce_sum, tensor_scale


def test_tensor_new_fill():
    np.testing.assert_array_equal(tensor_new([2, 2]), [[0.0, 0.0], [0.0, 0.0]])
    np.testing.assert_array_equal(tensor_new([1], fill=3.5), [3.5])
    assert tensor_new([3]).dtype == np.float64


def test_tensor_new_rejects_empty_extent():
    with pytest.raises(ShapeError):
        tensor_new([2, 0])
    with pytest.raises(ShapeError):
        tensor_new([-1])


def test_tensor_new_float32_opt_in():
    assert tensor_new([2], dtype="float32").dtype == np.float32
    with pytest.raises(ShapeError):
        resolve_dtype(np.int32)


def test_tensor_add():
    a = as_tensor([[1, 2]])
    np.testing.assert_array_equal(tensor_add(a, as_tensor([[3, 4]])), [[4, 6]])
    np.testing.assert_array_equal(tensor_add(a, np.zeros_like(a)), a)
    with pytest.raises(ShapeError):
        tensor_add(as_tensor([[1]]), as_tensor([[1, 2]]))


def test_tensor_add_commutes(rng):
    a, b = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
    np.testing.assert_array_equal(tensor_add(a, b), tensor_add(b, a))


def test_tensor_scale():
    a = as_tensor([[1, 2]])
    np.testing.assert_array_equal(tensor_scale(a, 0.5), [[0.5, 1.0]])
    np.testing.assert_array_equal(tensor_scale(a, 1), a)
    np.testing.assert_array_equal(tensor_scale(a, 0), [[0.0, 0.0]])


def test_tensor_scale_composes(rng):
    a = rng.standard_normal((5, 5))
    np.testing.assert_allclose(tensor_scale(tensor_scale(a, 0.3), 7.0), tensor_scale(a, 2.1), rtol=1e-12)


def test_tensor_scale_does_not_mutate():
    a = as_tensor([1.0, 2.0])
    tensor_scale(a, 3.0)
    np.testing.assert_array_equal(a, [1.0, 2.0])


def test_reduce_sum():
    assert tensor_reduce_sum(as_tensor([[1, 2], [3, 4]])) == 10.0
    assert tensor_reduce_sum(tensor_new([4, 4])) == 0.0
    assert tensor_reduce_sum(as_tensor([-1, 1])) == 0.0


def test_reduce_sum_accumulates_in_double():
    a = np.full(10_000_000 // 1000, 0.1, dtype=np.float32)
    assert tensor_reduce_sum(a) == pytest.approx(float(np.sum(a.astype(np.float64))), rel=1e-12)


def test_non_finite_is_rejected():
    with pytest.raises(NonFiniteError):
        as_tensor([1.0, np.nan])
    with pytest.raises(NonFiniteError):
        tensor_scale(as_tensor([1e308]), 10.0)


def test_shape2d_takes_the_trailing_extents():
    assert Shape2D.of((1, 4, 64)) == Shape2D(rows=4, cols=64)
    assert Shape2D.of([3, 7]) == Shape2D(rows=3, cols=7)


@pytest.mark.parametrize("shape", [(5,), (1, 0, 64), (4, 0)])
def test_shape2d_rejects_degenerate_shapes(shape):
    with pytest.raises(ShapeError):
        Shape2D.of(shape)
