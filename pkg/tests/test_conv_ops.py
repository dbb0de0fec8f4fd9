import numpy as np
import pytest

from enk.errors import DimsError, ParameterError
from enk.ops import (
    EnkConvParams,
    conv2d_backward,
    conv2d_forward,
    conv2d_forward_lowered,
    conv_dims,
    enk_backward,
    enk_forward_decomposed,
    enk_forward_naive,
    gaussian_noise_backward,
    gaussian_noise_forward,
    make_params,
    window_sum,
)
from enk.presets import PRESETS


def random_params(rng, filters, channels, kh, kw, b=0.0):
    return EnkConvParams(kernel=rng.standard_normal((filters, channels, kh, kw)),
                         bias=rng.standard_normal(filters), b=b)


def sweep(rng, count=100):
    """Random instances; the first four take the dataset preset shapes."""
    for preset in PRESETS.values():
        x = rng.standard_normal((1, preset.channels, preset.samples))
        yield x, random_params(rng, 4, 1, 3, 7, b=float(rng.uniform(-1, 1)))
    for _ in range(count - len(PRESETS)):
        c, h, w = int(rng.integers(1, 5)), int(rng.integers(2, 10)), int(rng.integers(3, 40))
        kh, kw = int(rng.integers(1, h + 1)), int(rng.integers(1, min(w, 8) + 1))
        x = rng.standard_normal((c, h, w))
        yield x, random_params(rng, int(rng.integers(1, 4)), c, kh, kw, b=float(rng.uniform(-1, 1)))


class TestRunningExample:
    def test_conv_forward(self, running_x, running_params):
        np.testing.assert_array_equal(conv2d_forward(running_x, running_params()), [[[6.0, 8.0]]])

    def test_single_element(self):
        x = np.array([[[2.0]]])
        np.testing.assert_array_equal(conv2d_forward(x, make_params([[3.0]])), [[[6.0]]])
        np.testing.assert_array_equal(enk_forward_naive(x, make_params([[3.0]], b=1.0)), [[[8.0]]])

    def test_zero_kernel(self, rng):
        x = rng.standard_normal((2, 4, 5))
        params = EnkConvParams(kernel=np.zeros((3, 2, 2, 2)), bias=np.zeros(3))
        np.testing.assert_array_equal(conv2d_forward(x, params), np.zeros((3, 3, 4)))

    def test_window_sum(self, running_x):
        np.testing.assert_array_equal(window_sum(running_x, 2, 2), [[12.0, 16.0]])
        np.testing.assert_array_equal(window_sum(running_x, 1, 1), running_x[0])
        np.testing.assert_array_equal(window_sum(np.ones((1, 2, 2)), 2, 2), [[4.0]])

    def test_enk_forward(self, running_x, running_params):
        np.testing.assert_array_equal(enk_forward_naive(running_x, running_params(0.5)), [[[12.0, 24.0]]])
        np.testing.assert_array_equal(enk_forward_decomposed(running_x, running_params(0.5)), [[[12.0, 24.0]]])
        np.testing.assert_array_equal(enk_forward_naive(running_x, running_params(0.0)), [[[6.0, 8.0]]])

    def test_enk_backward(self, running_x, running_params):
        grads = enk_backward(running_x, running_params(0.5), np.array([[[1.0, 1.0]]]))
        assert grads.d_b == pytest.approx(44.0)
        np.testing.assert_array_equal(grads.d_kernel[0, 0], [[3.0, 5.0], [9.0, 11.0]])
        np.testing.assert_array_equal(grads.d_bias, [2.0])

    def test_conv_backward(self, running_x, running_params):
        grads = conv2d_backward(running_x, running_params(), np.array([[[1.0, 1.0]]]))
        np.testing.assert_array_equal(grads.d_kernel[0, 0], [[3.0, 5.0], [9.0, 11.0]])
        assert grads.d_b == 0.0

    def test_rightmost_column_untouched_by_first_window(self, running_x, running_params):
        grads = conv2d_backward(running_x, running_params(), np.array([[[1.0, 0.0]]]))
        np.testing.assert_array_equal(grads.d_input[0, :, 2], [0.0, 0.0])

    def test_zero_upstream_gives_zero_gradients(self, running_x, running_params):
        grads = enk_backward(running_x, running_params(0.5), np.zeros((1, 1, 2)))
        assert grads.d_b == 0.0
        assert not grads.d_input.any() and not grads.d_kernel.any() and not grads.d_bias.any()


class TestProperties:
    def test_b_zero_reduces_to_conv_exactly(self, rng):
        for x, params in sweep(rng):
            params = params.model_copy(update={"b": 0.0})
            assert np.max(np.abs(enk_forward_naive(x, params) - conv2d_forward(x, params))) == 0.0

    def test_decomposed_matches_naive(self, rng):
        for x, params in sweep(rng):
            naive = enk_forward_naive(x, params)
            fast = enk_forward_decomposed(x, params)
            assert np.max(np.abs(naive - fast) / (1.0 + np.abs(naive))) < 1e-10

    def test_benchmark_shape_equivalence(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 64, 128))
        params = random_params(rng, 8, 4, 3, 7, b=0.3)
        naive = enk_forward_naive(x, params)
        assert np.max(np.abs(naive - enk_forward_decomposed(x, params)) / (1.0 + np.abs(naive))) < 1e-10

    def test_linear_in_b(self, rng):
        x = rng.standard_normal((2, 5, 16))
        params = random_params(rng, 3, 2, 2, 4)
        y0 = enk_forward_naive(x, params.model_copy(update={"b": 0.0}))
        y1 = enk_forward_naive(x, params.model_copy(update={"b": 0.25}))
        y2 = enk_forward_naive(x, params.model_copy(update={"b": 0.5}))
        scale = 1.0 + np.max(np.abs(y2))
        np.testing.assert_allclose(y2 - y0, 2.0 * (y1 - y0), rtol=0, atol=1e-12 * scale)

    def test_offset_is_constant_down_the_rows(self, rng):
        x = rng.standard_normal((2, 6, 10))
        params = random_params(rng, 2, 2, 3, 4, b=0.7)
        full = enk_forward_naive(x, params)
        for p in range(full.shape[1]):
            row = enk_forward_naive(x[:, p:p + 3, :], params)
            np.testing.assert_allclose(row[:, 0], full[:, p], rtol=0, atol=1e-12)

    def test_first_column_differs_when_b_nonzero(self, running_x, running_params):
        y = enk_forward_naive(running_x, running_params(0.5))
        assert y[0, 0, 0] != conv2d_forward(running_x, running_params())[0, 0, 0]

    def test_backward_b_zero_matches_conv_backward(self, rng):
        x = rng.standard_normal((2, 4, 9))
        params = random_params(rng, 3, 2, 2, 3)
        d_out = rng.standard_normal((3, 3, 7))
        enk, conv = enk_backward(x, params, d_out), conv2d_backward(x, params, d_out)
        np.testing.assert_array_equal(enk.d_input, conv.d_input)
        np.testing.assert_array_equal(enk.d_kernel, conv.d_kernel)
        np.testing.assert_array_equal(enk.d_bias, conv.d_bias)

    def test_batched_input_matches_single(self, rng):
        x = rng.standard_normal((3, 2, 4, 9))
        params = random_params(rng, 2, 2, 2, 3, b=0.2)
        batched = enk_forward_decomposed(x, params)
        for n in range(3):
            np.testing.assert_allclose(batched[n], enk_forward_decomposed(x[n], params), rtol=1e-12)

    def test_lowered_conv_matches(self, rng):
        x = rng.standard_normal((3, 8, 30))
        params = random_params(rng, 5, 3, 3, 7)
        np.testing.assert_allclose(conv2d_forward_lowered(x, params), conv2d_forward(x, params), rtol=1e-10, atol=1e-12)


class TestErrors:
    def test_kernel_larger_than_input(self):
        with pytest.raises(DimsError):
            conv2d_forward(np.ones((1, 2, 2)), make_params(np.ones((3, 3))))
        with pytest.raises(DimsError):
            conv_dims(2, 2, 1, 3)

    def test_channel_mismatch(self, rng):
        params = random_params(rng, 1, 2, 1, 1)
        with pytest.raises(DimsError):
            enk_forward_naive(np.ones((3, 4, 4)), params)

    def test_d_out_shape_mismatch(self, running_x, running_params):
        with pytest.raises(DimsError):
            enk_backward(running_x, running_params(0.5), np.ones((1, 1, 3)))

    def test_bad_bias(self):
        with pytest.raises(ParameterError):
            make_params(np.ones((2, 2)), bias=[0.0, 1.0])


class TestGaussianNoise:
    def test_identity_cases(self, rng):
        x = rng.standard_normal((4, 4))
        np.testing.assert_array_equal(gaussian_noise_forward(x, 0.0, True, rng), x)
        np.testing.assert_array_equal(gaussian_noise_forward(x, 0.5, False, rng), x)

    def test_noise_statistics(self):
        x = np.zeros(100_000)
        out = gaussian_noise_forward(x, 0.1, True, np.random.default_rng(7))
        assert abs(out.mean()) < 0.002
        assert abs(out.std() - 0.1) < 0.005

    def test_seeded(self):
        x = np.zeros(10)
        a = gaussian_noise_forward(x, 0.1, True, np.random.default_rng(3))
        b = gaussian_noise_forward(x, 0.1, True, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)

    def test_negative_sigma(self, rng):
        with pytest.raises(ParameterError):
            gaussian_noise_forward(np.zeros(2), -0.1, True, rng)

    def test_backward_passes_through(self):
        d = np.arange(4.0)
        np.testing.assert_array_equal(gaussian_noise_backward(d), d)
