import numpy as np

from enk.nn.gradcheck import (
    check_enk_gradients,
    relative_error,
    run_conv_suite,
    run_graph_suite,
)
from enk.ops import EnkConvParams, enk_backward


def test_conv_suite_passes():
    results = run_conv_suite(seed=0, instances=20, tolerance=1e-5)
    assert {r.group for r in results} == {"d_input", "d_kernel", "d_b", "d_bias"}
    assert len(results) == 80
    worst = max(results, key=lambda r: r.max_rel_error)
    assert worst.passed, worst


def test_graph_suite_passes():
    results = run_graph_suite(seed=0, tolerance=1e-4)
    suites = {r.suite for r in results}
    assert len(suites) == 9
    assert any(r.group.endswith(".b") for r in results)
    failed = [r for r in results if not r.passed]
    assert not failed, failed


def test_d_b_checked_at_b_zero(rng):
    x = rng.standard_normal((2, 4, 6))
    params = EnkConvParams(kernel=rng.standard_normal((2, 2, 2, 3)), bias=np.zeros(2), b=0.0)
    results = {r.group: r for r in check_enk_gradients(x, params, rng)}
    assert results["d_b"].passed


def test_perturbed_d_b_is_reported(rng):
    def broken_backward(x, params, d_out):
        grads = enk_backward(x, params, d_out)
        return grads.model_copy(update={"d_b": grads.d_b * 1.1})

    results = run_conv_suite(seed=1, instances=5, backward=broken_backward)
    failing = {r.group for r in results if not r.passed}
    assert "d_b" in failing
    assert "d_kernel" not in failing


def test_relative_error_scale():
    assert relative_error(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0
    assert relative_error(np.array([0.0]), np.array([0.0])) == 0.0
    assert relative_error(np.array([1.0, 10.0]), np.array([1.0, 9.0])) == 0.1
