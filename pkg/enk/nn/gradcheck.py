"""Central finite-difference checks for the conv operators and whole graphs.

Errors are reported per parameter group as ``max|analytic - numeric|`` divided
by the largest magnitude in either gradient, which stays meaningful when
individual entries are near zero.
"""

import logging
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from ..ops.conv import ConvGrads, EnkConvParams, enk_backward, enk_forward_naive
from .graph import ModelGraph
from .loss import cross_entropy_loss

logger = logging.getLogger(__name__)

STEP = 1e-5


class GroupResult(BaseModel):
    suite: str
    group: str
    max_rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


class GradcheckReport(BaseModel):
    results: List[GroupResult] = []

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def worst(self) -> Dict[str, float]:
        worst: Dict[str, float] = {}
        for r in self.results:
            worst[r.group] = max(worst.get(r.group, 0.0), r.max_rel_error)
        return worst


def numeric_gradient(f: Callable[[], float], array: np.ndarray, step: float = STEP) -> np.ndarray:
    """Central difference of the scalar ``f()`` w.r.t. every element of ``array`` (perturbed in place)."""
    grad = np.zeros(array.shape, dtype=np.float64)
    flat = array.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        plus = f()
        flat[i] = original - step
        minus = f()
        flat[i] = original
        grad.flat[i] = (plus - minus) / (2.0 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(float(np.max(np.abs(analytic))), float(np.max(np.abs(numeric))), 1e-12)
    return float(np.max(np.abs(analytic - numeric))) / scale


Backward = Callable[[np.ndarray, EnkConvParams, np.ndarray], ConvGrads]


def check_enk_gradients(x: np.ndarray, params: EnkConvParams, rng: np.random.Generator,
                        tolerance: float = 1e-5, backward: Backward = enk_backward) -> List[GroupResult]:
    """Compare ``backward`` against finite differences of ``sum(Y * R)`` for a fixed random R."""
    weights = rng.standard_normal(enk_forward_naive(x, params).shape)
    kernel, bias = params.kernel.copy(), params.bias.copy()
    b_holder = np.array([params.b])
    x = x.copy()

    def loss() -> float:
        current = EnkConvParams(kernel=kernel, bias=bias, b=float(b_holder[0]))
        return float(np.sum(enk_forward_naive(x, current) * weights))

    analytic = backward(x, EnkConvParams(kernel=kernel, bias=bias, b=params.b), weights)
    pairs = {
        "d_input": (analytic.d_input, numeric_gradient(loss, x)),
        "d_kernel": (analytic.d_kernel, numeric_gradient(loss, kernel)),
        "d_b": (np.array([analytic.d_b]), numeric_gradient(loss, b_holder)),
        "d_bias": (analytic.d_bias, numeric_gradient(loss, bias)),
    }
    return [GroupResult(suite="conv-ops", group=name, max_rel_error=relative_error(a, n), tolerance=tolerance)
            for name, (a, n) in pairs.items()]


def check_graph_gradients(graph: ModelGraph, x: np.ndarray, y: np.ndarray, suite: str,
                          tolerance: float = 1e-4) -> List[GroupResult]:
    """Finite differences of the eval-mode cross-entropy w.r.t. every trainable parameter."""

    def loss() -> float:
        scores, _ = graph.run(x, training=False)
        return cross_entropy_loss(scores, y)[0]

    scores, trace = graph.run(x, training=False, keep_trace=True)
    _, d_scores = cross_entropy_loss(scores, y)
    analytic = graph.backprop(trace, d_scores).param_grads

    results = []
    for name, array in graph.named_parameters().items():
        numeric = numeric_gradient(loss, array)
        results.append(GroupResult(suite=suite, group=name, max_rel_error=relative_error(analytic[name], numeric),
                                   tolerance=tolerance))
    return results


def random_enk_instance(rng: np.random.Generator, b: Optional[float] = None):
    """A miniature input (at most 3x8x12) and EnK parameters."""
    c = int(rng.integers(1, 4))
    h, w = int(rng.integers(2, 9)), int(rng.integers(3, 13))
    f = int(rng.integers(1, 4))
    kh, kw = int(rng.integers(1, h + 1)), int(rng.integers(1, min(w, 5) + 1))
    x = rng.standard_normal((c, h, w))
    params = EnkConvParams(
        kernel=rng.standard_normal((f, c, kh, kw)),
        bias=rng.standard_normal(f),
        b=float(rng.uniform(-0.5, 0.5)) if b is None else b,
    )
    return x, params


def run_conv_suite(seed: int = 0, instances: int = 20, tolerance: float = 1e-5,
                   backward: Backward = enk_backward) -> List[GroupResult]:
    rng = np.random.default_rng(seed)
    results: List[GroupResult] = []
    for k in range(instances):
        # every fifth instance sits at b = 0, where d_b must still be exact
        x, params = random_enk_instance(rng, b=0.0 if k % 5 == 0 else None)
        results.extend(check_enk_gradients(x, params, rng, tolerance, backward))
    return results


def run_graph_suite(seed: int = 0, tolerance: float = 1e-4) -> List[GroupResult]:
    from ..models.zoo import FAMILIES, ModelSpec, build_model

    rng = np.random.default_rng(seed)
    results: List[GroupResult] = []
    for family in FAMILIES:
        for variant in ("org", "enk", "gauss"):
            spec = ModelSpec(family=family, channels=3, samples=32, class_count=3, variant=variant, init_seed=seed)
            graph = build_model(spec)
            for layer in graph.layers:
                if layer.kind == "enk-conv":
                    layer.params["b"][...] = 0.05
            x = rng.standard_normal((2,) + graph.input_shape)
            y = rng.integers(0, spec.class_count, size=2)
            results.extend(check_graph_gradients(graph, x, y, suite=f"{family}/{variant}", tolerance=tolerance))
    return results


def run_gradcheck(seed: int = 0, tolerance: float = 1e-4) -> GradcheckReport:
    report = GradcheckReport(results=run_conv_suite(seed, tolerance=min(tolerance, 1e-5)) + run_graph_suite(seed, tolerance))
    for group, err in report.worst().items():
        logger.debug("gradcheck %s max rel error %.3e", group, err)
    return report
