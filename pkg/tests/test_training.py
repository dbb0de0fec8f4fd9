import numpy as np
import pytest

from enk.data import latency_task_spec, split_and_batch, synth_generate
from enk.errors import ParameterError
from enk.models import ModelSpec, build_model
from enk.nn import AdamState, encode_checkpoint
from enk.nn.training import evaluate, train_epoch


def task(trials: int = 32, noise_std: float = 0.1, seed: int = 2):
    e = synth_generate(latency_task_spec(trials=trials, noise_std=noise_std, seed=seed))
    batches, _ = split_and_batch(e, val_fraction=0.0, batch_size=8, seed=seed)
    return batches


def model(variant: str = "org", seed: int = 4):
    return build_model(ModelSpec(family="compact-toy", channels=4, samples=64, class_count=2, variant=variant,
                                 init_seed=seed))


def test_zero_learning_rate_keeps_parameters_and_matches_evaluation():
    batches = task()
    graph = model()
    before = {name: p.copy() for name, p in graph.named_parameters().items()}

    metrics = train_epoch(graph, batches, AdamState(lr=0.0), seed=1)

    for name, p in graph.named_parameters().items():
        np.testing.assert_array_equal(p, before[name])
    x = np.concatenate([b.x for b in batches])
    y = np.concatenate([b.y for b in batches])
    loss, acc, _ = evaluate(graph, x, y)
    assert metrics.loss == pytest.approx(loss, rel=1e-12)
    assert metrics.accuracy == acc


@pytest.mark.parametrize("variant", ["enk", "gauss"])
def test_fixed_seed_is_bit_identical(variant):
    batches = task()
    first, second = model(variant), model(variant)
    a = train_epoch(first, batches, AdamState(), seed=11)
    b = train_epoch(second, batches, AdamState(), seed=11)
    assert a == b
    assert encode_checkpoint(first) == encode_checkpoint(second)


def test_seed_changes_the_visit_order():
    batches = task()
    first, second = model("gauss"), model("gauss")
    train_epoch(first, batches, AdamState(), seed=1)
    train_epoch(second, batches, AdamState(), seed=2)
    assert encode_checkpoint(first) != encode_checkpoint(second)


def test_empty_dataset():
    with pytest.raises(ParameterError):
        train_epoch(model(), [], AdamState(), seed=0)


@pytest.mark.slow
def test_separable_task_is_learned_in_thirty_epochs():
    batches = task(trials=200, noise_std=0.0, seed=0)
    graph = model("enk", seed=0)
    state = AdamState(lr=5e-3)
    for epoch in range(30):
        metrics = train_epoch(graph, batches, state, seed=epoch)
    assert metrics.accuracy >= 0.95
