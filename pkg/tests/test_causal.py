import numpy as np
import pytest

from hsicsens import (
    KERNEL_RIDGE,
    X_CAUSES_Y,
    GeneratorSpec,
    PairedDataset,
    RegressorSpec,
    infer_direction,
    synth_anm_pair,
)
from hsicsens.errors import DegeneratePair, InsufficientData

CUBIC = GeneratorSpec(mechanism="cubic", noise=0.1, n=500)


@pytest.fixture(scope="module")
def cubic_battery():
    """20 seeded cubic pairs scored once, reused by several assertions."""
    spec = RegressorSpec(seed=0)
    verdicts = []
    for i in range(20):
        pair = synth_anm_pair(CUBIC, np.random.SeedSequence([7, i]))
        verdicts.append(infer_direction(pair, spec))
    return verdicts


def test_identical_copies_have_no_systematic_direction():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1.0, 1.0, size=(200, 1))
    scores_c, scores_cs = [], []
    for seed in range(20):
        pair = PairedDataset(id=f"copy{seed}", x=x, y=x.copy())
        v = infer_direction(pair, RegressorSpec(tree_count=50, seed=seed))
        scores_c.append(v.score_c)
        scores_cs.append(v.score_cs)
    for scores in (scores_c, scores_cs):
        spread = np.std(scores)
        assert spread > 0.0
        assert np.max(np.abs(scores)) <= 10.0 * spread


def test_cubic_anm_recovers_direction(cubic_battery):
    hits = sum(v.direction_c == X_CAUSES_Y for v in cubic_battery)
    assert hits >= 16


def test_sensitivity_criterion_not_far_behind(cubic_battery):
    acc_c = np.mean([v.direction_c == X_CAUSES_Y for v in cubic_battery])
    acc_cs = np.mean([v.direction_cs == X_CAUSES_Y for v in cubic_battery])
    assert acc_cs >= acc_c - 0.1


def test_score_reconstruction_from_diagnostics(cubic_battery):
    for v in cubic_battery:
        assert v.score_c == v.hsic_forward.statistic - v.hsic_backward.statistic
        assert v.score_cs == (v.sens_backward_y + v.sens_backward_r) - (
            v.sens_forward_x + v.sens_forward_r
        )


def test_decision_rule_signs(cubic_battery):
    for v in cubic_battery:
        assert (v.direction_c == X_CAUSES_Y) == (v.score_c <= 0)
        assert (v.direction_cs == X_CAUSES_Y) == (v.score_cs >= 0)


def test_swap_negates_scores_exactly_with_deterministic_regressor():
    pair = synth_anm_pair(GeneratorSpec(mechanism="cubic", noise=0.15, n=120), 5)
    swapped = PairedDataset(
        id="swapped", x=pair.y, y=pair.x, ground_truth="unknown", weight=1.0
    )
    spec = RegressorSpec(kind=KERNEL_RIDGE, seed=3)
    v = infer_direction(pair, spec)
    w = infer_direction(swapped, spec)
    assert w.score_c == -v.score_c
    assert w.score_cs == -v.score_cs
    assert w.hsic_forward.statistic == v.hsic_backward.statistic
    assert w.sens_forward_x == v.sens_backward_y
    assert w.sens_forward_r == v.sens_backward_r


def test_scale_invariance_of_both_scores():
    pair = synth_anm_pair(GeneratorSpec(mechanism="cubic", noise=0.1, n=150), 9)
    scaled = PairedDataset(
        id="scaled", x=1000.0 * pair.x, y=0.001 * pair.y,
        ground_truth=pair.ground_truth, weight=1.0,
    )
    spec = RegressorSpec(kind=KERNEL_RIDGE, seed=1)
    v = infer_direction(pair, spec)
    w = infer_direction(scaled, spec)
    assert w.score_c == pytest.approx(v.score_c, rel=1e-9)
    assert w.score_cs == pytest.approx(v.score_cs, rel=1e-9)


def test_constant_variable_rejected():
    y = np.linspace(0.0, 1.0, 50)[:, None]
    pair = PairedDataset(id="const", x=np.ones((50, 1)), y=y)
    with pytest.raises(DegeneratePair):
        infer_direction(pair, RegressorSpec(seed=0))


def test_too_few_samples_rejected():
    rng = np.random.default_rng(2)
    pair = PairedDataset(id="tiny", x=rng.normal(size=(5, 1)), y=rng.normal(size=(5, 1)))
    with pytest.raises(InsufficientData):
        infer_direction(pair, RegressorSpec(seed=0))


def test_confidence_is_score_magnitude():
    pair = synth_anm_pair(CUBIC, 1)
    v = infer_direction(pair, RegressorSpec(kind=KERNEL_RIDGE, seed=0))
    assert v.confidence_c == abs(v.score_c)
    assert v.confidence_cs == abs(v.score_cs)
