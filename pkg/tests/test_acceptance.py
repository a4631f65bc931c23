"""Acceptance suite: one test per release criterion, each printing a
[PASS]/[FAIL] line with its measured numbers.

The real-collection reproduction (criterion 4) needs the downloaded
pair files; point HSICSENS_DATA_DIR at them to enable it, otherwise it
is skipped with instructions.
"""

import math
import os
import time

import numpy as np
import pytest

from hsicsens import (
    GeneratorSpec,
    KernelConfig,
    RegressorSpec,
    auc_vs_nmax_table,
    hsic,
    hsic_gradient_x,
    load_cep_directory,
    run_benchmark,
    se_kernel_matrix,
    subsample,
    synthetic_suite,
    weighted_roc,
)
from hsicsens.bench import BenchmarkRecord
from hsicsens.causal import X_CAUSES_Y, Y_CAUSES_X, DirectionVerdict
from hsicsens.cli import main
from hsicsens.hsic import HsicValue
from hsicsens.kernels import KernelMatrix, center
from hsicsens.regression import fit_predict

from oracles import (
    brute_force_weighted_roc,
    fd_hsic_gradient_x,
    naive_hsic_expansion,
    worst_relative_error,
)

DATA_DIR_ENV = "HSICSENS_DATA_DIR"


def _report(name: str, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line)
    return line


def test_criterion_1_gradient_correctness():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    worst_abs = 0.0
    for _ in range(100):
        n = int(rng.integers(4, 21))
        d = int(rng.integers(1, 3))
        x = rng.normal(size=(n, d))
        y = rng.normal(size=(n, d)) + 0.5 * x
        cfg_x = KernelConfig(float(rng.uniform(0.5, 2.0)))
        cfg_y = KernelConfig(float(rng.uniform(0.5, 2.0)))
        analytic = hsic_gradient_x(x, y, cfg_x, cfg_y)
        numeric = fd_hsic_gradient_x(x, y, cfg_x, cfg_y)
        worst = max(worst, worst_relative_error(analytic, numeric))
        worst_abs = max(worst_abs, float(np.abs(analytic - numeric).max()))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-4 and elapsed < 30.0
    line = _report(
        "criterion 1 (gradient correctness)",
        ok,
        f"worst rel err {worst:.3e} (abs floor 1e-10, worst abs diff "
        f"{worst_abs:.3e}) over 100 instances in {elapsed:.1f}s",
    )
    assert ok, line


def test_criterion_2_hsic_oracle_equivalence():
    rng = np.random.default_rng(2025)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 31))
        x = rng.normal(size=(n, 1))
        y = rng.normal(size=(n, 1)) + 0.4 * x
        sigma_x = float(rng.uniform(0.5, 2.0))
        sigma_y = float(rng.uniform(0.5, 2.0))
        got = hsic(x, y, KernelConfig(sigma_x), KernelConfig(sigma_y)).statistic
        expected = naive_hsic_expansion(x, y, sigma_x, sigma_y)
        worst = max(worst, abs(got - expected) / abs(expected))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 10.0
    line = _report(
        "criterion 2 (statistic vs naive expansion)",
        ok,
        f"worst rel diff {worst:.3e} over 50 instances in {elapsed:.1f}s",
    )
    assert ok, line


def _weighted_accuracy(records, criterion):
    usable = [
        (rec.correct_c if criterion == "c" else rec.correct_cs, rec.weight)
        for rec in records
        if rec.error is None
    ]
    total = sum(w for _, w in usable)
    return sum(w for correct, w in usable if correct) / total


def test_criterion_3_synthetic_anm_detection():
    start = time.perf_counter()
    pairs = synthetic_suite(50, GeneratorSpec(mechanism="cubic", noise=0.1, n=500), seed=7)
    records = run_benchmark(pairs, [500], 1, RegressorSpec(seed=0), seed=7)
    acc_c = _weighted_accuracy(records, "c")
    acc_cs = _weighted_accuracy(records, "cs")
    elapsed = time.perf_counter() - start
    ok = acc_c >= 0.8 and acc_cs >= 0.7 and elapsed < 300.0
    line = _report(
        "criterion 3 (synthetic detection)",
        ok,
        f"accuracy C={acc_c:.2f} (>=0.8) Cs={acc_cs:.2f} (>=0.7) in {elapsed:.0f}s",
    )
    assert ok, line


def test_criterion_4_cep_reproduction():
    data_dir = os.environ.get(DATA_DIR_ENV)
    if not data_dir:
        pytest.skip(
            f"set {DATA_DIR_ENV} to a directory holding pairmeta.txt and "
            "pairNNNN.txt files from the cause-effect collection (v1.0)"
        )
    start = time.perf_counter()
    pairs = load_cep_directory(data_dir)
    workers = min(os.cpu_count() or 1, 8)
    records = run_benchmark(
        pairs, [200, 2000], 10, RegressorSpec(seed=0), seed=2026, workers=workers
    )
    table = {(row.n_max, row.criterion): row for row in auc_vs_nmax_table(records)}
    elapsed = time.perf_counter() - start

    auc_cs_2000 = table[(2000, "cs")].mean_auc
    better_within_sd = True
    details = [f"AUC_cs(2000)={auc_cs_2000:.3f}"]
    for n_max in (200, 2000):
        row_c, row_cs = table[(n_max, "c")], table[(n_max, "cs")]
        pooled_sd = math.sqrt((row_c.std_auc**2 + row_cs.std_auc**2) / 2.0)
        better_within_sd &= row_cs.mean_auc >= row_c.mean_auc - pooled_sd
        details.append(
            f"n_max={n_max}: C={row_c.mean_auc:.3f}+/-{row_c.std_auc:.3f} "
            f"Cs={row_cs.mean_auc:.3f}+/-{row_cs.std_auc:.3f}"
        )
    ok = auc_cs_2000 > 0.5 and better_within_sd and elapsed < 7200.0
    line = _report(
        "criterion 4 (collection reproduction)",
        ok,
        "; ".join(details) + f"; {elapsed:.0f}s",
    )
    assert ok, line


def _curve_record(score, correct, weight, idx):
    verdict = DirectionVerdict(
        score_c=score,
        score_cs=score,
        direction_c=X_CAUSES_Y if score <= 0 else Y_CAUSES_X,
        direction_cs=X_CAUSES_Y if score >= 0 else Y_CAUSES_X,
        hsic_forward=HsicValue(abs(score), 50, 1.0, 1.0),
        hsic_backward=HsicValue(0.0, 50, 1.0, 1.0),
        sens_forward_x=0.0,
        sens_forward_r=0.0,
        sens_backward_y=0.0,
        sens_backward_r=0.0,
    )
    return BenchmarkRecord(
        pair_id=f"p{idx}",
        realization_index=0,
        n_used=50,
        n_max=50,
        verdict=verdict,
        correct_c=correct,
        correct_cs=correct,
        weight=weight,
        wall_time_ms=0.0,
    )


def test_criterion_5_weighted_curve_correctness():
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    mismatches = 0
    checked = 0
    for _ in range(20):
        n = int(rng.integers(4, 40))
        scores = rng.normal(size=n)
        correct = rng.random(n) < 0.6
        weights = rng.choice([0.25, 0.5, 1.0], size=n)  # grouped weights
        if not any(correct) or all(correct):
            correct[0] = True
            correct[1] = False
        records = [
            _curve_record(float(s), bool(c), float(w), i)
            for i, (s, c, w) in enumerate(zip(scores, correct, weights))
        ]
        curve = weighted_roc(records, "c")
        points, auc = brute_force_weighted_roc(
            [(abs(float(s)), bool(c), float(w))
             for s, c, w in zip(scores, correct, weights)]
        )
        checked += 1
        if curve.auc != auc or [
            (p.threshold, p.tpr, p.fpr, p.precision, p.recall) for p in curve.points
        ] != points:
            mismatches += 1

    perfect = [_curve_record(-1.0 - i, True, 0.25, i) for i in range(5)]
    inverted = [_curve_record(1.0 + i, False, 0.25, i) for i in range(5)]
    auc_perfect = weighted_roc(perfect, "c").auc
    auc_inverted = weighted_roc(inverted, "c").auc
    elapsed = time.perf_counter() - start
    ok = (
        mismatches == 0
        and auc_perfect == 1.0
        and auc_inverted == 0.0
        and elapsed < 5.0
    )
    line = _report(
        "criterion 5 (weighted curves vs oracle)",
        ok,
        f"{checked} record sets exact, perfect={auc_perfect}, "
        f"inverted={auc_inverted}, {elapsed:.2f}s",
    )
    assert ok, line


def test_criterion_6_bench_determinism(tmp_path):
    args = [
        "bench", "--selection", "synthetic", "--synthetic-pairs", "4",
        "--synthetic-n", "120", "--n-max", "50", "--realizations", "2",
        "--regressor", "kernel_ridge", "--threads", "1", "--seed", "5",
        "--output-dir", str(tmp_path / "run"),
    ]
    assert main(args) == 0
    first = {
        p.name: p.read_bytes()
        for p in (tmp_path / "run").iterdir()
        if p.suffix == ".csv"
    }
    assert main(args) == 0
    second = {
        p.name: p.read_bytes()
        for p in (tmp_path / "run").iterdir()
        if p.suffix == ".csv"
    }
    ok = first == second and len(first) == 3
    line = _report(
        "criterion 6 (rerun determinism)",
        ok,
        f"{len(first)} CSV artifacts byte-identical across reruns",
    )
    assert ok, line


def test_criterion_7_property_suites():
    rng = np.random.default_rng(31337)
    failures = []

    # kernel positive semi-definiteness
    for _ in range(5):
        data = rng.normal(size=(int(rng.integers(5, 50)), 1))
        k = se_kernel_matrix(data, KernelConfig(1.0)).values
        if np.linalg.eigvalsh(k).min() < -1e-9:
            failures.append("kernel PSD")

    # centering idempotence
    a = rng.normal(size=(10, 10))
    sym = a + a.T
    once = center(KernelMatrix(sym)).values
    if not np.allclose(center(KernelMatrix(once)).values, once, atol=1e-10):
        failures.append("centering idempotence")

    # statistic symmetry and permutation invariance
    x = rng.normal(size=(40, 1))
    y = x + 0.5 * rng.normal(size=(40, 1))
    cfg = KernelConfig(1.0)
    if not math.isclose(
        hsic(x, y, cfg, cfg).statistic,
        hsic(y, x, cfg, cfg).statistic,
        rel_tol=1e-12,
    ):
        failures.append("statistic symmetry")
    perm = rng.permutation(40)
    if not math.isclose(
        hsic(x, y, cfg, cfg).statistic,
        hsic(x[perm], y[perm], cfg, cfg).statistic,
        rel_tol=1e-12,
    ):
        failures.append("permutation invariance")

    # gradient columns sum to zero
    g = hsic_gradient_x(x, y, cfg, cfg)
    if np.abs(g.sum(axis=0)).max() >= 1e-9:
        failures.append("gradient row-sum zero")

    # residual identity
    fit = fit_predict(x, y[:, 0], RegressorSpec(tree_count=10, seed=0))
    if not np.array_equal(fit.residuals, y[:, 0] - fit.predictions):
        failures.append("residual identity")

    # curve order invariance
    records = [
        _curve_record(float(s), bool(c), float(w), i)
        for i, (s, c, w) in enumerate(
            zip(rng.normal(size=12), rng.random(12) < 0.5, rng.choice([0.25, 1.0], 12))
        )
    ]
    base = weighted_roc(records, "c")
    shuffled = list(records)
    np.random.default_rng(0).shuffle(shuffled)
    if weighted_roc(shuffled, "c") != base:
        failures.append("curve order invariance")

    # subsampling keeps rows paired
    pair = synthetic_suite(1, GeneratorSpec(n=60), seed=0)[0]
    sub = subsample(pair, 20, seed=1)
    rows = {(float(a), float(b)) for a, b in zip(pair.x[:, 0], pair.y[:, 0])}
    if any((float(a), float(b)) not in rows for a, b in zip(sub.x[:, 0], sub.y[:, 0])):
        failures.append("subsample pairing")

    ok = not failures
    line = _report(
        "criterion 7 (property suites)",
        ok,
        "all module invariants hold" if ok else f"failed: {failures}",
    )
    assert ok, line
