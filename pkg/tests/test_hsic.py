import math

import numpy as np
import pytest

from hsicsens import KernelConfig, hsic
from hsicsens.errors import DegenerateData, ShapeMismatch

from oracles import naive_hsic_expansion, quad_sum_hsic

UNIT = KernelConfig(1.0)


def test_constant_x_gives_zero():
    y = np.linspace(0.0, 1.0, 8)[:, None]
    v = hsic(np.ones((8, 1)), y, UNIT, UNIT)
    assert v.statistic == 0.0


def test_two_point_hand_computation():
    # With x = y = [0, 1] and unit bandwidths, H Kx H has entries
    # +/- (1 - e^{-1/2}) / 2 and the trace works out to (1 - e^{-1/2})^2 / 4.
    expected = (1.0 - math.exp(-0.5)) ** 2 / 4.0
    v = hsic([[0.0], [1.0]], [[0.0], [1.0]], UNIT, UNIT)
    assert v.statistic == pytest.approx(expected, rel=1e-14)
    assert v.statistic == pytest.approx(0.03870453043654387, rel=1e-14)


def test_matches_naive_expansion_oracle():
    rng = np.random.default_rng(17)
    x = rng.normal(size=(20, 1))
    y = 0.7 * x + 0.4 * rng.normal(size=(20, 1))
    cfg_x = KernelConfig(0.8)
    cfg_y = KernelConfig(1.1)
    got = hsic(x, y, cfg_x, cfg_y).statistic
    assert got == pytest.approx(naive_hsic_expansion(x, y, 0.8, 1.1), rel=1e-10)


def test_quadruple_sum_oracle_small_n():
    rng = np.random.default_rng(29)
    x = rng.normal(size=(9, 1))
    y = rng.normal(size=(9, 2))
    got = hsic(x, y, UNIT, UNIT).statistic
    assert got == pytest.approx(quad_sum_hsic(x, y, 1.0, 1.0), rel=1e-10)


def test_symmetry_in_arguments():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(40, 1))
    y = rng.normal(size=(40, 1)) + 0.3 * x
    a = hsic(x, y, UNIT, UNIT).statistic
    b = hsic(y, x, UNIT, UNIT).statistic
    assert a == pytest.approx(b, rel=1e-12)


def test_permutation_equivariance():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(25, 1))
    y = x**2 + 0.1 * rng.normal(size=(25, 1))
    perm = rng.permutation(25)
    a = hsic(x, y, UNIT, UNIT).statistic
    b = hsic(x[perm], y[perm], UNIT, UNIT).statistic
    assert a == pytest.approx(b, rel=1e-12)


def test_independent_below_dependent_on_average():
    rng = np.random.default_rng(100)
    indep, dep = [], []
    for _ in range(20):
        x = rng.normal(size=(500, 1))
        y_indep = rng.normal(size=(500, 1))
        y_dep = x + 0.3 * rng.normal(size=(500, 1))
        indep.append(hsic(x, y_indep).statistic)
        dep.append(hsic(x, y_dep).statistic)
    assert np.mean(indep) < np.mean(dep)


def test_huge_bandwidth_sends_statistic_to_zero():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(100, 1))
    y = x + 0.1 * rng.normal(size=(100, 1))
    v = hsic(x, y, KernelConfig(1e6), KernelConfig(1.0))
    assert v.statistic < 1e-6


def test_statistic_never_negative():
    rng = np.random.default_rng(55)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        x = rng.normal(size=(n, 1))
        y = rng.normal(size=(n, 1))
        assert hsic(x, y, UNIT, UNIT).statistic >= 0.0


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        hsic(np.zeros((5, 1)), np.zeros((6, 1)), UNIT, UNIT)


def test_auto_bandwidth_propagates_degeneracy():
    y = np.linspace(0.0, 1.0, 8)[:, None]
    with pytest.raises(DegenerateData):
        hsic(np.ones((8, 1)), y)


def test_auto_bandwidth_uses_median_heuristic():
    rng = np.random.default_rng(31)
    x = rng.normal(size=(15, 1))
    y = rng.normal(size=(15, 1))
    v = hsic(x, y)
    from hsicsens import median_heuristic_bandwidth

    assert v.sigma_x == median_heuristic_bandwidth(x)
    assert v.sigma_y == median_heuristic_bandwidth(y)
    assert v.n == 15
