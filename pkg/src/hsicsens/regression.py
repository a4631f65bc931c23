"""Nonlinear univariate regressors producing in-sample fits and residuals.

Two interchangeable regressors: a CART-style regression forest
(bootstrap rows, variance-reduction splits, mean-of-leaf prediction
averaged over trees) and a squared-exponential kernel ridge baseline.
Both are deterministic given the spec seed; the forest derives one seed
per tree so results do not depend on training order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientData, InvalidConfig, InvalidData
from .kernels import KernelConfig, median_heuristic_bandwidth, se_kernel_matrix

RANDOM_FOREST = "random_forest"
KERNEL_RIDGE = "kernel_ridge"


@dataclass(frozen=True)
class RegressorSpec:
    """Regressor kind plus its hyperparameters and the seed."""

    kind: str = RANDOM_FOREST
    tree_count: int = 100
    max_depth: int | None = None
    min_leaf_size: int = 5
    features_per_split: int | None = None  # None = consider every feature
    bootstrap: bool = True
    ridge_lambda: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (RANDOM_FOREST, KERNEL_RIDGE):
            raise InvalidConfig(f"unknown regressor kind: {self.kind!r}")
        if self.tree_count < 1:
            raise InvalidConfig("tree_count must be >= 1")
        if self.min_leaf_size < 1:
            raise InvalidConfig("min_leaf_size must be >= 1")
        if not self.ridge_lambda > 0:
            raise InvalidConfig("ridge_lambda must be > 0")


@dataclass(frozen=True)
class RegressionFit:
    predictions: np.ndarray
    residuals: np.ndarray
    spec: RegressorSpec


@dataclass
class _Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray


def _best_split(x, y, min_leaf, feat_idx):
    n = y.size
    best = None
    for j in feat_idx:
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        ys = y[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        counts = np.arange(1, n, dtype=float)
        left_sum, left_sq = csum[:-1], csq[:-1]
        right_sum, right_sq = csum[-1] - left_sum, csq[-1] - left_sq
        sse = (left_sq - left_sum**2 / counts) + (
            right_sq - right_sum**2 / (n - counts)
        )
        valid = (
            (counts >= min_leaf)
            & ((n - counts) >= min_leaf)
            & (xs[:-1] != xs[1:])
        )
        if not valid.any():
            continue
        sse = np.where(valid, sse, np.inf)
        i = int(np.argmin(sse))
        if best is None or sse[i] < best[0]:
            thr = xs[i] + 0.5 * (xs[i + 1] - xs[i])
            if thr >= xs[i + 1]:  # midpoint rounded up to the right value
                thr = xs[i]
            best = (float(sse[i]), int(j), float(thr))
    return best


def _grow_tree(x, y, rng, max_depth, min_leaf, max_features):
    d = x.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def add_leaf(ys):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(ys.mean()))
        return len(feature) - 1

    def build(xs, ys, depth):
        depth_ok = max_depth is None or depth < max_depth
        if not depth_ok or ys.size < 2 * min_leaf or np.all(ys == ys[0]):
            return add_leaf(ys)
        if max_features is not None and max_features < d:
            feat_idx = rng.choice(d, size=max_features, replace=False)
        else:
            feat_idx = range(d)
        split = _best_split(xs, ys, min_leaf, feat_idx)
        if split is None:
            return add_leaf(ys)
        _, j, thr = split
        node = len(feature)
        feature.append(j)
        threshold.append(thr)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        mask = xs[:, j] <= thr
        left[node] = build(xs[mask], ys[mask], depth + 1)
        right[node] = build(xs[~mask], ys[~mask], depth + 1)
        return node

    build(x, y, 0)
    return _Tree(
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        value=np.asarray(value, dtype=float),
    )


def _predict_tree(tree: _Tree, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape[0])
    stack = [(0, np.arange(x.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        f = tree.feature[node]
        if f < 0:
            out[idx] = tree.value[node]
            continue
        go_left = x[idx, f] <= tree.threshold[node]
        stack.append((tree.left[node], idx[go_left]))
        stack.append((tree.right[node], idx[~go_left]))
    return out


class RandomForestModel:
    """Immutable after fitting; safe for concurrent prediction."""

    def __init__(self, trees):
        self._trees = tuple(trees)

    def predict(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        acc = np.zeros(arr.shape[0])
        for tree in self._trees:
            acc += _predict_tree(tree, arr)
        return acc / len(self._trees)


def random_forest_fit(inputs, targets, spec: RegressorSpec) -> RandomForestModel:
    """Grow a bagged CART forest; one derived seed per tree."""
    x, y = _validated(inputs, targets)
    n = y.size
    trees = []
    for child in np.random.SeedSequence(spec.seed).spawn(spec.tree_count):
        rng = np.random.default_rng(child)
        if spec.bootstrap:
            idx = rng.integers(0, n, size=n)
            xb, yb = x[idx], y[idx]
        else:
            xb, yb = x, y
        trees.append(
            _grow_tree(
                xb,
                yb,
                rng,
                spec.max_depth,
                spec.min_leaf_size,
                spec.features_per_split,
            )
        )
    return RandomForestModel(trees)


def _kernel_ridge_predictions(x, y, spec: RegressorSpec) -> np.ndarray:
    sigma = median_heuristic_bandwidth(x)
    k = se_kernel_matrix(x, KernelConfig(sigma)).values
    ybar = y.mean()
    alpha = np.linalg.solve(k + spec.ridge_lambda * np.eye(y.size), y - ybar)
    return k @ alpha + ybar


def _validated(inputs, targets):
    x = np.asarray(inputs, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(targets, dtype=float).ravel()
    if x.shape[0] != y.size:
        raise InvalidData(
            f"inputs have {x.shape[0]} rows but targets have {y.size}"
        )
    if y.size < 2:
        raise InsufficientData(f"need at least 2 samples, got {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidData("inputs or targets contain NaN or Inf")
    return x, y


def fit_predict(inputs, targets, spec: RegressorSpec) -> RegressionFit:
    """Fit the named regressor and return in-sample predictions/residuals."""
    x, y = _validated(inputs, targets)
    if spec.kind == RANDOM_FOREST:
        predictions = random_forest_fit(x, y, spec).predict(x)
    elif spec.kind == KERNEL_RIDGE:
        if np.all(y == y[0]):
            predictions = np.full_like(y, y[0])
        else:
            predictions = _kernel_ridge_predictions(x, y, spec)
    else:  # pragma: no cover - guarded by RegressorSpec validation
        raise InvalidConfig(f"unknown regressor kind: {spec.kind!r}")
    return RegressionFit(
        predictions=predictions, residuals=y - predictions, spec=spec
    )


def with_seed(spec: RegressorSpec, seed: int) -> RegressorSpec:
    return replace(spec, seed=int(seed))
