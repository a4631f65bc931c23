"""Squared-exponential kernel matrices, centering, and bandwidth selection.

Shared substrate for the dependence statistic and its gradients: data
enters as an (n, d) array of samples, kernels leave as (n, n) symmetric
matrices. Only the squared-exponential family is supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, InvalidConfig, InvalidData

SQUARED_EXPONENTIAL = "squared_exponential"


def as_data_matrix(values, min_rows: int = 2) -> np.ndarray:
    """Coerce input to a float64 (n, d) matrix and validate it.

    1-d input is treated as a single column. Rejects non-finite entries
    and fewer than ``min_rows`` samples.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidData(f"expected a 2-d data matrix, got ndim={arr.ndim}")
    if arr.shape[0] < min_rows:
        raise InvalidData(f"need at least {min_rows} samples, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidData("data contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family tag plus the bandwidth sigma for one variable."""

    bandwidth: float
    family: str = SQUARED_EXPONENTIAL

    def __post_init__(self):
        if self.family != SQUARED_EXPONENTIAL:
            raise InvalidConfig(f"unsupported kernel family: {self.family!r}")
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise InvalidConfig(
                f"bandwidth must be positive and finite, got {self.bandwidth}"
            )


@dataclass(frozen=True)
class KernelMatrix:
    values: np.ndarray
    centered: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _sq_distances(data: np.ndarray) -> np.ndarray:
    # Broadcast differences keep the matrix exactly symmetric with an
    # exactly-zero diagonal, unlike the Gram-expansion shortcut.
    diff = data[:, None, :] - data[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def se_kernel_matrix(data, config: KernelConfig) -> KernelMatrix:
    """K_ik = exp(-||x_i - x_k||^2 / (2 sigma^2)) over all sample pairs."""
    arr = as_data_matrix(data)
    d2 = _sq_distances(arr)
    return KernelMatrix(np.exp(-d2 / (2.0 * config.bandwidth**2)), centered=False)


def _center_values(k: np.ndarray) -> np.ndarray:
    # Row/column mean subtraction materializes H K H in O(n^2) without
    # forming H = I - (1/n) 11^T explicitly.
    row = k.mean(axis=1, keepdims=True)
    col = k.mean(axis=0, keepdims=True)
    return k - row - col + k.mean()


def center(k: KernelMatrix) -> KernelMatrix:
    """Apply the centering projection H K H to a kernel matrix."""
    values = np.asarray(k.values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidData("centering expects a square matrix")
    return KernelMatrix(_center_values(values), centered=True)


def median_heuristic_bandwidth(data) -> float:
    """Median Euclidean distance between distinct sample rows.

    Falls back to the smallest nonzero pairwise distance when ties pull
    the median itself to zero. All rows identical is an error rather
    than a silent sigma of zero.
    """
    arr = as_data_matrix(data)
    iu = np.triu_indices(arr.shape[0], k=1)
    dists = np.sqrt(_sq_distances(arr)[iu])
    med = float(np.median(dists))
    if med > 0.0:
        return med
    nonzero = dists[dists > 0.0]
    if nonzero.size == 0:
        raise DegenerateData("all rows identical; no usable bandwidth")
    return float(nonzero.min())


def is_constant(values) -> bool:
    """True when every row of the array equals the first row exactly."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return bool(np.all(arr == arr[0]))
