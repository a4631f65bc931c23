"""Empirical Hilbert-Schmidt Independence Criterion.

The biased V-statistic estimator (1/n^2) Tr(H K_x H K_y) with
squared-exponential kernels (Gretton et al., 2005). Zero iff
independence for universal kernels; computed here without any
significance calibration, since downstream direction decisions compare
raw statistics between fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch
from .kernels import (
    KernelConfig,
    as_data_matrix,
    _center_values,
    median_heuristic_bandwidth,
    se_kernel_matrix,
)


@dataclass(frozen=True)
class HsicValue:
    """Statistic value plus the sample count and bandwidths that produced it."""

    statistic: float
    n: int
    sigma_x: float
    sigma_y: float


def _paired_matrices(x, y):
    xa = as_data_matrix(x)
    ya = as_data_matrix(y)
    if xa.shape[0] != ya.shape[0]:
        raise ShapeMismatch(
            f"sample counts differ: x has {xa.shape[0]}, y has {ya.shape[0]}"
        )
    return xa, ya


def hsic(
    x,
    y,
    cfg_x: KernelConfig | None = None,
    cfg_y: KernelConfig | None = None,
) -> HsicValue:
    """(1/n^2) Tr(H K_x H K_y), clamped at zero from below.

    Bandwidths default to the per-argument median heuristic; pass
    explicit configs to pin them.
    """
    xa, ya = _paired_matrices(x, y)
    if cfg_x is None:
        cfg_x = KernelConfig(median_heuristic_bandwidth(xa))
    if cfg_y is None:
        cfg_y = KernelConfig(median_heuristic_bandwidth(ya))
    kx = se_kernel_matrix(xa, cfg_x).values
    ky = se_kernel_matrix(ya, cfg_y).values
    n = xa.shape[0]
    # Tr((H Kx H) Ky) = sum of the elementwise product, both symmetric.
    stat = float(np.sum(_center_values(kx) * ky)) / (n * n)
    return HsicValue(
        statistic=max(stat, 0.0),
        n=n,
        sigma_x=cfg_x.bandwidth,
        sigma_y=cfg_y.bandwidth,
    )
