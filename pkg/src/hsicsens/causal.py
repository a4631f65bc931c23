"""Direction decision for a bivariate pair.

Fits nonlinear regressions in both directions, then scores the
asymmetry two ways: the difference of residual-dependence statistics
(score_c) and the difference of summed dependence sensitivities
(score_cs). Sign conventions: score_c <= 0 and score_cs >= 0 both read
as "x causes y"; the sensitivity orientation is calibrated on the
synthetic additive-noise battery in the test suite and recorded in run
metadata.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, DegeneratePair, InsufficientData, ShapeMismatch
from .hsic import HsicValue, hsic
from .kernels import KernelConfig, as_data_matrix, is_constant, median_heuristic_bandwidth
from .regression import RegressorSpec, fit_predict, with_seed
from .sensitivity import sensitivity_map

X_CAUSES_Y = "x_causes_y"
Y_CAUSES_X = "y_causes_x"
UNKNOWN = "unknown"

# Orientation of the sensitivity criterion: +1.0 means a positive
# score_cs is read as x -> y (backward fit more sensitive than forward).
CS_ORIENTATION = 1.0


@dataclass(frozen=True)
class DirectionVerdict:
    """Both scores, both decisions, and the per-direction diagnostics."""

    score_c: float
    score_cs: float
    direction_c: str
    direction_cs: str
    hsic_forward: HsicValue
    hsic_backward: HsicValue
    sens_forward_x: float
    sens_forward_r: float
    sens_backward_y: float
    sens_backward_r: float

    @property
    def confidence_c(self) -> float:
        return abs(self.score_c)

    @property
    def confidence_cs(self) -> float:
        return abs(self.score_cs)


def _standardize(arr: np.ndarray) -> np.ndarray:
    # Median-bandwidth HSIC is scale invariant but the sensitivity
    # prefactor 1/sigma^2 is not; standardizing puts both variables
    # (and their residuals) on comparable units.
    return (arr - arr.mean(axis=0)) / arr.std(axis=0)


def _median_config(values) -> KernelConfig:
    try:
        return KernelConfig(median_heuristic_bandwidth(values))
    except DegenerateData:
        # A perfectly fitted (constant) residual carries no dependence
        # signal: any bandwidth yields statistic 0 and zero gradients.
        return KernelConfig(1.0)


def infer_direction(
    pair, spec: RegressorSpec, min_samples: int = 10
) -> DirectionVerdict:
    """Score both causal directions for a paired dataset.

    Forward means regressing y on x; backward regresses x on y. Each
    HSIC evaluation pairs a regressor input with the matching residual,
    with median-heuristic bandwidths chosen per argument and shared
    with the sensitivity map of the same evaluation.
    """
    x = as_data_matrix(pair.x)
    y = as_data_matrix(pair.y)
    n = x.shape[0]
    if n != y.shape[0]:
        raise ShapeMismatch(f"pair {getattr(pair, 'id', '?')}: x/y sample counts differ")
    if n < min_samples:
        raise InsufficientData(
            f"pair {getattr(pair, 'id', '?')}: need >= {min_samples} paired samples"
        )
    if is_constant(x) or is_constant(y):
        raise DegeneratePair(
            f"pair {getattr(pair, 'id', '?')}: a constant variable has no direction"
        )
    x = _standardize(x)
    y = _standardize(y)

    fwd_seed, bwd_seed = _role_seeds(spec.seed)
    fit_f = fit_predict(x, y[:, 0], with_seed(spec, fwd_seed))
    fit_b = fit_predict(y, x[:, 0], with_seed(spec, bwd_seed))
    r_f = fit_f.residuals[:, None]
    r_b = fit_b.residuals[:, None]

    cfg_x = _median_config(x)
    cfg_y = _median_config(y)
    cfg_rf = _median_config(r_f)
    cfg_rb = _median_config(r_b)

    hsic_f = hsic(x, r_f, cfg_x, cfg_rf)
    hsic_b = hsic(y, r_b, cfg_y, cfg_rb)
    map_f = sensitivity_map(x, r_f, cfg_x, cfg_rf)
    map_b = sensitivity_map(y, r_b, cfg_y, cfg_rb)

    sens_fx = float(np.mean(map_f.s_x**2))
    sens_fr = float(np.mean(map_f.s_y**2))
    sens_by = float(np.mean(map_b.s_x**2))
    sens_br = float(np.mean(map_b.s_y**2))

    score_c = hsic_f.statistic - hsic_b.statistic
    score_cs = (sens_by + sens_br) - (sens_fx + sens_fr)

    return DirectionVerdict(
        score_c=score_c,
        score_cs=score_cs,
        direction_c=X_CAUSES_Y if score_c <= 0 else Y_CAUSES_X,
        direction_cs=X_CAUSES_Y if CS_ORIENTATION * score_cs >= 0 else Y_CAUSES_X,
        hsic_forward=hsic_f,
        hsic_backward=hsic_b,
        sens_forward_x=sens_fx,
        sens_forward_r=sens_fr,
        sens_backward_y=sens_by,
        sens_backward_r=sens_br,
    )


def _role_seeds(seed: int) -> tuple[int, int]:
    fwd, bwd = np.random.SeedSequence(seed).spawn(2)
    return (
        int(fwd.generate_state(1, np.uint64)[0]),
        int(bwd.generate_state(1, np.uint64)[0]),
    )
