"""Bivariate causal-direction inference from HSIC and its sensitivity maps."""

from .bench import (
    AucTableRow,
    BenchmarkRecord,
    RankedCurve,
    auc_vs_nmax_table,
    run_benchmark,
    weighted_roc,
)
from .causal import (
    CS_ORIENTATION,
    UNKNOWN,
    X_CAUSES_Y,
    Y_CAUSES_X,
    DirectionVerdict,
    infer_direction,
)
from .dataset import (
    CEP_URL,
    GEOSCIENCE_PAIR_IDS,
    GeneratorSpec,
    PairedDataset,
    PairMeta,
    load_cep_directory,
    load_pair,
    load_pairmeta,
    save_pair,
    subsample,
    synth_anm_pair,
    synthetic_suite,
)
from .hsic import HsicValue, hsic
from .kernels import (
    KernelConfig,
    KernelMatrix,
    center,
    median_heuristic_bandwidth,
    se_kernel_matrix,
)
from .regression import (
    KERNEL_RIDGE,
    RANDOM_FOREST,
    RegressionFit,
    RegressorSpec,
    fit_predict,
    random_forest_fit,
)
from .sensitivity import (
    SensitivityMap,
    gradient_selfcheck,
    hsic_gradient_x,
    hsic_gradient_y,
    sensitivity_map,
)

__version__ = "0.1.0"

__all__ = [
    "AucTableRow",
    "BenchmarkRecord",
    "CEP_URL",
    "CS_ORIENTATION",
    "DirectionVerdict",
    "GEOSCIENCE_PAIR_IDS",
    "GeneratorSpec",
    "HsicValue",
    "KERNEL_RIDGE",
    "KernelConfig",
    "KernelMatrix",
    "PairMeta",
    "PairedDataset",
    "RANDOM_FOREST",
    "RankedCurve",
    "RegressionFit",
    "RegressorSpec",
    "SensitivityMap",
    "UNKNOWN",
    "X_CAUSES_Y",
    "Y_CAUSES_X",
    "auc_vs_nmax_table",
    "center",
    "fit_predict",
    "gradient_selfcheck",
    "hsic",
    "hsic_gradient_x",
    "hsic_gradient_y",
    "infer_direction",
    "load_cep_directory",
    "load_pair",
    "load_pairmeta",
    "median_heuristic_bandwidth",
    "random_forest_fit",
    "run_benchmark",
    "save_pair",
    "se_kernel_matrix",
    "sensitivity_map",
    "subsample",
    "synth_anm_pair",
    "synthetic_suite",
    "weighted_roc",
    "__version__",
]
