"""Autoregressive kernels for variable-length multivariate time series.

Dense log-determinant formulations, a kernelized extension over arbitrary
base kernels with bound-controlled low-rank approximation, baseline
time-series kernels, and an SVM benchmark harness.
"""

from .ar import (
    ArParams,
    PairContext,
    ar_dissimilarity,
    ar_log_kernel,
    ar_log_kernel_gram,
    ar_log_kernel_variance,
    exp_kernel,
    hilbert_distance_sq,
    length_constant,
)
from .baselines import (
    BovParams,
    GaParams,
    alignment_log_score,
    bag_mean_kernel,
    bov_dissimilarity,
    bov_kernel,
    ga_dissimilarity,
    ga_kernel,
)
from .dataio import load_dataset, save_dataset
from .errors import (
    ArKernelError,
    DegenerateScale,
    DimensionMismatch,
    EmptyDataset,
    EmptyMatrix,
    FoldTooSmall,
    MalformedManifest,
    NegativeDiagonal,
    NonPositiveBandwidth,
    NotPositiveDefinite,
    PairEvaluationError,
    SeriesTooShort,
    ShapeMismatch,
    SingleClassTraining,
)
from .gram import (
    KernelMatrix,
    cross_matrix,
    gram_matrix,
    load_kernel_matrix,
    save_kernel_matrix,
)
from .kernelized import (
    ApproxConfig,
    BaseKernelSpec,
    LowRankDiagnostics,
    LowRankFactor,
    base_kernel_eval,
    incomplete_cholesky,
    kernelized_dissimilarity,
    kernelized_dissimilarity_lowrank,
    logdet_lowrank,
    median_bandwidth,
    median_heuristic_sigma_sq,
    regularized_logdet,
    stopping_thresholds,
    two_factorizations,
    weighted_logdet_pair,
)
from .linalg import logdet_spd, spectral_radius
from .series import (
    LabeledDataset,
    LaggedDesign,
    TimeSeries,
    build_lagged,
    pair_weights,
)
from .study import StudyRow, approx_tradeoff_study
from .svm import (
    GridCell,
    SelectionGrid,
    SelectionReport,
    SvmModel,
    ovr_predict,
    ovr_train,
    select_and_evaluate,
    stratified_folds,
    svm_train,
)
from .toy import (
    ToyModelSpec,
    draw_transition_matrices,
    generate_toy_dataset,
    generate_toy_split,
)

__version__ = "0.1.0"
