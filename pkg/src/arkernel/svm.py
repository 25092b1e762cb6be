"""Kernel SVM on precomputed matrices, one-vs-rest wrapper and model selection.

The binary solver is a two-variable coordinate ascent on the standard dual
soft-margin problem, with maximal-violating-pair working-set selection.
Problems here are desk scale (a few hundred points), so the full kernel
matrix is held densely and no shrinking is attempted.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import FoldTooSmall, SingleClassTraining
from .gram import cross_matrix, gram_matrix
from .kernelized import median_bandwidth
from .series import LabeledDataset

_QUAD_FLOOR = 1e-12
_MAX_ITER = 100_000


@dataclass
class SvmModel:
    """Trained binary machine: coef[i] = alpha_i * y_i over training points."""

    coef: np.ndarray
    bias: float
    C: float
    gram: np.ndarray
    kkt_residual: float
    objective_path: list[float] = field(default_factory=list)

    def decision_values(self, kernel_block: np.ndarray) -> np.ndarray:
        """Decision values for rows of kernel values against the training set."""
        block = np.atleast_2d(kernel_block)
        return block @ self.coef + self.bias


def svm_train(gram: np.ndarray, labels: np.ndarray, C: float, tol: float = 1e-3) -> SvmModel:
    """Solve the dual soft-margin problem on a precomputed kernel matrix.

    labels must be +1/-1.  Iterates two-variable updates on the maximal
    violating pair until the KKT gap drops to tol; deterministic given the
    input ordering.
    """
    K = np.asarray(gram, dtype=float)
    y = np.asarray(labels, dtype=float)
    n = y.size
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be +1 or -1")
    if np.all(y == y[0]):
        raise SingleClassTraining("all training labels are identical")

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of (1/2) a'Qa - sum(a) at a = 0
    pos = y > 0
    objective_path: list[float] = []
    m_val = big_m = 0.0
    for _ in range(_MAX_ITER):
        # dual objective of the maximization form, from the running gradient
        objective_path.append(-0.5 * float(alpha @ grad - alpha.sum()))
        minus_yg = -y * grad
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        up_vals = np.where(up, minus_yg, -np.inf)
        low_vals = np.where(low, minus_yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m_val = up_vals[i]
        big_m = low_vals[j]
        if m_val - big_m <= tol:
            break

        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0.0:
            quad = _QUAD_FLOOR
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        qi = y * K[:, i] * y[i]
        qj = y * K[:, j] * y[j]
        grad += qi * (alpha[i] - old_i) + qj * (alpha[j] - old_j)
    else:
        raise RuntimeError(f"SMO did not converge within {_MAX_ITER} iterations")

    bias = 0.5 * (m_val + big_m)
    return SvmModel(
        coef=alpha * y,
        bias=float(bias),
        C=C,
        gram=K,
        kkt_residual=float(m_val - big_m),
        objective_path=objective_path,
    )


def ovr_train(
    gram: np.ndarray, labels: np.ndarray, class_count: int, C: float, tol: float = 1e-3
) -> list[SvmModel]:
    """One binary machine per class (+1 for the class, -1 for the rest)."""
    if class_count < 2:
        raise ValueError("need at least two classes")
    labels = np.asarray(labels, dtype=int)
    models = []
    for cls in range(class_count):
        binary = np.where(labels == cls, 1.0, -1.0)
        models.append(svm_train(gram, binary, C, tol))
    return models


def ovr_predict(models: list[SvmModel], kernel_block: np.ndarray) -> np.ndarray:
    """argmax of per-class decision values; ties break to the lowest class."""
    block = np.atleast_2d(kernel_block)
    decisions = np.column_stack([m.decision_values(block) for m in models])
    return np.argmax(decisions, axis=1)


def stratified_folds(labels: np.ndarray, folds: int, seed: int = 0) -> np.ndarray:
    """Fold index per point; each class is shuffled then dealt round-robin.

    Requires at least two members per class so every held-in portion still
    contains every class.
    """
    labels = np.asarray(labels, dtype=int)
    if folds < 2:
        raise ValueError("need at least two folds")
    assignment = np.empty(labels.size, dtype=int)
    rng = np.random.default_rng(seed)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.size < 2:
            raise FoldTooSmall(
                f"class {cls} has {idx.size} member(s); stratified folds need >= 2"
            )
        rng.shuffle(idx)
        assignment[idx] = np.arange(idx.size) % folds
    return assignment


@dataclass(frozen=True)
class SelectionGrid:
    """Model-selection grid: box constraints and bandwidth multipliers."""

    c_values: tuple[float, ...] = (1.0, 10.0, 100.0)
    bandwidth_multipliers: tuple[float, ...] = (0.5, 1.0, 2.0)
    folds: int = 5


@dataclass
class GridCell:
    C: float
    multiplier: float
    bandwidth: float
    cv_error: float


@dataclass
class SelectionReport:
    kernel: str
    chosen_c: float
    chosen_multiplier: float
    chosen_bandwidth: float
    cv_error: float
    test_error: float
    wall_time_seconds: float
    median_dissimilarity: float
    cells: list[GridCell]


def _cv_error(
    kernel_values: np.ndarray,
    labels: np.ndarray,
    class_count: int,
    fold_of: np.ndarray,
    folds: int,
    C: float,
    tol: float,
) -> float:
    errors = []
    for k in range(folds):
        held = fold_of == k
        kept = ~held
        if not held.any():
            continue
        models = ovr_train(
            kernel_values[np.ix_(kept, kept)], labels[kept], class_count, C, tol
        )
        pred = ovr_predict(models, kernel_values[np.ix_(held, kept)])
        errors.append(float(np.mean(pred != labels[held])))
    return float(np.mean(errors))


def select_and_evaluate(
    train: LabeledDataset,
    test: LabeledDataset,
    evaluator,
    grid: SelectionGrid = SelectionGrid(),
    kernel: str = "",
    seed: int = 0,
    tol: float = 1e-3,
    workers: int = 1,
) -> SelectionReport:
    """Full benchmark protocol for one dissimilarity evaluator.

    Builds the training dissimilarity matrix once, derives candidate
    bandwidths from its off-diagonal median, grid-searches (C, bandwidth)
    by stratified cross-validation (ties prefer the smaller C, then the
    smaller bandwidth), retrains on the whole training fold and scores the
    held-out test set through the rectangular test-by-train matrix.
    """
    start = time.perf_counter()
    phi_train = gram_matrix(train, evaluator, kernel=kernel, workers=workers).values
    med = median_bandwidth(phi_train)
    if med <= 0.0:
        raise ValueError("median dissimilarity is not positive; no usable bandwidth")
    fold_of = stratified_folds(train.labels, grid.folds, seed)
    cells = []
    for mult in grid.bandwidth_multipliers:
        bandwidth = mult * med
        kernel_values = np.exp(-phi_train / bandwidth)
        for C in grid.c_values:
            err = _cv_error(
                kernel_values, train.labels, train.class_count, fold_of,
                grid.folds, C, tol,
            )
            cells.append(GridCell(C=C, multiplier=mult, bandwidth=bandwidth, cv_error=err))
    best = min(cells, key=lambda cell: (cell.cv_error, cell.C, cell.bandwidth))
    final_kernel = np.exp(-phi_train / best.bandwidth)
    models = ovr_train(final_kernel, train.labels, train.class_count, best.C, tol)
    phi_rect = cross_matrix(test, train, evaluator, workers=workers)
    pred = ovr_predict(models, np.exp(-phi_rect / best.bandwidth))
    test_error = float(np.mean(pred != test.labels))
    return SelectionReport(
        kernel=kernel,
        chosen_c=best.C,
        chosen_multiplier=best.multiplier,
        chosen_bandwidth=best.bandwidth,
        cv_error=best.cv_error,
        test_error=test_error,
        wall_time_seconds=time.perf_counter() - start,
        median_dissimilarity=med,
        cells=cells,
    )
