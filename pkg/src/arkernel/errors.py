"""Exception types shared across the package."""


class ArKernelError(Exception):
    """Base class for all errors raised by this package."""


class SeriesTooShort(ArKernelError):
    """A series has too few observations for the requested lag order."""


class DimensionMismatch(ArKernelError):
    """Series combined in one computation do not share the same dimension."""


class NotPositiveDefinite(ArKernelError):
    """A matrix expected to be symmetric positive definite failed to factor."""


class NonPositiveBandwidth(ArKernelError):
    """Bandwidth parameters must be strictly positive."""


class ShapeMismatch(ArKernelError):
    """Operands passed to a base kernel have incompatible shapes."""


class DegenerateScale(ArKernelError):
    """The median-distance heuristic collapsed to zero."""


class EmptyMatrix(ArKernelError):
    """A kernel matrix has no off-diagonal entries to take a median over."""


class NegativeDiagonal(ArKernelError):
    """The residual diagonal turned negative: the column oracle is not PSD."""


class MalformedManifest(ArKernelError):
    """A dataset manifest is unreadable or references missing files."""


class EmptyDataset(ArKernelError):
    """A dataset contains no series."""


class SingleClassTraining(ArKernelError):
    """Binary SVM training needs both labels present."""


class FoldTooSmall(ArKernelError):
    """Stratified cross-validation cannot place every class in every fold."""


class PairEvaluationError(ArKernelError):
    """An evaluator failed on a specific dataset pair."""

    def __init__(self, i: int, j: int, cause: Exception):
        super().__init__(f"kernel evaluation failed for pair ({i}, {j}): {cause}")
        self.pair = (i, j)
