"""Time-series containers, lagged-design construction and pair weights."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyDataset, SeriesTooShort


class TimeSeries:
    """A d x n real matrix holding one observation per column.

    Entries must be finite.  The array is copied on construction and made
    read-only, so instances can be shared freely across workers.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"a time series must be a d x n matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("time series entries must be finite")
        arr.setflags(write=False)
        self.values = arr

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __repr__(self):
        return f"TimeSeries(d={self.d}, n={self.n})"


class LabeledDataset:
    """An ordered collection of series sharing a dimension, with class labels."""

    __slots__ = ("series", "labels", "class_count")

    def __init__(self, series, labels, class_count: int | None = None):
        series = tuple(series)
        labels = np.asarray(labels, dtype=int)
        if len(series) == 0:
            raise EmptyDataset("a dataset needs at least one series")
        if labels.shape != (len(series),):
            raise ValueError("labels must align one-to-one with series")
        d = series[0].d
        for idx, ts in enumerate(series):
            if ts.d != d:
                raise DimensionMismatch(
                    f"series {idx} has dimension {ts.d}, expected {d}"
                )
        if labels.min() < 0:
            raise ValueError("labels must be nonnegative")
        if class_count is None:
            class_count = int(labels.max()) + 1
        if class_count < 1 or labels.max() >= class_count:
            raise ValueError("every label must lie in [0, class_count)")
        labels.setflags(write=False)
        self.series = series
        self.labels = labels
        self.class_count = int(class_count)

    @property
    def d(self) -> int:
        return self.series[0].d

    def __len__(self) -> int:
        return len(self.series)

    def subset(self, indices) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=int)
        return LabeledDataset(
            [self.series[i] for i in indices], self.labels[indices], self.class_count
        )


@dataclass(frozen=True)
class LaggedDesign:
    """Lag windows X (pd x (n-p)) and responses Y (d x (n-p)) of one series."""

    X: np.ndarray
    Y: np.ndarray
    p: int


def build_lagged(x: TimeSeries, p: int) -> LaggedDesign:
    """Stack the p-step lag windows of a series next to their responses.

    Column j of X is the vertical stack of observations j, ..., j+p-1
    (earliest at the top); column j of Y is observation p+j.
    """
    if p < 1:
        raise ValueError("lag order must be at least 1")
    if x.n <= p:
        raise SeriesTooShort(f"need more than p={p} observations, got n={x.n}")
    d, cols = x.d, x.n - p
    v = x.values
    X = np.empty((p * d, cols))
    for k in range(p):
        X[k * d : (k + 1) * d, :] = v[:, k : k + cols]
    Y = v[:, p:].copy()
    return LaggedDesign(X=X, Y=Y, p=p)


def pair_weights(n: int, n_prime: int, p: int) -> np.ndarray:
    """Diagonal averaging weights for the joint sample of a series pair.

    The first n-p entries are 1/(2(n-p)), the remaining n'-p entries are
    1/(2(n'-p)); each series contributes half of the total mass, so the
    entries sum to one.
    """
    if n <= p or n_prime <= p:
        raise SeriesTooShort(f"both lengths must exceed p={p}, got {n} and {n_prime}")
    w = np.empty(n + n_prime - 2 * p)
    w[: n - p] = 0.5 / (n - p)
    w[n - p :] = 0.5 / (n_prime - p)
    return w
