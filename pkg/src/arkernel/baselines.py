"""Baseline time-series kernels: bag of vectors and global alignment.

Both are normalized into the shared exp(-dissimilarity / bandwidth) form so
the same median-based bandwidth selection applies to every kernel in the
benchmark.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScale, DimensionMismatch, NonPositiveBandwidth
from .kernelized import BaseKernelSpec
from .series import TimeSeries


@dataclass(frozen=True)
class BovParams:
    base: BaseKernelSpec
    bandwidth: float


@dataclass(frozen=True)
class GaParams:
    base: BaseKernelSpec
    bandwidth: float


def _cross_base(spec: BaseKernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a, b: observations as rows
    if spec.kind == "linear":
        return a @ b.T
    sa = np.einsum("ij,ij->i", a, a)
    sb = np.einsum("ij,ij->i", b, b)
    d2 = sa[:, None] + sb[None, :] - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-d2 / (2.0 * spec.sigma_sq))


def bag_mean_kernel(x: TimeSeries, x_prime: TimeSeries, base: BaseKernelSpec) -> float:
    """Mean base-kernel value over all observation pairs, order ignored."""
    if x.d != x_prime.d:
        raise DimensionMismatch(f"series dimensions differ: {x.d} vs {x_prime.d}")
    return float(_cross_base(base, x.values.T, x_prime.values.T).mean())


def bov_dissimilarity(x: TimeSeries, x_prime: TimeSeries, base: BaseKernelSpec) -> float:
    """Squared mean-embedding distance between the two bags of observations.

    psi(x,x) + psi(x',x') - 2 psi(x,x'); nonnegative for a positive
    definite base kernel (clamped against rounding dust).
    """
    value = (
        bag_mean_kernel(x, x, base)
        + bag_mean_kernel(x_prime, x_prime, base)
        - 2.0 * bag_mean_kernel(x, x_prime, base)
    )
    return max(value, 0.0)


def bov_kernel(x: TimeSeries, x_prime: TimeSeries, params: BovParams) -> float:
    """exp(-D / t) with D the bag distance; lies in (0, 1], and equals 1
    exactly when the two bag embeddings coincide."""
    if params.bandwidth <= 0.0:
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {params.bandwidth}")
    return math.exp(-bov_dissimilarity(x, x_prime, params.base) / params.bandwidth)


def alignment_log_score(x: TimeSeries, x_prime: TimeSeries, base: BaseKernelSpec) -> float:
    """Log of the soft count of all monotone alignments, weighted by the base kernel.

    Dynamic program M(0,0) = 1, borders 0, and
    M(i,j) = k(x_i, x'_j) * (M(i-1,j-1) + M(i-1,j) + M(i,j-1)); returns
    log M(n, n').  Each anti-diagonal is rescaled by its maximum with the
    log scale carried separately, so long series neither overflow nor
    underflow.  With a base kernel identically one, M counts the
    alignments (a Delannoy-style lattice-path count).
    """
    if x.d != x_prime.d:
        raise DimensionMismatch(f"series dimensions differ: {x.d} vs {x_prime.d}")
    kmat = _cross_base(base, x.values.T, x_prime.values.T)
    n, n_prime = kmat.shape
    # Anti-diagonal s holds cells (i, s - i); arrays are indexed by i with
    # index 0 covering the zero border row.
    prev2 = np.zeros(n + 1)
    prev2[0] = 1.0  # the single seed cell M(0, 0)
    prev = np.zeros(n + 1)
    log_prev2 = 0.0
    log_prev = 0.0
    for s in range(2, n + n_prime + 1):
        lo = max(1, s - n_prime)
        hi = min(n, s - 1)
        i = np.arange(lo, hi + 1)
        cur = np.zeros(n + 1)
        carry = math.exp(log_prev2 - log_prev)
        cur[i] = kmat[i - 1, s - i - 1] * (prev[i] + prev[i - 1] + carry * prev2[i - 1])
        peak = float(cur.max())
        if peak > 0.0:
            cur /= peak
            log_cur = log_prev + math.log(peak)
        else:
            log_cur = log_prev
        prev2, prev = prev, cur
        log_prev2, log_prev = log_prev, log_cur
    final = float(prev[n])
    if final <= 0.0:
        raise DegenerateScale("alignment score is not positive; log undefined")
    return math.log(final) + log_prev


def ga_dissimilarity(x: TimeSeries, x_prime: TimeSeries, base: BaseKernelSpec) -> float:
    """Log-score self-similarity minus cross-similarity, always >= 0.

    (s(x,x) + s(x',x')) / 2 - s(x,x') is nonnegative by Cauchy-Schwarz in
    the alignment kernel's feature space; rounding dust is clamped.
    """
    value = 0.5 * (
        alignment_log_score(x, x, base) + alignment_log_score(x_prime, x_prime, base)
    ) - alignment_log_score(x, x_prime, base)
    return max(value, 0.0)


def ga_kernel(x: TimeSeries, x_prime: TimeSeries, params: GaParams) -> float:
    if params.bandwidth <= 0.0:
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {params.bandwidth}")
    return math.exp(-ga_dissimilarity(x, x_prime, params.base) / params.bandwidth)


__all__ = [
    "BovParams",
    "GaParams",
    "bag_mean_kernel",
    "bov_dissimilarity",
    "bov_kernel",
    "alignment_log_score",
    "ga_dissimilarity",
    "ga_kernel",
]
