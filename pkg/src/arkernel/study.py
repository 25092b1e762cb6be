"""Accuracy/speed trade-off sweep for the low-rank evaluation path."""

import time
from dataclasses import dataclass

import numpy as np

from .kernelized import (
    ApproxConfig,
    BaseKernelSpec,
    kernelized_dissimilarity,
    kernelized_dissimilarity_lowrank,
    median_bandwidth,
)
from .series import LabeledDataset

DEFAULT_TAUS = tuple(10.0**-k for k in range(8))  # 1e0 down to 1e-7


@dataclass
class StudyRow:
    tau: float
    mean_eval_seconds: float
    mean_rank1: float
    mean_rank2: float
    phi_gap_max: float
    phi_gap_fro: float
    kernel_gap_max: float
    kernel_gap_fro: float


def approx_tradeoff_study(
    ds: LabeledDataset,
    p: int,
    alpha: float,
    kappa1: BaseKernelSpec,
    kappa2: BaseKernelSpec,
    taus=DEFAULT_TAUS,
    bandwidth: float | None = None,
    cap: int = 50,
) -> tuple[list[StudyRow], float]:
    """Sweep the stopping tolerance and compare against the dense reference.

    Uses the first `cap` series of the dataset.  For each tolerance the
    full pairwise dissimilarity matrix is recomputed through the low-rank
    path and compared to the dense matrix in both the dissimilarity domain
    and the exponentiated kernel domain (max and Frobenius norms).  Timing
    covers kernel evaluations only, not dataset loading.
    """
    if len(ds) > cap:
        ds = ds.subset(range(cap))
    m = len(ds)
    pairs = [(i, j) for i in range(m) for j in range(i, m)]

    dense = np.zeros((m, m))
    for i, j in pairs:
        value = kernelized_dissimilarity(ds.series[i], ds.series[j], p, alpha, kappa1, kappa2)
        dense[i, j] = dense[j, i] = value
    if bandwidth is None:
        bandwidth = median_bandwidth(dense)

    rows = []
    for tau in taus:
        cfg = ApproxConfig(tau=tau, bandwidth=bandwidth)
        approx = np.zeros((m, m))
        ranks1, ranks2 = [], []
        start = time.perf_counter()
        for i, j in pairs:
            value, diag = kernelized_dissimilarity_lowrank(
                ds.series[i], ds.series[j], p, alpha, kappa1, kappa2, cfg
            )
            approx[i, j] = approx[j, i] = value
            ranks1.append(diag.rank1)
            ranks2.append(diag.rank2)
        elapsed = time.perf_counter() - start
        gap = dense - approx
        kernel_dense = np.exp(-dense / bandwidth)
        kernel_approx = np.exp(-approx / bandwidth)
        kernel_gap = kernel_approx - kernel_dense
        rows.append(
            StudyRow(
                tau=tau,
                mean_eval_seconds=elapsed / len(pairs),
                mean_rank1=float(np.mean(ranks1)),
                mean_rank2=float(np.mean(ranks2)),
                phi_gap_max=float(np.abs(gap).max()),
                phi_gap_fro=float(np.linalg.norm(gap)),
                kernel_gap_max=float(np.abs(kernel_gap).max()),
                kernel_gap_fro=float(np.linalg.norm(kernel_gap)),
            )
        )
    return rows, float(bandwidth)
