"""Pairwise matrix assembly over datasets, with text serialization."""

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArKernelError, EmptyDataset, MalformedManifest, PairEvaluationError
from .series import LabeledDataset


@dataclass
class KernelMatrix:
    """A symmetric matrix of kernel or dissimilarity values with provenance."""

    values: np.ndarray
    kernel: str = ""
    p: int | None = None
    alpha: float | None = None
    bandwidth: float | None = None


def gram_matrix(
    dataset: LabeledDataset,
    evaluator,
    kernel: str = "",
    p: int | None = None,
    alpha: float | None = None,
    bandwidth: float | None = None,
    workers: int = 1,
) -> KernelMatrix:
    """Evaluate a symmetric pair function over all dataset pairs.

    Only the upper triangle (diagonal included) is computed; the lower half
    is mirrored, never recomputed.  Worker count changes scheduling only,
    each value lands at its fixed (i, j) slot, so output is deterministic.
    Evaluator errors are re-raised with the offending pair attached.
    """
    m = len(dataset)
    if m == 0:
        raise EmptyDataset("cannot build a matrix over an empty dataset")
    pairs = [(i, j) for i in range(m) for j in range(i, m)]

    def run(pair):
        i, j = pair
        try:
            return evaluator(dataset.series[i], dataset.series[j])
        except ArKernelError as exc:
            raise PairEvaluationError(i, j, exc) from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, pairs))
    else:
        results = [run(pair) for pair in pairs]

    out = np.zeros((m, m))
    for (i, j), value in zip(pairs, results):
        out[i, j] = value
        out[j, i] = value
    return KernelMatrix(out, kernel=kernel, p=p, alpha=alpha, bandwidth=bandwidth)


def cross_matrix(
    rows: LabeledDataset, cols: LabeledDataset, evaluator, workers: int = 1
) -> np.ndarray:
    """Rectangular evaluator matrix between two datasets (rows x cols)."""
    pairs = [(i, j) for i in range(len(rows)) for j in range(len(cols))]

    def run(pair):
        i, j = pair
        try:
            return evaluator(rows.series[i], cols.series[j])
        except ArKernelError as exc:
            raise PairEvaluationError(i, j, exc) from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, pairs))
    else:
        results = [run(pair) for pair in pairs]
    return np.array(results).reshape(len(rows), len(cols))


def _fmt(value) -> str:
    return "none" if value is None else f"{value:.17g}"


def save_kernel_matrix(km: KernelMatrix, path, extra_comments: list[str] | None = None) -> None:
    buf = io.StringIO()
    header = (
        f"# kernel={km.kernel or 'unknown'}"
        f" p={'none' if km.p is None else km.p}"
        f" alpha={_fmt(km.alpha)}"
        f" bandwidth={_fmt(km.bandwidth)}"
    )
    buf.write(header + "\n")
    np.savetxt(buf, km.values, fmt="%.17g")
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def load_kernel_matrix(path) -> KernelMatrix:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# kernel="):
        raise MalformedManifest(f"{path}: missing kernel matrix header")
    fields = {}
    for token in lines[0][2:].split():
        key, _, value = token.partition("=")
        fields[key] = None if value == "none" else value
    data_lines = [ln for ln in lines[1:] if ln.strip() and not ln.startswith("#")]
    values = np.loadtxt(io.StringIO("\n".join(data_lines)), ndmin=2)
    return KernelMatrix(
        values,
        kernel=fields.get("kernel") or "",
        p=None if fields.get("p") is None else int(fields["p"]),
        alpha=None if fields.get("alpha") is None else float(fields["alpha"]),
        bandwidth=None if fields.get("bandwidth") is None else float(fields["bandwidth"]),
    )
