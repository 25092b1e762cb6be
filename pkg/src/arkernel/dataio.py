"""Text-based dataset storage.

A dataset is a directory with a `manifest.tsv` listing one
`<relative_path>\t<integer_label>` line per series.  Each series file is
plain text with one time step per line and d whitespace-separated decimal
values per line (rows on disk become columns in memory).  The writer emits
17 significant digits so round-trips are exact.
"""

from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, EmptyDataset, MalformedManifest
from .series import LabeledDataset, TimeSeries

MANIFEST_NAME = "manifest.tsv"


def save_dataset(ds: LabeledDataset, path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    lines = []
    for idx, (ts, label) in enumerate(zip(ds.series, ds.labels)):
        rel = f"series_{idx:05d}.txt"
        rows = (" ".join(f"{v:.17g}" for v in col) for col in ts.values.T)
        (root / rel).write_text("\n".join(rows) + "\n", encoding="utf-8")
        lines.append(f"{rel}\t{int(label)}")
    (root / MANIFEST_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_series_file(path: Path) -> TimeSeries:
    rows = []
    width = None
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise MalformedManifest(f"{path}:{lineno}: unparsable value: {exc}") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MalformedManifest(
                f"{path}:{lineno}: expected {width} values per line, got {len(row)}"
            )
        rows.append(row)
    if not rows:
        raise MalformedManifest(f"{path}: series file holds no observations")
    return TimeSeries(np.asarray(rows, dtype=float).T)


def load_dataset(path) -> LabeledDataset:
    root = Path(path)
    manifest = root / MANIFEST_NAME
    if not manifest.is_file():
        raise MalformedManifest(f"missing {manifest}")
    series, labels = [], []
    for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MalformedManifest(f"{manifest}:{lineno}: expected <path>\\t<label>")
        rel, label_text = parts
        try:
            label = int(label_text)
        except ValueError as exc:
            raise MalformedManifest(f"{manifest}:{lineno}: bad label {label_text!r}") from exc
        if label < 0:
            raise MalformedManifest(f"{manifest}:{lineno}: labels must be nonnegative")
        target = root / rel
        if not target.is_file():
            raise MalformedManifest(f"{manifest}:{lineno}: missing series file {target}")
        series.append(_read_series_file(target))
        labels.append(label)
    if not series:
        raise EmptyDataset(f"{manifest} lists no series")
    dims = {ts.d for ts in series}
    if len(dims) > 1:
        raise DimensionMismatch(f"series dimensions differ: {sorted(dims)}")
    return LabeledDataset(series, labels)
