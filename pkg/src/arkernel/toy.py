"""Sparse-transition VAR(1) generator for the two-class toy benchmark."""

from dataclasses import dataclass

import numpy as np

from .linalg import spectral_radius
from .series import LabeledDataset, TimeSeries


@dataclass(frozen=True)
class ToyModelSpec:
    """Parameters of the random VAR(1) class models.

    Each class gets a sparse transition matrix with standard-normal entries
    at the given density, rescaled so its spectral radius hits
    spectral_target.  Series start uniformly in [-init_range, init_range]^d
    and evolve with isotropic Gaussian innovation noise.
    """

    d: int
    n: int
    density: float = 0.1
    noise_variance: float = 0.1
    spectral_target: float = 1.0
    init_range: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.n < 2:
            raise ValueError("need d >= 1 and n >= 2")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")
        if self.noise_variance <= 0.0:
            raise ValueError("noise_variance must be positive")
        if not 0.0 < self.spectral_target <= 1.0:
            raise ValueError("spectral_target must lie in (0, 1]")
        if self.init_range <= 0.0:
            raise ValueError("init_range must be positive")


def draw_transition_matrices(spec: ToyModelSpec, class_count: int, rng) -> list[np.ndarray]:
    """One sparse random transition matrix per class, rescaled in place.

    Entries are independently nonzero with probability spec.density and
    standard normal where present.  Each matrix is divided by its spectral
    radius and multiplied by spec.spectral_target, so the rescaled radius
    equals the target (an all-zero draw is left untouched).
    """
    mats = []
    for _ in range(class_count):
        a = rng.standard_normal((spec.d, spec.d))
        a[rng.random((spec.d, spec.d)) >= spec.density] = 0.0
        radius = spectral_radius(a)
        if radius > 0.0:
            a *= spec.spectral_target / radius
        mats.append(a)
    return mats


def _simulate(a: np.ndarray, spec: ToyModelSpec, rng) -> np.ndarray:
    d = spec.d
    out = np.empty((d, spec.n))
    out[:, 0] = rng.uniform(-spec.init_range, spec.init_range, size=d)
    noise_sd = np.sqrt(spec.noise_variance)
    for t in range(1, spec.n):
        out[:, t] = a @ out[:, t - 1] + rng.normal(0.0, noise_sd, size=d)
    return out


def generate_toy_dataset(
    spec: ToyModelSpec, num_per_class: int, class_count: int = 2
) -> LabeledDataset:
    """Draw num_per_class series for each of class_count VAR(1) models.

    Deterministic given spec.seed: the transition matrices are drawn first,
    then the series class by class from the same stream.
    """
    rng = np.random.default_rng(spec.seed)
    mats = draw_transition_matrices(spec, class_count, rng)
    series, labels = [], []
    for label, a in enumerate(mats):
        for _ in range(num_per_class):
            series.append(TimeSeries(_simulate(a, spec, rng)))
            labels.append(label)
    return LabeledDataset(series, labels, class_count)


def generate_toy_split(
    spec: ToyModelSpec,
    train_per_class: int,
    test_per_class: int,
    class_count: int = 2,
) -> tuple[LabeledDataset, LabeledDataset]:
    """Matched train/test datasets drawn from one set of class models."""
    rng = np.random.default_rng(spec.seed)
    mats = draw_transition_matrices(spec, class_count, rng)
    splits = []
    for per_class in (train_per_class, test_per_class):
        series, labels = [], []
        for label, a in enumerate(mats):
            for _ in range(per_class):
                series.append(TimeSeries(_simulate(a, spec, rng)))
                labels.append(label)
        splits.append(LabeledDataset(series, labels, class_count))
    return splits[0], splits[1]
