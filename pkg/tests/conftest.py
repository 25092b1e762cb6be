import numpy as np

from arkernel import TimeSeries


def random_series(rng, d: int, n: int, scale: float = 1.0) -> TimeSeries:
    return TimeSeries(scale * rng.normal(size=(d, n)))


def random_spd(rng, n: int, ridge: float = 0.0) -> np.ndarray:
    m = rng.normal(size=(n, n))
    out = m @ m.T
    out.flat[:: n + 1] += ridge
    return out
