import math

import numpy as np
import pytest

from arkernel import NotPositiveDefinite, logdet_spd, spectral_radius
from conftest import random_spd


def test_logdet_identity():
    assert logdet_spd(np.eye(3)) == 0.0


def test_logdet_diagonal():
    assert logdet_spd(np.diag([2.0, 2.0])) == pytest.approx(2 * math.log(2), rel=1e-14)


def test_logdet_eigendecomposition_oracle():
    rng = np.random.default_rng(7)
    for _ in range(5):
        spd = random_spd(rng, 5, ridge=1.0)
        expected = float(np.sum(np.log(np.linalg.eigvalsh(spd))))
        assert logdet_spd(spd) == pytest.approx(expected, rel=1e-10)


def test_logdet_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        logdet_spd(-np.eye(2))
    with pytest.raises(NotPositiveDefinite):
        logdet_spd(np.zeros((2, 3)))


def test_spectral_radius_small():
    a = np.array([[0.0, 1.0], [-1.0, 0.0]])  # eigenvalues +-i
    assert spectral_radius(a) == pytest.approx(1.0, abs=1e-12)


def test_spectral_radius_large_matches_dense():
    rng = np.random.default_rng(8)
    a = rng.normal(size=(300, 300))
    a[rng.random((300, 300)) > 0.05] = 0.0
    dense = float(np.abs(np.linalg.eigvals(a)).max())
    assert spectral_radius(a) == pytest.approx(dense, rel=1e-6)
