import math

import numpy as np
import pytest

from arkernel import (
    ApproxConfig,
    ArParams,
    BaseKernelSpec,
    DegenerateScale,
    EmptyMatrix,
    LabeledDataset,
    NegativeDiagonal,
    ShapeMismatch,
    TimeSeries,
    ar_dissimilarity,
    base_kernel_eval,
    incomplete_cholesky,
    kernelized_dissimilarity,
    kernelized_dissimilarity_lowrank,
    logdet_lowrank,
    logdet_spd,
    median_bandwidth,
    median_heuristic_sigma_sq,
    stopping_thresholds,
    two_factorizations,
    weighted_logdet_pair,
)
from arkernel.kernelized import pair_feature_rows
from conftest import random_series, random_spd

GAUSS_W = BaseKernelSpec("gaussian", 2.0, arity="window")
GAUSS_P = BaseKernelSpec("gaussian", 2.0, arity="point")
LIN_W = BaseKernelSpec("linear", arity="window")
LIN_P = BaseKernelSpec("linear", arity="point")


def test_base_kernel_spec_validation():
    with pytest.raises(ValueError):
        BaseKernelSpec("gaussian")
    with pytest.raises(ValueError):
        BaseKernelSpec("gaussian", -1.0)
    with pytest.raises(ValueError):
        BaseKernelSpec("poly")


def test_base_kernel_eval():
    g = BaseKernelSpec("gaussian", 2.0)
    u = np.array([1.0, 0.0])
    assert base_kernel_eval(g, u, u) == 1.0
    v = np.array([3.0, 0.0])  # squared distance 4 = 2 sigma_sq
    assert base_kernel_eval(g, u, v) == pytest.approx(math.exp(-1.0), rel=1e-15)
    lin = BaseKernelSpec("linear")
    assert base_kernel_eval(lin, [1.0, 0.0], [1.0, 0.0]) == 1.0
    with pytest.raises(ShapeMismatch):
        base_kernel_eval(lin, [1.0], [1.0, 2.0])


def test_linear_base_matches_dense_formulation():
    rng = np.random.default_rng(30)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        p = int(rng.integers(1, 3))
        a = random_series(rng, d, int(rng.integers(p + 1, 12)))
        b = random_series(rng, d, int(rng.integers(p + 1, 12)))
        alpha = float(rng.uniform(0.2, 1.0))
        phi = ar_dissimilarity(a, b, ArParams(p=p, alpha=alpha))
        phik = kernelized_dissimilarity(a, b, p, alpha, LIN_W, LIN_P)
        assert phik == pytest.approx(phi, rel=1e-8)


def test_identical_windows_closed_form():
    # n = n' = p + 1 with x = x': both Gram matrices are all-ones, so the
    # value is 2 log 2 + (1-a) log|J + 2I| + a log|2J + 2I| = hand values
    x = TimeSeries(np.array([[0.3, -1.2], [2.0, 0.5]]))
    for alpha in (0.5, 0.3):
        value = kernelized_dissimilarity(x, x, 1, alpha, GAUSS_W, GAUSS_P)
        expected = 2 * math.log(2) + (1 - alpha) * math.log(8) + alpha * math.log(12)
        assert value == pytest.approx(expected, rel=1e-12)


def test_kernelized_self_distance_nonnegative():
    rng = np.random.default_rng(31)
    for _ in range(10):
        a = random_series(rng, 2, 6)
        b = random_series(rng, 2, 8)
        cross = kernelized_dissimilarity(a, b, 1, 0.5, GAUSS_W, GAUSS_P)
        self_a = kernelized_dissimilarity(a, a, 1, 0.5, GAUSS_W, GAUSS_P)
        self_b = kernelized_dissimilarity(b, b, 1, 0.5, GAUSS_W, GAUSS_P)
        assert cross - 0.5 * (self_a + self_b) >= -1e-9
        assert cross == pytest.approx(
            kernelized_dissimilarity(b, a, 1, 0.5, GAUSS_W, GAUSS_P), abs=1e-12
        )


# --- median heuristics -------------------------------------------------


def test_median_sigma_sq_single_pair():
    a = TimeSeries(np.array([[0.0], [0.0]]))
    b = TimeSeries(np.array([[3.0], [0.0]]))
    ds = LabeledDataset([a, b], [0, 1])
    assert median_heuristic_sigma_sq(ds) == pytest.approx(3.0, rel=1e-15)


def test_median_sigma_sq_degenerate():
    a = TimeSeries(np.ones((2, 3)))
    ds = LabeledDataset([a, a], [0, 1])
    with pytest.raises(DegenerateScale):
        median_heuristic_sigma_sq(ds)


def test_median_sigma_sq_exhaustive_oracle():
    rng = np.random.default_rng(32)
    series = [random_series(rng, 3, int(rng.integers(2, 6))) for _ in range(5)]
    ds = LabeledDataset(series, [0, 1, 0, 1, 0])
    pooled = np.hstack([s.values for s in series]).T
    dists = []
    for i in range(pooled.shape[0]):
        for j in range(i + 1, pooled.shape[0]):
            dists.append(float(np.linalg.norm(pooled[i] - pooled[j])))
    assert median_heuristic_sigma_sq(ds) == pytest.approx(
        float(np.median(dists)), rel=1e-12
    )


def test_median_sigma_sq_cap_deterministic():
    rng = np.random.default_rng(33)
    series = [random_series(rng, 2, 4) for _ in range(8)]
    ds = LabeledDataset(series, [0] * 8)
    a = median_heuristic_sigma_sq(ds, sample_cap=3, seed=5)
    b = median_heuristic_sigma_sq(ds, sample_cap=3, seed=5)
    assert a == b


def test_median_bandwidth():
    m = np.array([[0.0, 7.0], [7.0, 0.0]])
    assert median_bandwidth(m) == 7.0
    assert median_bandwidth(np.full((3, 3), 4.2)) == 4.2
    rng = np.random.default_rng(34)
    sym = random_spd(rng, 5)
    off = sorted(sym[~np.eye(5, dtype=bool)])
    assert median_bandwidth(sym) == pytest.approx(float(np.median(off)), rel=1e-15)
    with pytest.raises(EmptyMatrix):
        median_bandwidth(np.ones((1, 1)))


# --- incomplete Cholesky ------------------------------------------------


def test_ic_rank_one_target():
    rng = np.random.default_rng(35)
    v = rng.normal(size=7)
    k = np.outer(v, v)
    factor = incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 1e-12)
    assert factor.rank == 1
    assert factor.residual_trace <= 1e-12


def test_ic_identity_exact():
    k = np.eye(3)
    factor = incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 0.0)
    assert factor.rank == 3
    assert np.array_equal(factor.g @ factor.g.T, np.eye(3))


def test_ic_dense_reconstruction():
    rng = np.random.default_rng(36)
    k = random_spd(rng, 20)
    factor = incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 1e-12)
    err = np.linalg.norm(k - factor.g @ factor.g.T)
    assert err <= 1e-10 * np.linalg.norm(k)


def test_ic_partial_factor_stays_below_target():
    rng = np.random.default_rng(37)
    k = random_spd(rng, 12)
    factor = incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 0.0, max_rank=5)
    assert factor.rank == 5
    residual = k - factor.g @ factor.g.T
    eigs = np.linalg.eigvalsh(residual)
    assert eigs.min() >= -1e-9 * np.linalg.norm(k)
    assert factor.residual_trace == pytest.approx(np.trace(residual), abs=1e-9)


def test_ic_residual_trace_nonincreasing():
    rng = np.random.default_rng(38)
    k = random_spd(rng, 15)
    factor = incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 0.0)
    traces = [np.trace(k)]
    for m in range(1, factor.rank + 1):
        g = factor.g[:, :m]
        traces.append(np.trace(k - g @ g.T))
    assert all(b <= a + 1e-12 for a, b in zip(traces, traces[1:]))


def test_ic_rejects_indefinite_oracle():
    k = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
    with pytest.raises(NegativeDiagonal):
        incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 0.0)


def test_ic_pivot_ties_take_lowest_index():
    k = np.eye(4)
    factor = incomplete_cholesky(lambda j: k[:, j], np.diag(k).copy(), 0.0)
    assert factor.pivots == (0, 1, 2, 3)


# --- shared-cache double factorization ----------------------------------


def test_two_factorizations_cache_equivalence():
    rng = np.random.default_rng(39)
    for _ in range(10):
        a = random_series(rng, 2, int(rng.integers(3, 9)))
        b = random_series(rng, 2, int(rng.integers(3, 9)))
        cached = two_factorizations(a, b, 2, GAUSS_W, GAUSS_P, (1e-8, 1e-8))
        plain = two_factorizations(
            a, b, 2, GAUSS_W, GAUSS_P, (1e-8, 1e-8), use_cache=False
        )
        for f1, f2 in zip(cached, plain):
            assert np.array_equal(f1.g, f2.g)
            assert f1.pivots == f2.pivots
            assert f1.residual_trace == f2.residual_trace


def test_two_factorizations_counter_smaller_with_cache():
    rng = np.random.default_rng(40)
    a = random_series(rng, 2, 6)
    b = random_series(rng, 2, 7)
    stats_cached, stats_plain = {}, {}
    f1, f2 = two_factorizations(
        a, b, 2, GAUSS_W, GAUSS_P, (0.0, 0.0), stats=stats_cached
    )
    two_factorizations(
        a, b, 2, GAUSS_W, GAUSS_P, (0.0, 0.0), use_cache=False, stats=stats_plain
    )
    overlap = set(f1.pivots) & set(f2.pivots)
    assert stats_plain["kappa1_evaluations"] == f1.rank + f2.rank
    assert stats_cached["kappa1_evaluations"] == len(set(f1.pivots) | set(f2.pivots))
    assert overlap  # full factorizations must share pivots
    assert stats_cached["kappa1_evaluations"] < stats_plain["kappa1_evaluations"]


def test_two_factorizations_zero_threshold_reconstructs():
    rng = np.random.default_rng(41)
    a = random_series(rng, 2, 6)
    b = random_series(rng, 2, 8)
    ctx, windows, points = pair_feature_rows(a, b, 2)
    from arkernel.kernelized import _base_gram

    k1 = _base_gram(GAUSS_W, windows)
    k2 = _base_gram(GAUSS_P, points)
    f1, f2 = two_factorizations(a, b, 2, GAUSS_W, GAUSS_P, (0.0, 0.0))
    assert np.linalg.norm(k1 - f1.g @ f1.g.T) <= 1e-10 * np.linalg.norm(k1)
    target2 = k1 + k2
    assert np.linalg.norm(target2 - f2.g @ f2.g.T) <= 1e-10 * np.linalg.norm(target2)


# --- low-rank log-determinants ------------------------------------------


def test_logdet_lowrank_zero_factor():
    delta = np.array([0.5, 0.5])
    factor_zero = incomplete_cholesky(lambda j: np.zeros(2), np.zeros(2), 0.0)
    assert factor_zero.rank == 0
    assert logdet_lowrank(factor_zero, delta) == pytest.approx(2 * math.log(2), rel=1e-15)


def test_logdet_lowrank_hand_value():
    from arkernel.kernelized import LowRankFactor

    factor = LowRankFactor(np.array([[1.0], [1.0]]), (0,), 0.0)
    delta = np.array([0.5, 0.5])
    assert logdet_lowrank(factor, delta) == pytest.approx(math.log(8), rel=1e-14)


def test_logdet_lowrank_matches_dense():
    rng = np.random.default_rng(42)
    from arkernel.kernelized import LowRankFactor

    for _ in range(10):
        n, m = 8, 3
        g = rng.normal(size=(n, m))
        delta = rng.uniform(0.1, 1.0, size=n)
        factor = LowRankFactor(g, tuple(range(m)), 0.0)
        dense = g @ g.T + np.diag(1.0 / delta)
        assert logdet_lowrank(factor, delta) == pytest.approx(
            logdet_spd(dense), rel=1e-10
        )


# --- the mixed log-determinant objective --------------------------------


def test_weighted_logdet_pair_monotone():
    rng = np.random.default_rng(43)
    delta = np.full(6, 0.25)
    for _ in range(20):
        q = random_spd(rng, 6)
        r = random_spd(rng, 6)
        bump = random_spd(rng, 6, ridge=0.05)
        base = weighted_logdet_pair(q, r, 0.5, delta)
        assert weighted_logdet_pair(q + bump, r, 0.5, delta) > base
        assert weighted_logdet_pair(q, r + bump, 0.5, delta) > base


def test_weighted_logdet_pair_concave():
    rng = np.random.default_rng(44)
    delta = np.full(6, 0.25)
    for _ in range(20):
        q1, r1 = random_spd(rng, 6), random_spd(rng, 6)
        q2, r2 = random_spd(rng, 6), random_spd(rng, 6)
        f1 = weighted_logdet_pair(q1, r1, 0.5, delta)
        f2 = weighted_logdet_pair(q2, r2, 0.5, delta)
        for theta in (0.25, 0.5, 0.75):
            mid = weighted_logdet_pair(
                theta * q1 + (1 - theta) * q2, theta * r1 + (1 - theta) * r2, 0.5, delta
            )
            assert mid >= theta * f1 + (1 - theta) * f2 - 1e-10


# --- low-rank dissimilarity with early stopping --------------------------


def test_lowrank_full_rank_matches_dense():
    rng = np.random.default_rng(45)
    for _ in range(8):
        a = random_series(rng, 2, int(rng.integers(3, 9)))
        b = random_series(rng, 2, int(rng.integers(3, 9)))
        dense = kernelized_dissimilarity(a, b, 2, 0.5, GAUSS_W, GAUSS_P)
        cfg = ApproxConfig(tau=1e-12, bandwidth=1.0)
        approx, diag = kernelized_dissimilarity_lowrank(
            a, b, 2, 0.5, GAUSS_W, GAUSS_P, cfg
        )
        assert approx == pytest.approx(dense, abs=1e-8 * max(1.0, abs(dense)))
        assert not diag.rank_cap_reached


def test_lowrank_underestimates_dense():
    rng = np.random.default_rng(46)
    for _ in range(10):
        a = random_series(rng, 2, int(rng.integers(4, 12)))
        b = random_series(rng, 2, int(rng.integers(4, 12)))
        dense = kernelized_dissimilarity(a, b, 2, 0.5, GAUSS_W, GAUSS_P)
        cfg = ApproxConfig(tau=0.5, bandwidth=2.0)
        approx, _ = kernelized_dissimilarity_lowrank(a, b, 2, 0.5, GAUSS_W, GAUSS_P, cfg)
        assert approx <= dense + 1e-10


def test_lowrank_diagnostics_thresholds():
    rng = np.random.default_rng(47)
    a = random_series(rng, 2, 8)
    b = random_series(rng, 2, 10)
    cfg = ApproxConfig(tau=1e-2, bandwidth=1.5)
    _, diag = kernelized_dissimilarity_lowrank(a, b, 2, 0.5, GAUSS_W, GAUSS_P, cfg)
    t1, t2 = stopping_thresholds(a.n, b.n, 2, 0.5, 1e-2, 1.5)
    assert diag.threshold1 == t1 and diag.threshold2 == t2
    assert diag.residual_trace1 <= t1 and diag.residual_trace2 <= t2
    n_joint = a.n + b.n - 4
    assert 0 <= diag.rank1 <= n_joint and 0 <= diag.rank2 <= n_joint
    assert not diag.rank_cap_reached
    assert any(line.startswith("rank1=") for line in diag.lines())


def test_lowrank_rank_cap_flag():
    rng = np.random.default_rng(48)
    a = random_series(rng, 2, 10)
    b = random_series(rng, 2, 10)
    cfg = ApproxConfig(tau=1e-10, bandwidth=0.1, max_rank=2)
    _, diag = kernelized_dissimilarity_lowrank(a, b, 2, 0.5, GAUSS_W, GAUSS_P, cfg)
    assert diag.rank_cap_reached
    assert diag.rank1 <= 2 and diag.rank2 <= 2


def test_lowrank_ratio_bound_diagnostic():
    rng = np.random.default_rng(49)
    a = random_series(rng, 2, 8)
    b = random_series(rng, 2, 8)
    dense = kernelized_dissimilarity(a, b, 2, 0.5, GAUSS_W, GAUSS_P)
    cfg = ApproxConfig(tau=0.5, bandwidth=1.0)
    approx, diag = kernelized_dissimilarity_lowrank(
        a, b, 2, 0.5, GAUSS_W, GAUSS_P, cfg, compute_ratio_bound=True
    )
    true_ratio = math.exp(dense - approx) - 1.0
    assert diag.ratio_bound is not None
    assert diag.ratio_bound >= true_ratio - 1e-12


def test_simplified_bound_dominates_true_ratio():
    # at every rank, the uniform-gradient bound must cover the actual gap
    rng = np.random.default_rng(50)
    from arkernel.kernelized import _base_gram

    a = random_series(rng, 2, 9)
    b = random_series(rng, 2, 7)
    p, alpha = 2, 0.5
    ctx, windows, points = pair_feature_rows(a, b, p)
    k1 = _base_gram(GAUSS_W, windows)
    k2 = _base_gram(GAUSS_P, points)
    exact = weighted_logdet_pair(k1, k1 + k2, alpha, ctx.delta)
    f1, f2 = two_factorizations(a, b, p, GAUSS_W, GAUSS_P, (0.0, 0.0))
    scale = 0.5 * math.sqrt(ctx.N / ((a.n - p) * (b.n - p)))
    for rank in range(max(f1.rank, f2.rank) + 1):
        g1 = f1.g[:, : min(rank, f1.rank)]
        g2 = f2.g[:, : min(rank, f2.rank)]
        approx = weighted_logdet_pair(g1 @ g1.T, g2 @ g2.T, alpha, ctx.delta)
        assert approx <= exact + 1e-10
        eps1 = np.linalg.norm(k1 - g1 @ g1.T)
        eps2 = np.linalg.norm(k1 + k2 - g2 @ g2.T)
        bound = math.exp(scale * ((1 - alpha) * eps1 + alpha * eps2))
        true_ratio = math.exp(exact - approx)
        assert true_ratio <= bound * (1 + 1e-12)


def test_stopping_thresholds_alpha_one():
    t1, t2 = stopping_thresholds(8, 9, 2, 1.0, 1e-2, 1.0)
    assert math.isinf(t1)
    assert t2 > 0
