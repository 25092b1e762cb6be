"""Small dense linear-algebra helpers used throughout the package."""

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import NotPositiveDefinite

_DENSE_EIG_CUTOFF = 200


def logdet_spd(mat: np.ndarray) -> float:
    """Log-determinant of a symmetric positive-definite matrix.

    Computed as twice the sum of the logs of the Cholesky diagonal.
    Raises NotPositiveDefinite when the factorization fails.
    """
    a = np.asarray(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotPositiveDefinite(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return 0.0
    try:
        chol = scipy.linalg.cholesky(a, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def spd_factor(mat: np.ndarray):
    """Cholesky factor usable with spd_solve; raises NotPositiveDefinite."""
    try:
        return scipy.linalg.cho_factor(mat, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def spd_solve(factor, rhs: np.ndarray) -> np.ndarray:
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def spectral_radius(mat: np.ndarray, tol: float = 1e-8, max_iter: int = 10_000) -> float:
    """Largest eigenvalue modulus of a real square matrix.

    Small matrices go through a dense eigenvalue solve.  Large ones use
    ARPACK iterations on the matrix itself with a fixed start vector
    (a plain power iteration stalls when the leading eigenvalues form a
    complex conjugate pair), falling back to the dense solve if the
    iteration does not converge.
    """
    a = np.asarray(mat, dtype=float)
    n = a.shape[0]
    if n <= _DENSE_EIG_CUTOFF:
        return float(np.abs(np.linalg.eigvals(a)).max())
    try:
        vals = scipy.sparse.linalg.eigs(
            scipy.sparse.csr_matrix(a),
            k=1,
            which="LM",
            tol=tol,
            maxiter=max_iter,
            v0=np.ones(n),
            return_eigenvectors=False,
        )
        return float(np.abs(vals).max())
    except scipy.sparse.linalg.ArpackError:
        return float(np.abs(np.linalg.eigvals(a)).max())
