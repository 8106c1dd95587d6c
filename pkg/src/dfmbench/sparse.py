"""Minimal sparse linear algebra used by the assembly and stepping code.

Compressed-row storage and the solver entry points are thin, validated
wrappers over scipy; the call sites only rely on the interface defined
here. Matrices are immutable after construction.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

# Above this size the SPD path switches from a direct factorization to
# conjugate gradients with Jacobi preconditioning.
_DIRECT_LIMIT = 400_000
# Transport systems below this size use the dense fallback.
DENSE_LIMIT = 5_000


class AsymmetricMatrixError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


class SparseMatrix:
    """Square or rectangular CSR matrix with canonical storage.

    Duplicate entries passed to :meth:`from_coo` are summed; entries that
    cancel to exact zero are dropped, so ``nnz`` counts stored structural
    nonzeros only.
    """

    def __init__(self, csr):
        csr = sps.csr_matrix(csr)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        self._csr = csr

    @classmethod
    def from_coo(cls, rows, cols, values, shape):
        coo = sps.coo_matrix((values, (rows, cols)), shape=shape)
        return cls(coo.tocsr())

    @property
    def shape(self):
        return self._csr.shape

    @property
    def nnz(self):
        return int(self._csr.nnz)

    @property
    def indptr(self):
        return self._csr.indptr

    @property
    def indices(self):
        return self._csr.indices

    @property
    def values(self):
        return self._csr.data

    def matvec(self, x):
        return self._csr @ np.asarray(x, dtype=float)

    def __matmul__(self, x):
        return self.matvec(x)

    def to_dense(self):
        return self._csr.toarray()

    def diagonal(self):
        return self._csr.diagonal()

    def transpose(self):
        return SparseMatrix(self._csr.T.tocsr())

    def is_symmetric(self, tol=0.0):
        diff = (self._csr - self._csr.T).tocsr()
        if diff.nnz == 0:
            return True
        return float(np.max(np.abs(diff.data))) <= tol

    def scipy_csr(self):
        return self._csr


def solve_dense(matrix, rhs):
    """Direct dense solve with partial pivoting.

    Raises SingularMatrixError when the matrix is singular to working
    precision.
    """
    if isinstance(matrix, SparseMatrix):
        matrix = matrix.to_dense()
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    try:
        with warnings.catch_warnings():
            # Exact zeros on the LU diagonal are detected and raised below.
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises below
        raise SingularMatrixError(str(exc)) from exc
    if np.any(np.abs(np.diag(lu)) <= np.finfo(float).eps * max(
            1.0, float(np.max(np.abs(matrix))))):
        raise SingularMatrixError("matrix is singular to working precision")
    return lu_solve((lu, piv), rhs)


def solve_spd(matrix, rhs, tol=1e-10, maxiter=None):
    """Solve a symmetric positive definite system to a relative residual.

    The matrix must be symmetric; asymmetric input raises
    AsymmetricMatrixError. Systems up to a size threshold are solved by a
    Jacobi-equilibrated sparse factorization with iterative refinement,
    larger ones by preconditioned conjugate gradients. Failure to reach
    ``tol`` raises SolverError.
    """
    if not isinstance(matrix, SparseMatrix):
        matrix = SparseMatrix(matrix)
    if not matrix.is_symmetric(tol=0.0):
        raise AsymmetricMatrixError("solve_spd requires a symmetric matrix")
    rhs = np.asarray(rhs, dtype=float)
    n = matrix.shape[0]
    if n == 0:
        return np.zeros(0)
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return np.zeros(n)

    csr = matrix.scipy_csr()
    diag = matrix.diagonal()
    if np.any(diag <= 0.0):
        raise SolverError("non-positive diagonal entry in SPD solve")

    if n <= _DIRECT_LIMIT:
        # Symmetric Jacobi equilibration keeps the factorization stable under
        # the extreme conductivity contrasts of the benchmark cases.
        d = 1.0 / np.sqrt(diag)
        scaled = sps.csc_matrix(
            sps.diags(d) @ csr @ sps.diags(d))
        try:
            lu = spla.splu(scaled)
        except RuntimeError as exc:
            raise SolverError(f"sparse factorization failed: {exc}") from exc
        x = d * lu.solve(d * rhs)
        resid = rhs - csr @ x
        rnorm = float(np.linalg.norm(resid))
        # Refine to the attainable floor, not merely to ``tol``: transport
        # divides the per-cell imbalance left in the residual by small
        # storage terms, so every extra decade pays off there.
        for _ in range(10):
            if rnorm == 0.0:
                break
            x_new = x + d * lu.solve(d * resid)
            resid_new = rhs - csr @ x_new
            rnorm_new = float(np.linalg.norm(resid_new))
            if rnorm_new >= rnorm:
                break
            x, resid, rnorm = x_new, resid_new, rnorm_new
        if rnorm <= tol * bnorm:
            return x
        raise SolverError(
            f"direct SPD solve stalled at residual {rnorm / bnorm:.3e}")

    m = sps.diags(1.0 / diag)
    x, info = spla.cg(csr, rhs, rtol=tol * 1e-2, atol=0.0,
                      maxiter=maxiter or 20 * n, M=m)
    if info != 0:
        raise SolverError(f"conjugate gradients did not converge (info={info})")
    resid = float(np.linalg.norm(rhs - csr @ x)) / bnorm
    if resid > tol:
        raise SolverError(f"CG residual {resid:.3e} above tolerance {tol:.1e}")
    return x


class ReusableFactorization:
    """One-time factorization of a (possibly nonsymmetric) operator.

    Transport steps reuse the same operator for every step; below
    DENSE_LIMIT unknowns a dense LU is kept, above it a sparse LU.
    """

    def __init__(self, matrix):
        if not isinstance(matrix, SparseMatrix):
            matrix = SparseMatrix(matrix)
        self._matrix = matrix
        n = matrix.shape[0]
        if n < DENSE_LIMIT:
            self._dense = lu_factor(matrix.to_dense())
            self._sparse = None
        else:
            self._dense = None
            self._sparse = spla.splu(sps.csc_matrix(matrix.scipy_csr()))

    def solve(self, rhs, tol=1e-10):
        rhs = np.asarray(rhs, dtype=float)
        if self._dense is not None:
            x = lu_solve(self._dense, rhs)
        else:
            x = self._sparse.solve(rhs)
        bnorm = float(np.linalg.norm(rhs))
        if bnorm > 0.0:
            resid = rhs - self._matrix @ x
            rnorm = float(np.linalg.norm(resid))
            for _ in range(4):
                if rnorm == 0.0:
                    break
                if self._dense is not None:
                    x_new = x + lu_solve(self._dense, resid)
                else:
                    x_new = x + self._sparse.solve(resid)
                resid_new = rhs - self._matrix @ x_new
                rnorm_new = float(np.linalg.norm(resid_new))
                if rnorm_new >= rnorm:
                    break
                x, resid, rnorm = x_new, resid_new, rnorm_new
            if rnorm > tol * bnorm:
                raise SolverError(
                    f"factorized solve residual {rnorm / bnorm:.3e} above "
                    f"tolerance {tol:.1e}")
        return x
