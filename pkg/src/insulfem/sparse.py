"""Symmetric sparse matrices in compressed-row form and the per-step solvers.

The conjugate gradient solver is Jacobi preconditioned; the bordered solver
handles the single linear constraint of each flow step by a Schur complement
built from two CG solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoConvergence, SingularConstraint


@dataclass(frozen=True)
class CSRMatrix:
    """Compressed-row matrix with int64 index arrays and float64 values."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @staticmethod
    def from_coo(n, rows, cols, values):
        """Build from triplets; duplicate (row, col) entries are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        key = rows * n + cols
        uniq, inverse = np.unique(key, return_inverse=True)
        data = np.bincount(inverse, weights=values, minlength=uniq.size)
        urows = uniq // n
        ucols = uniq % n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(urows, minlength=n), out=indptr[1:])
        return CSRMatrix(n, indptr, ucols.astype(np.int64), data)

    @staticmethod
    def diagonal_matrix(d):
        d = np.asarray(d, dtype=np.float64)
        n = d.size
        indptr = np.arange(n + 1, dtype=np.int64)
        return CSRMatrix(n, indptr, np.arange(n, dtype=np.int64), d.copy())

    @property
    def nnz(self):
        return self.data.size

    def matvec(self, x, out=None):
        if out is None:
            out = np.empty(self.n)
        kernels.csr_matvec(self.indptr, self.indices, self.data,
                           np.ascontiguousarray(x, dtype=np.float64), out)
        return out

    def __matmul__(self, x):
        return self.matvec(x)

    def diagonal(self):
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        hits = np.flatnonzero(rows == self.indices)
        d = np.zeros(self.n)
        d[rows[hits]] = self.data[hits]
        return d

    def diagonal_positions(self):
        """Flat data index of each row's diagonal entry, -1 where absent."""
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        hits = np.flatnonzero(rows == self.indices)
        pos = -np.ones(self.n, dtype=np.int64)
        pos[rows[hits]] = hits
        return pos

    def scaled(self, factor):
        return CSRMatrix(self.n, self.indptr, self.indices, self.data * factor)

    def add(self, other):
        """Sum of two CSR matrices of equal dimension."""
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        rows_a = np.repeat(np.arange(self.n), np.diff(self.indptr))
        rows_b = np.repeat(np.arange(other.n), np.diff(other.indptr))
        return CSRMatrix.from_coo(
            self.n,
            np.concatenate([rows_a, rows_b]),
            np.concatenate([self.indices, other.indices]),
            np.concatenate([self.data, other.data]),
        )

    def add_diagonal(self, d):
        return self.add(CSRMatrix.diagonal_matrix(d))

    def submatrix(self, keep):
        """Restriction to the index set ``keep`` (rows and columns)."""
        keep = np.asarray(keep, dtype=np.int64)
        remap = -np.ones(self.n, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        mask = (remap[rows] >= 0) & (remap[self.indices] >= 0)
        return CSRMatrix.from_coo(keep.size, remap[rows[mask]],
                                  remap[self.indices[mask]], self.data[mask])

    def toarray(self):
        dense = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        dense[rows, self.indices] = self.data
        return dense

    def to_scipy(self):
        import scipy.sparse as sp

        return sp.csr_matrix((self.data, self.indices, self.indptr),
                             shape=(self.n, self.n))


def cg_solve(A, b, tol=1e-10, max_iter=0, x0=None, callback=None):
    """Jacobi-preconditioned CG for SPD systems.

    Returns x with ||A x - b||_2 <= tol * ||b||_2 (verified on the true
    residual before returning). Raises NoConvergence when the iteration
    budget is exhausted. callback, when given, receives each iterate.
    """
    b = np.asarray(b, dtype=np.float64)
    n = A.n
    if max_iter <= 0:
        max_iter = max(1000, 20 * n)
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return np.zeros(n)
    target = tol * norm_b

    inv_diag = A.diagonal()
    if np.any(inv_diag <= 0.0):
        # SPD matrices have positive diagonals; fall back to no scaling there
        inv_diag = np.where(inv_diag > 0.0, inv_diag, 1.0)
    inv_diag = 1.0 / inv_diag

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    r = b - A.matvec(x)
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    Ap = np.empty(n)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= target:
            # recursion residual can drift; accept only the true residual
            r = b - A.matvec(x)
            if np.linalg.norm(r) <= target:
                return x
            z = inv_diag * r
            p = z.copy()
            rz = r @ z
        A.matvec(p, out=Ap)
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
        if callback is not None:
            callback(x.copy())
    raise NoConvergence(f"cg_solve: no convergence in {max_iter} iterations "
                        f"(residual {np.linalg.norm(b - A.matvec(x)) / norm_b:.3e})")


def bordered_solve(S, g, rhs, c, tol=1e-10, max_iter=0, x0=None):
    """Solve S x + mu g = rhs subject to g . x = c, with S SPD.

    Schur complement route: x1 = S^-1 rhs, x2 = S^-1 g,
    mu = (g.x1 - c) / (g.x2), x = x1 - mu x2.
    """
    x1 = cg_solve(S, rhs, tol=tol, max_iter=max_iter, x0=x0)
    x2 = cg_solve(S, g, tol=tol, max_iter=max_iter)
    denom = g @ x2
    if denom <= 0.0:
        raise SingularConstraint("g . S^-1 g <= 0: solver failure on SPD system")
    mu = (g @ x1 - c) / denom
    return x1 - mu * x2, mu
