"""Linear reference eigenvalues: Dirichlet, first nontrivial Neumann, and
uniform Robin, all by inverse power iteration with CG inner solves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import DiscreteOperators
from .errors import NoConvergence
from .sparse import cg_solve


@dataclass(frozen=True)
class LinearEigProblem:
    """kind is "dirichlet", "neumann" (first nontrivial) or "robin"
    (uniform film of total mass m)."""

    kind: str
    ops: DiscreteOperators
    m: float | None = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "robin"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "robin" and (self.m is None or self.m <= 0):
            raise ValueError("robin problem needs m > 0")


def linear_eig(problem, tol=1e-9, max_iter=500, cg_tol=1e-12):
    """Smallest generalized eigenvalue of the selected operator.

    Dirichlet restricts the stiffness to non-boundary nodes; Neumann
    deflates constants after every inverse-power application; Robin adds
    the boundary mass scaled by |boundary| / m. Iterates until the Rayleigh
    quotient changes by less than tol relatively.
    """
    ops = problem.ops
    n = ops.n

    if problem.kind == "dirichlet":
        free = np.flatnonzero(ops.beta == 0.0)
        K = ops.A.submatrix(free)
        M = ops.M.submatrix(free)
        K_solve, K_ray = K, K
    elif problem.kind == "neumann":
        free = np.arange(n)
        M = ops.M
        # shifted operator keeps the inner solves SPD, the Rayleigh
        # quotient is still taken with the unshifted stiffness
        K_solve = ops.A.add(M)
        K_ray = ops.A
    else:
        free = np.arange(n)
        M = ops.M
        K_solve = ops.A.add(ops.B_robin.scaled(ops.boundary_measure / problem.m))
        K_ray = K_solve

    ones = np.ones(free.size)
    m_ones = M.matvec(ones)
    ones_m_sq = float(ones @ m_ones)

    def deflate(v):
        if problem.kind == "neumann":
            v = v - (float(m_ones @ v) / ones_m_sq) * ones
        return v

    rng = np.random.default_rng(7)
    u = deflate(rng.uniform(-1.0, 1.0, free.size))
    u /= np.sqrt(u @ M.matvec(u))
    lam = float(u @ K_ray.matvec(u))

    for _ in range(max_iter):
        x = cg_solve(K_solve, M.matvec(u), tol=cg_tol, x0=u / max(lam, 1.0))
        x = deflate(x)
        x /= np.sqrt(x @ M.matvec(x))
        lam_new = float(x @ K_ray.matvec(x))
        u = x
        if abs(lam_new - lam) < tol * max(1.0, abs(lam_new)):
            lam = lam_new
            break
        lam = lam_new
    else:
        raise NoConvergence(f"inverse power iteration: no convergence "
                            f"in {max_iter} iterations")

    full = np.zeros(n)
    full[free] = u
    if float(ops.M.matvec(full).sum()) < 0.0:
        full = -full
    return lam, full


def disk_reference_eigenvalues():
    """Continuum Dirichlet and first nontrivial Neumann eigenvalues of the
    unit disk from Bessel-function roots."""
    from scipy.optimize import brentq
    from scipy.special import j0, jvp

    j01 = brentq(j0, 2.0, 3.0, xtol=1e-14)
    jp11 = brentq(lambda x: jvp(1, x), 1.0, 2.5, xtol=1e-14)
    return j01 ** 2, jp11 ** 2
