"""Semi-implicit constrained gradient flow for the nonlinear eigenvalue.

Each step solves one linear elliptic problem: the nonlocal boundary term is
frozen at the previous iterate and the unit-norm constraint is imposed
linearly through orthogonality to the previous iterate, which eliminates
the unknown multiplier from the right-hand side. The eigenvalue is only
evaluated a posteriori as a Rayleigh-type quotient of the final iterate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import lineig
from .assembly import (DiscreteOperators, assemble, discrete_L1eps, energy,
                       regularized_modulus, thickness)
from .errors import BracketFailure
from .mesh import Mesh
from .sparse import CSRMatrix, bordered_solve


@dataclass(frozen=True)
class SolveParams:
    """Parameters of one gradient-flow run.

    metric selects the evolution inner product: "lumped" (diagonal L2, the
    default) or "h1" (stiffness plus lumped mass, for which the stability
    assumption of the flow holds on any domain).
    """

    m: float
    eps: float
    tau: float = 1.0
    eps_stop: float = 1e-3
    max_steps: int = 20000
    cg_tol: float = 1e-10
    cg_max_iter: int = 0
    seed: int = 0
    metric: str = "lumped"

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass m must be positive")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        if self.tau <= 0:
            raise ValueError("step size tau must be positive")
        if self.eps_stop <= 0:
            raise ValueError("eps_stop must be positive")
        if self.metric not in ("lumped", "h1"):
            raise ValueError(f"unknown metric {self.metric!r}")


def default_params(mesh, m, **overrides):
    """Mesh-size driven defaults: eps = h/10, tau = 1, eps_stop = h/10."""
    h = mesh.mesh_size()
    values = dict(m=m, eps=h / 10.0, tau=1.0, eps_stop=h / 10.0)
    values.update(overrides)
    return SolveParams(**values)


@dataclass
class FlowState:
    """Mutable trajectory record; flow_step advances it in place."""

    u_prev: np.ndarray
    u_curr: np.ndarray
    k: int = 0
    energy_history: list = field(default_factory=list)
    dtu_history: list = field(default_factory=list)
    norm_sq_history: list = field(default_factory=list)
    dtu_M_sq_history: list = field(default_factory=list)
    constraint_residuals: list = field(default_factory=list)
    dtu_norm: float = np.inf
    _x2_warm: np.ndarray | None = None


@dataclass(frozen=True)
class EigenResult:
    """lam is the reported eigenvalue, the regularized energy of the final
    iterate divided by its squared norm. lam_plain is the unregularized
    energy of the normalized iterate; it does not carry the trajectory's
    norm growth, so use it whenever eigenvalues of different runs are
    compared (shape steps, sweeps, derivative checks)."""

    u: np.ndarray
    lam: float
    lam_plain: float
    thickness: np.ndarray
    iterations: int
    converged: bool
    final_norm: float = 1.0  # ||u^K||_M before normalization


def init_state(ops, p, u0):
    """Normalize the initial iterate in the consistent-mass norm and record
    the initial energy."""
    u0 = np.asarray(u0, dtype=np.float64)
    nrm = np.sqrt(u0 @ ops.M.matvec(u0))
    if nrm == 0.0:
        raise ValueError("initial iterate must be nonzero")
    u0 = u0 / nrm
    state = FlowState(u_prev=u0.copy(), u_curr=u0.copy())
    state.energy_history.append(energy(ops, u0, p.m, p.eps))
    state.norm_sq_history.append(1.0)
    return state


def _metric_apply(ops, p, v):
    if p.metric == "lumped":
        return ops.M_lump * v
    return ops.A.matvec(v) + ops.M_lump * v


def flow_step(ops, state, p, diag_pos=None):
    """One semi-implicit step; returns the advanced state.

    The step operator is S = metric/tau + A + (gamma/m) D with the boundary
    weights D frozen at the previous iterate, solved against the previous
    iterate under the orthogonality constraint in the consistent mass.
    """
    if diag_pos is None:
        diag_pos = ops.A.diagonal_positions()
    u_prev = state.u_curr

    denom = regularized_modulus(u_prev, p.eps)
    # eps = 0 only: keep exact boundary zeros from producing infinities
    floor = max(p.eps, 1e-14 * float(np.abs(u_prev).max()), 1e-300)
    denom = np.maximum(denom, floor)
    gamma = discrete_L1eps(ops.beta, u_prev, p.eps)
    d_bdry = np.where(ops.beta > 0.0, ops.beta / denom, 0.0)

    diag_extra = ops.M_lump / p.tau + (gamma / p.m) * d_bdry
    if p.metric == "lumped":
        data = ops.A.data.copy()
    else:
        data = ops.A.data * (1.0 + 1.0 / p.tau)
    data[diag_pos] += diag_extra
    S = CSRMatrix(ops.A.n, ops.A.indptr, ops.A.indices, data)

    rhs = _metric_apply(ops, p, u_prev) / p.tau
    g = ops.M.matvec(u_prev)
    c = float(u_prev @ g)
    u_curr, _ = bordered_solve(S, g, rhs, c, tol=p.cg_tol,
                               max_iter=p.cg_max_iter, x0=u_prev)

    dtu = (u_curr - u_prev) / p.tau
    state.dtu_norm = float(np.sqrt(dtu @ _metric_apply(ops, p, dtu)))
    state.dtu_M_sq_history.append(float(dtu @ ops.M.matvec(dtu)))
    residual = abs(g @ u_curr - c)
    scale = np.linalg.norm(g) * np.linalg.norm(u_curr) + abs(c)
    state.constraint_residuals.append(residual / scale)

    state.u_prev = u_prev
    state.u_curr = u_curr
    state.k += 1
    state.dtu_history.append(state.dtu_norm)
    state.energy_history.append(energy(ops, u_curr, p.m, p.eps))
    state.norm_sq_history.append(float(u_curr @ ops.M.matvec(u_curr)))
    return state


def random_initial(ops, p):
    rng = np.random.default_rng(p.seed)
    return rng.uniform(-1.0, 1.0, ops.n)


def solve_assembled(ops, p, u0=None):
    """Run the flow on preassembled operators until the stopping criterion
    ||d_t u||_* <= eps_stop fires or max_steps is reached."""
    if u0 is None:
        u0 = random_initial(ops, p)
    state = init_state(ops, p, u0)
    diag_pos = ops.A.diagonal_positions()
    converged = False
    while state.k < p.max_steps:
        flow_step(ops, state, p, diag_pos=diag_pos)
        if state.dtu_norm <= p.eps_stop:
            converged = True
            break
    return finalize(ops, p, state, converged), state


def finalize(ops, p, state, converged):
    """Rayleigh quotient of the final iterate, then normalize and fix the
    sign so the mean of u is nonnegative."""
    u = state.u_curr
    norm_sq = float(u @ ops.M.matvec(u))
    lam = energy(ops, u, p.m, p.eps) / norm_sq
    u = u / np.sqrt(norm_sq)
    if float(ops.M.matvec(u).sum()) < 0.0:
        u = -u
    lam_plain = energy(ops, u, p.m, 0.0)
    ell = thickness(ops.beta, u, p.m)
    return EigenResult(u=u, lam=lam, lam_plain=lam_plain, thickness=ell,
                       iterations=state.k, converged=converged,
                       final_norm=float(np.sqrt(norm_sq)))


def solve(mesh, p, u0=None):
    """Assemble the mesh operators and minimize the regularized functional."""
    ops = assemble(mesh)
    result, _ = solve_assembled(ops, p, u0)
    return result


def continuation_params(p, result, stop_factor=1.0):
    """Parameters for warm-started re-solves that continue a finished run.

    The flow commutes with joint scaling of iterate and regularization, so
    the trajectory's norm growth effectively anneals eps downward. A re-solve
    from the normalized eigenfunction at eps / final_norm continues that
    state; at the original eps it would relax back to the much more
    regularized minimizer and eigenvalue comparisons across re-solves would
    drown in the difference.
    """
    return replace(p, eps=p.eps / result.final_norm,
                   eps_stop=p.eps_stop * stop_factor)


def find_m0(mesh, p, bracket=(0.01, 10.0), tol_m=1e-3):
    """Critical mass where the nonlinear eigenvalue meets the first
    nontrivial Neumann eigenvalue, located by bisection in m.

    Every evaluation restarts from the seeded random initialization; warm
    chaining across the decades-wide bracket misleads the dtu-based
    stopping criterion (a stiff step operator makes the increments tiny
    long before stationarity).
    """
    ops = assemble(mesh)
    lam_n, _ = lineig.linear_eig(lineig.LinearEigProblem("neumann", ops))

    def gap(mass):
        result, _ = solve_assembled(ops, replace(p, m=mass))
        return result.lam_plain - lam_n

    lo, hi = bracket
    f_lo, f_hi = gap(lo), gap(hi)
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise BracketFailure(
            f"no sign change of lambda_m - lambda_N on [{lo}, {hi}]")
    while hi - lo > tol_m:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
