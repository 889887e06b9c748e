"""P1 operators: stiffness, consistent and lumped mass, boundary weights.

Axisymmetric meshes are assembled with the 2*pi*r weight evaluated by a
one-point midpoint rule on elements (centroid) and edges, so the discrete
operators of the half-profile represent the rotational body.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroTrace
from .mesh import OUTER
from .sparse import CSRMatrix


@dataclass(frozen=True)
class DiscreteOperators:
    """A: stiffness; M: consistent mass (norm constraint and orthogonality);
    M_lump: lumped-mass diagonal (evolution metric); beta: boundary weights,
    zero off the outer boundary; B_robin: boundary mass for uniform Robin."""

    A: CSRMatrix
    M: CSRMatrix
    M_lump: np.ndarray
    beta: np.ndarray
    B_robin: CSRMatrix

    @property
    def n(self):
        return self.A.n

    @property
    def boundary_measure(self):
        return float(self.beta.sum())


def _perp(v):
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def assemble(mesh):
    n = mesh.num_nodes
    tri = mesh.triangles
    p = mesh.nodes[tri]  # (m, 3, 2)

    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    if mesh.axisymmetric:
        w_elem = 2.0 * np.pi * p[:, :, 1].mean(axis=1)
    else:
        w_elem = np.ones_like(area)

    # grad of the barycentric function at vertex i: perp(p[i+2] - p[i+1]) / 2A
    grads = np.empty_like(p)
    for i in range(3):
        grads[:, i] = _perp(p[:, (i + 2) % 3] - p[:, (i + 1) % 3])
    grads /= (2.0 * area)[:, None, None]

    rows, cols, a_vals, m_vals = [], [], [], []
    wa = w_elem * area
    for i in range(3):
        for j in range(3):
            rows.append(tri[:, i])
            cols.append(tri[:, j])
            a_vals.append(wa * np.einsum("kd,kd->k", grads[:, i], grads[:, j]))
            m_vals.append(wa / (6.0 if i == j else 12.0))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    A = CSRMatrix.from_coo(n, rows, cols, np.concatenate(a_vals))
    M = CSRMatrix.from_coo(n, rows, cols, np.concatenate(m_vals))

    M_lump = np.zeros(n)
    for i in range(3):
        np.add.at(M_lump, tri[:, i], wa / 3.0)

    outer = mesh.outer_edges()
    lengths = np.linalg.norm(mesh.nodes[outer[:, 1]] - mesh.nodes[outer[:, 0]],
                             axis=1)
    if mesh.axisymmetric:
        w_edge = 2.0 * np.pi * 0.5 * (mesh.nodes[outer[:, 0], 1]
                                      + mesh.nodes[outer[:, 1], 1])
    else:
        w_edge = np.ones_like(lengths)
    wl = w_edge * lengths

    beta = np.zeros(n)
    np.add.at(beta, outer[:, 0], 0.5 * wl)
    np.add.at(beta, outer[:, 1], 0.5 * wl)

    br_rows = np.concatenate([outer[:, 0], outer[:, 1], outer[:, 0], outer[:, 1]])
    br_cols = np.concatenate([outer[:, 0], outer[:, 1], outer[:, 1], outer[:, 0]])
    br_vals = np.concatenate([wl / 3.0, wl / 3.0, wl / 6.0, wl / 6.0])
    B_robin = CSRMatrix.from_coo(n, br_rows, br_cols, br_vals)

    return DiscreteOperators(A=A, M=M, M_lump=M_lump, beta=beta, B_robin=B_robin)


def regularized_modulus(u, eps):
    """(u**2 + eps**2)**0.5, the smooth replacement for |u|."""
    return np.hypot(u, eps)


def discrete_L1eps(beta, u, eps):
    """Regularized boundary L1 norm: sum of beta_z * |u_z|_eps."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return float(beta @ regularized_modulus(u, eps))


def energy(ops, u, m, eps):
    """Discrete objective: grad norm squared plus the squared regularized
    boundary L1 norm divided by the film mass."""
    if m <= 0:
        raise ValueError("mass m must be positive")
    return float(u @ ops.A.matvec(u)) + discrete_L1eps(ops.beta, u, eps) ** 2 / m


def thickness(beta, u, m):
    """Optimal film thickness on outer-boundary nodes, zero elsewhere.

    Proportional to |u| with total boundary mass m: sum beta_z l_z = m.
    """
    weight = beta @ np.abs(u)
    if weight <= 0.0:
        raise ZeroTrace("boundary trace of u vanishes identically")
    ell = np.where(beta > 0.0, m * np.abs(u) / weight, 0.0)
    return ell
