import numpy as np
import pytest

from insulfem.assembly import assemble
from insulfem.lineig import (LinearEigProblem, disk_reference_eigenvalues,
                             linear_eig)
from insulfem.mesh import make_disk, make_square


def test_problem_validation():
    ops = assemble(make_square(1))
    with pytest.raises(ValueError):
        LinearEigProblem("banana", ops)
    with pytest.raises(ValueError):
        LinearEigProblem("robin", ops)


def test_bessel_references():
    lam_d, lam_n = disk_reference_eigenvalues()
    assert lam_d == pytest.approx(2.404825557695773 ** 2, rel=1e-12)
    assert lam_n == pytest.approx(1.8411837813406593 ** 2, rel=1e-12)


def test_square_dirichlet_and_neumann():
    ops = assemble(make_square(4))
    lam_d, u_d = linear_eig(LinearEigProblem("dirichlet", ops))
    lam_n, u_n = linear_eig(LinearEigProblem("neumann", ops))
    assert lam_d == pytest.approx(2.0 * np.pi ** 2, rel=2e-2)
    assert lam_n == pytest.approx(np.pi ** 2, rel=2e-2)
    # Dirichlet mode vanishes on the boundary, Neumann mode has zero mean
    assert np.abs(u_d[ops.beta > 0]).max() == 0.0
    assert float(np.ones(ops.n) @ ops.M.matvec(u_n)) == pytest.approx(
        0.0, abs=1e-8)


def test_dirichlet_decreases_under_refinement():
    lams = [linear_eig(LinearEigProblem("dirichlet", assemble(make_square(k))))[0]
            for k in (2, 3, 4)]
    assert lams[0] > lams[1] > lams[2] > 2.0 * np.pi ** 2


def test_disk_robin_value():
    ops = assemble(make_disk(4))
    lam_r, _ = linear_eig(LinearEigProblem("robin", ops, m=0.4))
    assert lam_r == pytest.approx(5.0951, rel=1e-2)


def test_eigenvalue_ordering_and_robin_monotonicity():
    # the Robin value interpolates lambda_D (m -> 0) down to 0 (m -> inf);
    # it sits above the first nontrivial Neumann value only for small m
    ops = assemble(make_disk(3))
    lam_d, _ = linear_eig(LinearEigProblem("dirichlet", ops))
    lam_n, _ = linear_eig(LinearEigProblem("neumann", ops))
    robins = [linear_eig(LinearEigProblem("robin", ops, m=m))[0]
              for m in (0.2, 0.5, 1.0, 3.0)]
    for lam_r in robins:
        assert 0.0 < lam_r < lam_d
    for lam_r in robins[:2]:
        assert lam_n < lam_r
    assert all(a > b for a, b in zip(robins, robins[1:]))
