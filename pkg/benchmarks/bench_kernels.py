"""Times the compiled CSR kernel against the numpy fallback.

The CSR matvec inside the Jacobi-CG solves is the hot inner loop of every
gradient-flow step. Run after building the extension:

    python benchmarks/bench_kernels.py [max_level]

Prints per-level matvec timings for both backends and an end-to-end
eigenvalue solve with each backend selected.
"""

import sys
import time

import numpy as np

from insulfem import _kernels_py, kernels
from insulfem.assembly import assemble
from insulfem.flow import default_params, solve_assembled
from insulfem.mesh import make_disk


def time_matvec(impl, A, x, repeats):
    out = np.empty(A.n)
    impl(A.indptr, A.indices, A.data, x, out)
    t0 = time.perf_counter()
    for _ in range(repeats):
        impl(A.indptr, A.indices, A.data, x, out)
    return (time.perf_counter() - t0) / repeats


def time_solve(mesh, ops, impl):
    original = kernels.csr_matvec
    kernels.csr_matvec = impl
    try:
        t0 = time.perf_counter()
        result, _ = solve_assembled(ops, default_params(mesh, 0.4))
        return time.perf_counter() - t0, result.lam
    finally:
        kernels.csr_matvec = original


def main(max_level=7):
    if not kernels.COMPILED:
        print("warning: compiled extension not built, "
              "comparing fallback against itself")
    compiled = kernels.csr_matvec
    fallback = _kernels_py.csr_matvec

    print(f"{'level':>5} {'nodes':>8} {'nnz':>9} {'compiled':>12} "
          f"{'numpy':>12} {'speedup':>8}")
    for level in range(4, max_level + 1):
        mesh = make_disk(level)
        ops = assemble(mesh)
        A = ops.A
        x = np.random.default_rng(0).standard_normal(A.n)
        repeats = max(5, int(2e6 / A.nnz))
        t_c = time_matvec(compiled, A, x, repeats)
        t_py = time_matvec(fallback, A, x, repeats)
        print(f"{level:>5} {A.n:>8} {A.nnz:>9} {t_c * 1e6:>10.1f}us "
              f"{t_py * 1e6:>10.1f}us {t_py / t_c:>8.2f}x")

    level = min(max_level, 6)
    mesh = make_disk(level)
    ops = assemble(mesh)
    print(f"\nfull eigenvalue solve, disk level {level}, m=0.4:")
    for name, impl in (("compiled", compiled), ("numpy", fallback)):
        seconds, lam = time_solve(mesh, ops, impl)
        print(f"  {name:>8}: {seconds:6.2f}s  lambda={lam:.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
