# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR kernels; insulfem.kernels falls back to numpy when unavailable."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def csr_matvec(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
               double[::1] data, double[::1] x, double[::1] out):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(indptr[i], indptr[i + 1]):
            acc += data[j] * x[indices[j]]
        out[i] = acc
