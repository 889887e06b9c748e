"""Numpy fallback for the compiled CSR kernels."""

import numpy as np


def csr_matvec(indptr, indices, data, x, out):
    """out[i] = sum of data[j] * x[indices[j]] over row i. Handles empty rows."""
    if data.size == 0:
        out[:] = 0.0
        return
    prod = data * x[indices]
    starts = indptr[:-1]
    nonempty = starts < indptr[1:]
    out[:] = 0.0
    out[nonempty] = np.add.reduceat(prod, starts[nonempty])
