"""Selects the compiled CSR kernels when the extension is built, else numpy.

Set the environment variable INSULFEM_PURE_PY=1 before import to force the
numpy fallback (used by the benchmark to compare both backends).
"""

import os

if os.environ.get("INSULFEM_PURE_PY"):
    from . import _kernels_py as _impl

    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

        COMPILED = False

csr_matvec = _impl.csr_matvec
