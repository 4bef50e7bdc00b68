"""Pick the compiled kernels when available, else the pure-Python twins."""

import os

BACKEND = "python"
if os.environ.get("INFTY_SPEC_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _pykernels as kernels
else:
    from . import _pykernels as kernels

from . import _pykernels as pykernels

__all__ = ["BACKEND", "kernels", "pykernels"]
