"""Pick the compiled kernel when present, else the pure-Python one."""

import os

from . import _kernels_py

PURE_ENV = "LOSSY_CAVITY_PURE_PYTHON"

compiled = None
if not os.environ.get(PURE_ENV):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

kernels = compiled if compiled is not None else _kernels_py
COMPILED = compiled is not None
NAME = "cython" if COMPILED else "python"
