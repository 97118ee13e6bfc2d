"""Pick the compiled kernels when available, else the pure-Python twin.

Set ``SRAMF_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

pure = _pykernels

if os.environ.get("SRAMF_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

BACKEND = kernels.BACKEND
