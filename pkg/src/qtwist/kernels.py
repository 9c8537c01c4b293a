"""Kernel backend selection.

The compiled ``_kernels`` extension is used when importable; otherwise the
pure-Python twin in ``_kernels_py``. Set ``QTWIST_PURE_PYTHON=1`` to force the
fallback (used by the benchmark and the backend-parity tests).
"""

import os

from . import _kernels_py

if os.environ.get("QTWIST_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

poly_mul = _impl.poly_mul
poly_scale_add = _impl.poly_scale_add
charpoly_mod = _impl.charpoly_mod
