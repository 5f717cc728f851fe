"""Selects the compiled kernels when available, else the pure-Python ones.

Set ``NAKLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the kernel-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

__all__ = ["BACKEND", "apply_mode_string", "apply_normal_terms", "matvec", "pure"]

pure = _kernels_py

if os.environ.get("NAKLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

apply_normal_terms = _impl.apply_normal_terms
apply_mode_string = _impl.apply_mode_string
matvec = _impl.matvec
