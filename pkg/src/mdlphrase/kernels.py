"""Cover kernels, compiled when available.

The compiled extension is picked at import time; setting
``MDLPHRASE_PURE_PYTHON=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

_use_compiled = compiled_backend is not None and not os.environ.get("MDLPHRASE_PURE_PYTHON")
_active = compiled_backend if _use_compiled else python_backend
BACKEND = "cython" if _use_compiled else "python"

count_pairs = _active.count_pairs
count_pair = _active.count_pair
replace_pair = _active.replace_pair
expand_symbol = _active.expand_symbol

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "count_pairs",
    "count_pair",
    "replace_pair",
    "expand_symbol",
]
