"""Statevector kernel selection.

Prefers the compiled Cython extension; falls back to the NumPy reference
implementation when the extension is missing or when the environment
variable ``QSTACK_PURE_PYTHON`` is set to a non-empty value. Both expose
the same in-place API and produce identical results.
"""
from __future__ import annotations

import os

if os.environ.get("QSTACK_PURE_PYTHON"):
    from . import pykernels as _impl
else:
    try:
        from . import _cykernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pykernels as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION
apply_1q = _impl.apply_1q
apply_diag = _impl.apply_diag
apply_x = _impl.apply_x
