"""NumPy reference implementation of the statevector update kernels.

Each kernel updates a length-2^n complex128 array in place. ``k`` is a
storage bit position and ``cmask`` a bitmask of control bits; an index
participates when all control bits are set. Updates are elementwise with
no reductions, so results are bitwise deterministic.
"""
from __future__ import annotations

import numpy as np

IMPLEMENTATION = "numpy"


def _pair_base(n: int, k: int, cmask: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.intp)
    sel = (idx & (1 << k)) == 0
    if cmask:
        sel &= (idx & cmask) == cmask
    return idx[sel]


def apply_1q(amps: np.ndarray, k: int, cmask: int, m00, m01, m10, m11) -> None:
    i0 = _pair_base(amps.size, k, cmask)
    i1 = i0 | (1 << k)
    a = amps[i0]
    b = amps[i1]
    amps[i0] = m00 * a + m01 * b
    amps[i1] = m10 * a + m11 * b


def apply_diag(amps: np.ndarray, k: int, cmask: int, d0, d1) -> None:
    idx = np.arange(amps.size, dtype=np.intp)
    sel = np.ones(amps.size, dtype=bool) if not cmask else (idx & cmask) == cmask
    hi = (idx & (1 << k)) != 0
    if d0 != 1.0:
        amps[sel & ~hi] *= d0
    if d1 != 1.0:
        amps[sel & hi] *= d1


def apply_x(amps: np.ndarray, k: int, cmask: int) -> None:
    i0 = _pair_base(amps.size, k, cmask)
    i1 = i0 | (1 << k)
    tmp = amps[i0].copy()
    amps[i0] = amps[i1]
    amps[i1] = tmp
