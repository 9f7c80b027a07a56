"""Small dense-matrix helpers shared by synthesis, lowering and tests.

All circuit-equivalence checks quotient out global phase: the distance
between unitaries A and B is ``min over phi of ||A - e^{i phi} B||`` in
spectral norm. For unitaries this has a closed form through the
eigenphases of ``B^dagger A``.
"""
from __future__ import annotations

import numpy as np


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Spectral-norm distance between unitaries modulo global phase.

    ``B^dagger A`` is unitary, so its eigenvalues lie on the unit circle;
    the optimal phase is the midpoint of the smallest arc enclosing them,
    giving distance ``2 sin(span / 4)``.
    """
    m = b.conj().T @ a
    phases = np.sort(np.angle(np.linalg.eigvals(m)))
    if phases.size == 1:
        return 0.0
    gaps = np.diff(phases)
    wrap = 2.0 * np.pi - (phases[-1] - phases[0])
    span = 2.0 * np.pi - max(gaps.max(), wrap)
    return float(2.0 * np.sin(min(span, 2.0 * np.pi) / 4.0))


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    return phase_distance(a, b) <= tol


def state_fidelity_phase(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>| for unit vectors; 1 means equal up to global phase."""
    return float(abs(np.vdot(a, b)))


def bit_reverse(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def bit_reversal_permutation(width: int) -> np.ndarray:
    idx = np.arange(1 << width)
    out = np.zeros_like(idx)
    for b in range(width):
        out |= ((idx >> b) & 1) << (width - 1 - b)
    return out
