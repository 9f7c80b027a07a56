"""Statevector simulator.

Gates are applied as in-place kernels over amplitude pairs or groups
selected by target and control bits. An uncontrolled ``swap`` never
touches amplitudes: it permutes the logical-to-storage qubit map instead.
Kernel updates are elementwise and single-threaded, so runs with the same
seed produce identical transcripts.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..gates import Gate, gate_matrix
from ..ir import Circuit, Command

#: largest simulatable register (2^26 amplitudes is about 1 GiB)
MAX_QUBITS = 26

#: deallocated qubits with this much population outside |0> trigger a warning
DIRTY_DEALLOC_THRESHOLD = 1e-9


class CapacityError(ValueError):
    pass


class UnsupportedCommandError(ValueError):
    pass


class Statevector:
    """2^n complex amplitudes plus the logical-to-storage bit permutation."""

    __slots__ = ("num_qubits", "amps", "perm")

    def __init__(self, num_qubits: int, amps: np.ndarray | None = None, perm=None):
        if num_qubits > MAX_QUBITS:
            raise CapacityError(f"{num_qubits} qubits exceed the {MAX_QUBITS}-qubit cap")
        self.num_qubits = num_qubits
        if amps is None:
            amps = np.zeros(1 << num_qubits, dtype=np.complex128)
            amps[0] = 1.0
        self.amps = amps
        self.perm = list(range(num_qubits)) if perm is None else list(perm)

    @classmethod
    def from_basis(cls, num_qubits: int, index: int) -> Statevector:
        if not 0 <= index < (1 << num_qubits):
            raise ValueError(f"basis index {index} out of range")
        sv = cls(num_qubits)
        sv.amps[0] = 0.0
        sv.amps[index] = 1.0
        return sv

    def copy(self) -> Statevector:
        return Statevector(self.num_qubits, self.amps.copy(), list(self.perm))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def _storage_index_map(self) -> np.ndarray:
        """storage index for each logical index."""
        idx = np.arange(self.amps.size)
        out = np.zeros_like(idx)
        for q, p in enumerate(self.perm):
            out |= ((idx >> q) & 1) << p
        return out

    def to_array(self) -> np.ndarray:
        """Amplitudes in logical index order (qubit 0 least significant)."""
        if self.perm == list(range(self.num_qubits)):
            return self.amps.copy()
        return self.amps[self._storage_index_map()]

    def probabilities(self) -> np.ndarray:
        return np.abs(self.to_array()) ** 2

    def probability_one(self, qubit: int) -> float:
        bit = 1 << self.perm[qubit]
        idx = np.arange(self.amps.size)
        return float(np.sum(np.abs(self.amps[(idx & bit) != 0]) ** 2))


def _cmask(sv: Statevector, controls) -> int:
    mask = 0
    for c in controls:
        mask |= 1 << sv.perm[c]
    return mask


def _apply_1q_matrix(sv: Statevector, m: np.ndarray, target: int, cmask: int) -> None:
    if m[0, 1] == 0 and m[1, 0] == 0:
        kernels.apply_diag(sv.amps, sv.perm[target], cmask, complex(m[0, 0]), complex(m[1, 1]))
    elif m[0, 0] == 0 and m[1, 1] == 0 and m[0, 1] == 1 and m[1, 0] == 1:
        kernels.apply_x(sv.amps, sv.perm[target], cmask)
    else:
        kernels.apply_1q(
            sv.amps, sv.perm[target], cmask,
            complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]),
        )


def apply_command(sv: Statevector, cmd: Command) -> None:
    """Apply one unitary or bookkeeping command in place."""
    g = cmd.gate
    if cmd.pending:
        raise UnsupportedCommandError(f"unresolved pending controls on {cmd!r}")
    name = g.name

    if name == "libcall":
        raise UnsupportedCommandError(
            f"unresolved library call '{g.call}'; inline libraries or use the emulator"
        )
    if name == "measure":
        raise UnsupportedCommandError("measurement inside simulate(); use run_circuit()")
    if name == "alloc":
        return
    if name == "dealloc":
        for q in cmd.targets:
            p = sv.probability_one(q)
            if p > DIRTY_DEALLOC_THRESHOLD:
                warnings.warn(
                    f"deallocating qubit {q} with |1> population {p:.3e}; ancilla not clean",
                    stacklevel=2,
                )
        return

    cmask = _cmask(sv, cmd.controls)
    if name == "swap":
        a, b = cmd.targets
        if not cmd.controls:
            sv.perm[a], sv.perm[b] = sv.perm[b], sv.perm[a]
            return
        # controlled swap: CNOT(b,a) . CCX(controls+a, b) . CNOT(b,a)
        kernels.apply_x(sv.amps, sv.perm[a], 1 << sv.perm[b])
        kernels.apply_x(sv.amps, sv.perm[b], cmask | (1 << sv.perm[a]))
        kernels.apply_x(sv.amps, sv.perm[a], 1 << sv.perm[b])
        return
    if name == "cnot":
        kernels.apply_x(sv.amps, sv.perm[cmd.targets[0]], cmask)
        return
    if name == "cr":
        kernels.apply_diag(sv.amps, sv.perm[cmd.targets[0]], cmask, 1.0, cmath.exp(1j * g.param))
        return
    if name == "x" and not cmd.controls:
        kernels.apply_x(sv.amps, sv.perm[cmd.targets[0]], 0)
        return
    _apply_1q_matrix(sv, gate_matrix(g), cmd.targets[0], cmask)


def simulate(c: Circuit, init: int | Statevector = 0) -> Statevector:
    """Run a measurement-free circuit and return the final state."""
    if isinstance(init, Statevector):
        sv = init.copy()
    else:
        sv = Statevector.from_basis(c.num_qubits, init)
    if sv.num_qubits != c.num_qubits:
        raise ValueError("initial state size does not match the circuit")
    for cmd in c.commands:
        apply_command(sv, cmd)
    return sv


def measure(sv: Statevector, qubits, seed=None, rng=None):
    """Sample the listed qubits; returns (outcome bits, collapsed state).

    The outcome tuple is aligned with ``qubits``. Probabilities below
    1e-15 are clamped so a zero-norm subspace is never sampled.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    qubits = list(qubits)
    k = len(qubits)
    idx = np.arange(sv.amps.size)
    key = np.zeros_like(idx)
    for j, q in enumerate(qubits):
        key |= ((idx >> sv.perm[q]) & 1) << j
    probs = np.bincount(key, weights=np.abs(sv.amps) ** 2, minlength=1 << k)
    probs[probs < 1e-15] = 0.0
    probs /= probs.sum()
    outcome = int(rng.choice(1 << k, p=probs))

    collapsed = sv.copy()
    collapsed.amps[key != outcome] = 0.0
    collapsed.amps /= np.linalg.norm(collapsed.amps)
    bits = tuple((outcome >> j) & 1 for j in range(k))
    return bits, collapsed


@dataclass
class RunResult:
    state: Statevector
    transcript: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)
    seed: int | None = None

    def outcome_value(self, which: int = -1) -> int:
        """Measured bits of one transcript entry as an integer (LSB first)."""
        _, bits = self.transcript[which]
        return sum(b << j for j, b in enumerate(bits))


def run_circuit(c: Circuit, init: int | Statevector = 0, seed: int | None = None) -> RunResult:
    """Execute a circuit including measurements; deterministic under seed."""
    rng = np.random.default_rng(seed)
    if isinstance(init, Statevector):
        sv = init.copy()
    else:
        sv = Statevector.from_basis(c.num_qubits, init)
    transcript = []
    for cmd in c.commands:
        if cmd.gate.name == "measure":
            bits, sv = measure(sv, cmd.targets, rng=rng)
            transcript.append((cmd.targets, bits))
        else:
            apply_command(sv, cmd)
    return RunResult(sv, transcript, seed)


def circuit_unitary(c: Circuit, max_qubits: int = 12) -> np.ndarray:
    """Full unitary built by simulating every basis state column."""
    if c.num_qubits > max_qubits:
        raise CapacityError(f"unitary construction capped at {max_qubits} qubits")
    dim = 1 << c.num_qubits
    u = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(dim):
        u[:, j] = simulate(c, j).to_array()
    return u
