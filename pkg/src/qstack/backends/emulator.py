"""Shortcut emulator.

Opaque library calls execute classically instead of gate by gate:
Fourier transforms run as an FFT over the target sub-register, arithmetic
calls as basis-index permutations (vectorized classical functions,
checked to be bijections on small domains), and k-fold repeated blocks as
a dense matrix power by repeated squaring. A terminal measurement layer
returns the full outcome distribution instead of sampling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..ir import Circuit, Command
from ..linalg import bit_reversal_permutation
from .sim import Statevector, apply_command, circuit_unitary

#: blocks at most this wide may be emulated by dense matrix powers
MATRIX_POWER_QUBITS = 10


class EmulationError(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Sparse outcome probabilities over basis indices."""

    probs: dict[int, float]

    def __post_init__(self):
        total = sum(self.probs.values())
        if any(p < -1e-12 for p in self.probs.values()) or abs(total - 1.0) > 1e-10:
            raise ValueError("probabilities must be nonnegative and sum to 1")

    def probability(self, outcome: int) -> float:
        return self.probs.get(outcome, 0.0)

    def tv_distance(self, other: Distribution) -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.probability(k) - other.probability(k)) for k in keys)

    def mode(self) -> int:
        return max(self.probs, key=lambda k: (self.probs[k], -k))

    def sample(self, rng) -> int:
        outcomes = sorted(self.probs)
        weights = np.array([self.probs[o] for o in outcomes])
        weights = np.clip(weights, 0.0, None)
        return int(rng.choice(outcomes, p=weights / weights.sum()))

    def to_dict(self) -> dict:
        return {str(k): v for k, v in sorted(self.probs.items())}


@dataclass(frozen=True)
class ClassicalAction:
    """Vectorized basis-value map for one library call.

    ``fn(args, values, width)`` maps an int64 array of register values to
    their images; the leading ``control_qubits`` targets act as positive
    controls instead of data.
    """

    fn: Callable[[tuple[int, ...], np.ndarray, int], np.ndarray]
    control_qubits: int = 0


_DEFAULT_ACTIONS: dict[str, ClassicalAction] = {}


def register_action(name: str, fn, control_qubits: int = 0) -> None:
    _DEFAULT_ACTIONS[name] = ClassicalAction(fn, control_qubits)


def _gather_axes(sv: Statevector, targets) -> np.ndarray:
    """Logical-order amplitudes reshaped so the targets form the last axis."""
    n = sv.num_qubits
    arr = sv.to_array().reshape([2] * n)
    axes = [n - 1 - q for q in reversed(targets)]  # axis order: msb..lsb of the register
    arr = np.moveaxis(arr, axes, range(n - len(targets), n))
    return arr.reshape(-1, 1 << len(targets))


def _scatter_axes(sv: Statevector, targets, arr: np.ndarray) -> None:
    n = sv.num_qubits
    m = len(targets)
    arr = arr.reshape([2] * n)
    axes = [n - 1 - q for q in reversed(targets)]
    arr = np.moveaxis(arr, range(n - m, n), axes)
    sv.amps = arr.reshape(-1)
    sv.perm = list(range(n))


def apply_fourier(sv: Statevector, targets, inverse: bool = False) -> None:
    """FFT shortcut matching the gate-level transform's bit order."""
    m = len(targets)
    rev = bit_reversal_permutation(m)
    block = _gather_axes(sv, targets)
    if inverse:
        block = np.fft.fft(block[:, rev], axis=1, norm="ortho")
    else:
        block = np.fft.ifft(block, axis=1, norm="ortho")[:, rev]
    _scatter_axes(sv, targets, block)


_checked_bijections: set = set()


def _check_bijection(name: str, args, fn, width: int) -> None:
    key = (name, args, width)
    if width > 12 or key in _checked_bijections:
        return
    values = np.arange(1 << width, dtype=np.int64)
    image = np.asarray(fn(args, values, width), dtype=np.int64)
    if sorted(image.tolist()) != values.tolist():
        raise EmulationError(f"classical action '{name}{args}' is not a bijection on {width} bits")
    _checked_bijections.add(key)


def apply_classical(sv: Statevector, targets, action: ClassicalAction, name: str, args) -> None:
    """Apply a registered classical action as a basis permutation."""
    k = action.control_qubits
    controls, payload = list(targets[:k]), list(targets[k:])
    width = len(payload)
    _check_bijection(name, args, action.fn, width)

    n = sv.num_qubits
    idx = np.arange(1 << n, dtype=np.int64)
    values = np.zeros_like(idx)
    for j, q in enumerate(payload):
        values |= ((idx >> sv.perm[q]) & 1) << j
    mapped = np.asarray(action.fn(args, values, width), dtype=np.int64)
    if controls:
        cmask = 0
        for q in controls:
            cmask |= 1 << sv.perm[q]
        mapped = np.where((idx & cmask) == cmask, mapped, values)

    dest = idx.copy()
    for j, q in enumerate(payload):
        bit = 1 << sv.perm[q]
        dest = (dest & ~bit) | (((mapped >> j) & 1) << sv.perm[q])
    out = np.zeros_like(sv.amps)
    out[dest] = sv.amps
    sv.amps = out


def apply_repeated(sv: Statevector, block: Circuit, targets, power: int) -> None:
    """Apply ``block``^power to the targets via repeated squaring."""
    if block.num_qubits > MATRIX_POWER_QUBITS:
        raise EmulationError(
            f"repeated block spans {block.num_qubits} qubits; cap is {MATRIX_POWER_QUBITS}"
        )
    if len(targets) != block.num_qubits:
        raise EmulationError("repeated block width does not match its targets")
    u = np.linalg.matrix_power(circuit_unitary(block), power)
    arr = _gather_axes(sv, targets)
    _scatter_axes(sv, targets, arr @ u.T)


def terminal_distribution(sv: Statevector, qubits) -> Distribution:
    idx = np.arange(sv.amps.size)
    key = np.zeros_like(idx)
    for j, q in enumerate(qubits):
        key |= ((idx >> sv.perm[q]) & 1) << j
    probs = np.bincount(key, weights=np.abs(sv.amps) ** 2, minlength=1 << len(qubits))
    total = probs.sum()
    return Distribution({int(i): float(p / total) for i, p in enumerate(probs) if p > 0.0})


def emulate(
    c: Circuit,
    init: int | Statevector = 0,
    actions: dict[str, ClassicalAction] | None = None,
) -> Statevector | Distribution:
    """Run a circuit whose opaque library calls have classical actions.

    Plain gates run through the statevector kernels. Measurements must
    be terminal; their qubits (in command order) index the returned
    distribution. Without measurements the final state is returned.
    """
    table = dict(_DEFAULT_ACTIONS)
    if actions:
        table.update(actions)
    sv = init.copy() if isinstance(init, Statevector) else Statevector.from_basis(c.num_qubits, init)

    measured: list[int] = []
    for cmd in c.commands:
        if measured and cmd.gate.name != "measure":
            raise EmulationError("the emulator only supports terminal measurements")
        g = cmd.gate
        if g.name == "measure":
            measured.extend(cmd.targets)
        elif g.name == "libcall":
            if cmd.controls or cmd.pending:
                raise EmulationError(
                    f"controls on opaque call '{g.call}' must be resolved into the call"
                )
            if g.call == "qft":
                apply_fourier(sv, cmd.targets, inverse=False)
            elif g.call == "iqft":
                apply_fourier(sv, cmd.targets, inverse=True)
            elif g.call in table:
                apply_classical(sv, cmd.targets, table[g.call], g.call, g.args)
            else:
                raise EmulationError(f"no classical action registered for '{g.call}'")
        else:
            apply_command(sv, cmd)
    if measured:
        return terminal_distribution(sv, measured)
    return sv
