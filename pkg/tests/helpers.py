"""Shared test oracles.

``oracle_unitary`` builds a circuit's full matrix by explicit basis-state
bookkeeping, independently of the simulator's kernel index arithmetic, so
the two implementations check each other.
"""
from __future__ import annotations

import numpy as np

from qstack.gates import Gate, gate_matrix
from qstack.ir import Circuit, Command


def _command_column(cmd: Command, n: int, j: int) -> np.ndarray:
    """Image of basis state |j> under one command, brute force."""
    dim = 1 << n
    col = np.zeros(dim, dtype=complex)
    g = cmd.gate

    controls = set(cmd.controls)
    if g.name == "cnot":
        controls = set(cmd.controls)
    if controls and any(not (j >> c) & 1 for c in controls):
        col[j] = 1.0
        return col

    if g.name in ("alloc", "dealloc"):
        col[j] = 1.0
        return col
    if g.name == "swap":
        a, b = cmd.targets
        ba, bb = (j >> a) & 1, (j >> b) & 1
        out = j & ~(1 << a) & ~(1 << b) | (bb << a) | (ba << b)
        col[out] = 1.0
        return col
    if g.name == "cnot":
        t = cmd.targets[0]
        col[j ^ (1 << t)] = 1.0
        return col
    if g.name == "cr":
        t = cmd.targets[0]
        col[j] = np.exp(1j * g.param) if (j >> t) & 1 else 1.0
        return col

    m = gate_matrix(g)
    t = cmd.targets[0]
    bit = (j >> t) & 1
    col[j & ~(1 << t)] += m[0, bit]
    col[j | (1 << t)] += m[1, bit]
    return col


def oracle_unitary(c: Circuit) -> np.ndarray:
    dim = 1 << c.num_qubits
    u = np.eye(dim, dtype=complex)
    for cmd in c.commands:
        step = np.zeros((dim, dim), dtype=complex)
        for j in range(dim):
            step[:, j] = _command_column(cmd, c.num_qubits, j)
        u = step @ u
    return u


def random_unitary_circuit(rng, num_qubits: int, length: int, allow_controls: bool = True) -> Circuit:
    """Random measurement-free QIR circuit for differential testing."""
    from qstack.gates import CNOT, CR, H, Phase, Rz, S, Sdg, Swap, T, Tdg, X, Y, Z

    fixed = [X, Y, Z, H, S, Sdg, T, Tdg]
    cmds = []
    for _ in range(length):
        r = rng.random()
        if r < 0.5 or num_qubits == 1:
            g = fixed[rng.integers(len(fixed))] if rng.random() < 0.6 else _random_rot(rng)
            t = int(rng.integers(num_qubits))
            controls = ()
            if allow_controls and num_qubits > 1 and rng.random() < 0.25:
                pool = [q for q in range(num_qubits) if q != t]
                controls = (pool[rng.integers(len(pool))],)
            cmds.append(Command(g, (t,), frozenset(controls)))
        else:
            a, b = rng.choice(num_qubits, size=2, replace=False)
            if rng.random() < 0.5:
                cmds.append(Command(CNOT, (int(b),), frozenset({int(a)})))
            elif rng.random() < 0.5:
                cmds.append(Command(Swap, (int(a), int(b))))
            else:
                cmds.append(Command(CR(float(rng.uniform(-np.pi, np.pi))), (int(b),), frozenset({int(a)})))
    return Circuit(num_qubits, tuple(cmds))


def _random_rot(rng) -> Gate:
    from qstack.gates import Phase, Rz

    theta = float(rng.uniform(-2 * np.pi, 2 * np.pi))
    return Rz(theta) if rng.random() < 0.5 else Phase(theta)
