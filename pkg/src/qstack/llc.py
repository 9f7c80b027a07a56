"""Low-level compilation to the discrete gate set {h, t, tdg, s, sdg, x, z, cnot}.

Controlled rotations decompose by one of three strategies:

- ``a``: rotation/cnot sandwich with both half-rotations on the target
  (highest rotation locality);
- ``b``: the commuted form of ``a`` whose trailing half-rotation can run
  in parallel with the next ladder step;
- ``c``: one full rotation between two controlled swaps and an extra
  ancilla line, so only a single rotation needs synthesis.

Rotations whose angle is a multiple of pi/4 lower exactly to t-power
words; everything else goes through rotation synthesis at the requested
per-gate tolerance, and the achieved distances are recorded so the total
error bound (their sum) is reportable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .gates import (
    CNOT, DEFAULT_GATESET, Gate, Phase, Rz, Swap, X, gate_matrix,
)
from .hlc import CompileError, fold_rotations
from .ir import Circuit, Command, LLQIR, command
from .synthesis import SynthesisDatabase, SynthesisResult, get_database, synthesize_rz

STRATEGIES = ("a", "b", "c")


class UnsupportedDecompositionError(CompileError):
    pass


def _cmd(gate: Gate, targets, controls=()) -> Command:
    return command(gate, targets, controls)


def decompose_controlled_rz(cmd: Command, strategy: str = "a", ancilla: int | None = None) -> list[Command]:
    """Expand a singly-controlled z-rotation.

    Strategies ``a`` and ``b`` use 2 rotations and 2 cnots; ``c`` uses a
    single synthesizable rotation, 2 controlled swaps, one ancilla and a
    t-power phase correction on the control line.
    """
    if cmd.gate.name != "rz" or len(cmd.controls) != 1:
        raise UnsupportedDecompositionError(
            "expected a z-rotation with exactly one control"
        )
    theta = cmd.gate.param
    (ctrl,) = cmd.controls
    (target,) = cmd.targets
    if strategy == "a":
        return [
            _cmd(Rz(theta / 2), [target]),
            _cmd(CNOT, [target], [ctrl]),
            _cmd(Rz(-theta / 2), [target]),
            _cmd(CNOT, [target], [ctrl]),
        ]
    if strategy == "b":
        return [
            _cmd(CNOT, [target], [ctrl]),
            _cmd(Rz(-theta / 2), [target]),
            _cmd(CNOT, [target], [ctrl]),
            _cmd(Rz(theta / 2), [target]),
        ]
    if strategy == "c":
        if ancilla is None:
            raise UnsupportedDecompositionError("strategy 'c' needs an ancilla qubit")
        return [
            _cmd(Phase(-theta / 2), [ctrl]),
            _cmd(Swap, [target, ancilla], [ctrl]),
            _cmd(Rz(theta), [ancilla]),
            _cmd(Swap, [target, ancilla], [ctrl]),
        ]
    raise UnsupportedDecompositionError(f"unknown strategy '{strategy}'")


def decompose_controlled_phase(cmd: Command, strategy: str = "a", ancilla: int | None = None) -> list[Command]:
    """Expand a singly-controlled phase.

    Angles that are multiples of pi/2 stay exact (their half-angle
    rotations are t powers); anything else reduces to an uncontrolled
    phase plus a controlled z-rotation and defers to synthesis.
    """
    if cmd.gate.name != "cr" or len(cmd.controls) != 1:
        raise UnsupportedDecompositionError("expected a controlled phase with one control")
    theta = cmd.gate.param
    (ctrl,) = cmd.controls
    (target,) = cmd.targets
    if abs(theta % (2 * math.pi)) < 1e-15 or abs(theta % (2 * math.pi) - 2 * math.pi) < 1e-15:
        return []
    if strategy == "c":
        if ancilla is None:
            raise UnsupportedDecompositionError("strategy 'c' needs an ancilla qubit")
        return [
            _cmd(Swap, [target, ancilla], [ctrl]),
            _cmd(Rz(theta), [ancilla]),
            _cmd(Swap, [target, ancilla], [ctrl]),
        ]
    out = [_cmd(Phase(theta / 2), [ctrl])]
    out.extend(decompose_controlled_rz(_cmd(Rz(theta), [target], [ctrl]), strategy, ancilla))
    return out


def toffoli_commands(c1: int, c2: int, target: int) -> list[Command]:
    """Doubly-controlled x over the discrete set: 6 cnots and 7 t gates."""
    t, tdg, h = Gate("t"), Gate("tdg"), Gate("h")
    return [
        _cmd(h, [target]),
        _cmd(CNOT, [target], [c2]),
        _cmd(tdg, [target]),
        _cmd(CNOT, [target], [c1]),
        _cmd(t, [target]),
        _cmd(CNOT, [target], [c2]),
        _cmd(tdg, [target]),
        _cmd(CNOT, [target], [c1]),
        _cmd(t, [c2]),
        _cmd(t, [target]),
        _cmd(h, [target]),
        _cmd(CNOT, [c2], [c1]),
        _cmd(t, [c1]),
        _cmd(tdg, [c2]),
        _cmd(CNOT, [c2], [c1]),
    ]


def _zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """u = exp(i*alpha) Rz(beta) Ry(gamma) Rz(delta)."""
    det = complex(np.linalg.det(u))
    alpha = math.atan2(det.imag, det.real) / 2.0
    su = u / np.sqrt(det)
    gamma = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < 1e-12:
        beta = 2.0 * np.angle(su[1, 1])
        delta = 0.0
    elif abs(su[0, 0]) < 1e-12:
        beta = 2.0 * np.angle(su[1, 0])
        delta = 0.0
    else:
        plus = 2.0 * np.angle(su[1, 1])
        minus = 2.0 * np.angle(su[1, 0])
        beta = (plus + minus) / 2.0
        delta = (plus - minus) / 2.0
    return alpha, beta, gamma, delta


def _ry_commands(theta: float, q: int) -> list[Command]:
    # Ry(theta) = S H Rz(theta) H Sdg, applied right to left
    return [
        _cmd(Gate("sdg"), [q]),
        _cmd(Gate("h"), [q]),
        _cmd(Rz(theta), [q]),
        _cmd(Gate("h"), [q]),
        _cmd(Gate("s"), [q]),
    ]


def controlled_1q_commands(cmd: Command) -> list[Command]:
    """Generic controlled single-qubit gate via the zyz conjugation trick."""
    (ctrl,) = cmd.controls
    (target,) = cmd.targets
    alpha, beta, gamma, delta = _zyz_angles(gate_matrix(cmd.gate))
    out = [_cmd(Rz((delta - beta) / 2.0), [target]), _cmd(CNOT, [target], [ctrl])]
    out.append(_cmd(Rz(-(delta + beta) / 2.0), [target]))
    out.extend(_ry_commands(-gamma / 2.0, target))
    out.append(_cmd(CNOT, [target], [ctrl]))
    out.extend(_ry_commands(gamma / 2.0, target))
    out.append(_cmd(Rz(beta), [target]))
    out.append(_cmd(Phase(alpha), [ctrl]))
    return out


class _ControlExpander:
    def __init__(self, num_qubits: int, strategy: str):
        self.strategy = strategy
        self.num_qubits = num_qubits
        self.ancilla: int | None = None

    def _get_ancilla(self) -> int:
        if self.ancilla is None:
            self.ancilla = self.num_qubits
            self.num_qubits += 1
        return self.ancilla

    def expand(self, cmd: Command) -> list[Command]:
        g = cmd.gate
        k = len(cmd.controls)
        if g.name == "libcall":
            raise CompileError(f"unresolved library call '{g.call}' reached the low-level compiler")
        if cmd.pending:
            raise CompileError("pending controls reached the low-level compiler")
        if g.name in ("measure", "alloc", "dealloc") or k == 0:
            return [cmd]

        controls = sorted(cmd.controls)
        if g.name in ("x", "cnot"):
            if len(controls) == 1:
                return [_cmd(CNOT, cmd.targets, controls)]
            if len(controls) == 2:
                return toffoli_commands(controls[0], controls[1], cmd.targets[0])
            raise UnsupportedDecompositionError(
                f"{len(controls)} controls on x are not supported"
            )
        if g.name == "swap":
            a, b = cmd.targets
            inner = _cmd(X, [b], [*controls, a])
            return (
                [_cmd(CNOT, [a], [b])]
                + self.expand(inner)
                + [_cmd(CNOT, [a], [b])]
            )
        # phase-type gates become controlled phases
        phase_angle = {"z": math.pi, "s": math.pi / 2, "sdg": -math.pi / 2,
                       "t": math.pi / 4, "tdg": -math.pi / 4}
        if g.name in phase_angle or g.name == "phase":
            theta = phase_angle.get(g.name, g.param)
            return self.expand(_cmd(Gate("cr", theta), cmd.targets, cmd.controls))
        if g.name == "cr":
            if k == 1:
                anc = self._get_ancilla() if self.strategy == "c" else None
                parts = decompose_controlled_phase(cmd, self.strategy, anc)
            elif k == 2:
                c1, c2 = controls
                (t,) = cmd.targets
                theta = g.param
                parts = [
                    _cmd(Gate("cr", theta / 2), [t], [c1]),
                    _cmd(Gate("cr", theta / 2), [t], [c2]),
                    _cmd(CNOT, [c2], [c1]),
                    _cmd(Gate("cr", -theta / 2), [t], [c2]),
                    _cmd(CNOT, [c2], [c1]),
                ]
            else:
                raise UnsupportedDecompositionError(
                    f"{k} controls on a phase are not supported"
                )
            return [out for p in parts for out in self.expand(p)]
        if g.name == "rz":
            if k == 1:
                anc = self._get_ancilla() if self.strategy == "c" else None
                parts = decompose_controlled_rz(cmd, self.strategy, anc)
            elif k == 2:
                c1, c2 = controls
                theta = g.param
                parts = [
                    _cmd(Gate("cr", -theta / 2), [c1], [c2]),
                    _cmd(Gate("cr", theta), cmd.targets, cmd.controls),
                ]
            else:
                raise UnsupportedDecompositionError(
                    f"{k} controls on rz are not supported"
                )
            return [out for p in parts for out in self.expand(p)]
        if k == 1:
            parts = controlled_1q_commands(cmd)
            return [out for p in parts for out in self.expand(p)]
        raise UnsupportedDecompositionError(
            f"{k} controls on '{g.name}' are not supported"
        )


def expand_controls(c: Circuit, strategy: str = "a") -> Circuit:
    """Rewrite every controlled command into {1q gates, rotations, cnot}.

    Strategy ``c`` appends one ancilla line to the circuit when used.
    """
    if strategy not in STRATEGIES:
        raise UnsupportedDecompositionError(f"unknown strategy '{strategy}'")
    exp = _ControlExpander(c.num_qubits, strategy)
    out: list[Command] = []
    for cmd in c.commands:
        out.extend(exp.expand(replace(cmd, section="")))
    if exp.ancilla is not None:
        out.insert(0, _cmd(Gate("alloc"), [exp.ancilla]))
        out.append(_cmd(Gate("dealloc"), [exp.ancilla]))
    return Circuit(exp.num_qubits, tuple(out), c.level, c.gateset)


_CANCEL = {
    ("h", "h"), ("x", "x"), ("z", "z"), ("s", "sdg"), ("sdg", "s"),
    ("t", "tdg"), ("tdg", "t"), ("cnot", "cnot"), ("swap", "swap"),
}
_MERGE = {("t", "t"): "s", ("tdg", "tdg"): "sdg", ("s", "s"): "z", ("sdg", "sdg"): "z"}


def peephole_optimize(c: Circuit) -> Circuit:
    """Cancel adjacent inverse pairs and merge t/s powers, to fixpoint.

    Adjacency is per wire: two commands pair up when no other command
    touches any of their qubits in between. Gate count and t-count never
    increase.
    """
    commands = list(c.commands)
    while True:
        out: list[Command | None] = []
        last_touch: dict[int, int] = {}
        changed = False

        def rewind(qubits):
            for q in qubits:
                last_touch[q] = next(
                    (j for j in range(len(out) - 1, -1, -1)
                     if out[j] is not None and q in out[j].qubits()),
                    -1,
                )

        for cmd in commands:
            qubits = cmd.qubits()
            prev_idx = {last_touch.get(q, -1) for q in qubits}
            if len(prev_idx) == 1:
                i = prev_idx.pop()
                if i >= 0 and out[i] is not None:
                    prev = out[i]
                    same_wires = (
                        prev.controls == cmd.controls
                        and prev.section == cmd.section
                        and (
                            prev.targets == cmd.targets
                            or (cmd.gate.name == "swap" and set(prev.targets) == set(cmd.targets))
                        )
                    )
                    if same_wires:
                        pair = (prev.gate.name, cmd.gate.name)
                        if pair in _CANCEL:
                            out[i] = None
                            rewind(qubits)
                            changed = True
                            continue
                        if pair in _MERGE:
                            out[i] = replace(prev, gate=Gate(_MERGE[pair]))
                            changed = True
                            continue
            out.append(cmd)
            for q in qubits:
                last_touch[q] = len(out) - 1

        commands = [cmd for cmd in out if cmd is not None]
        if not changed:
            return c.with_commands(commands)


_T_POWER = {0: (), 1: ("t",), 2: ("s",), 3: ("s", "t"), 4: ("z",),
            5: ("z", "t"), 6: ("sdg",), 7: ("tdg",)}


def _exact_t_power(theta: float) -> tuple[str, ...] | None:
    """Letters for a rotation that is a multiple of pi/4 modulo 2*pi."""
    ratio = theta / (math.pi / 4.0)
    k = round(ratio)
    if abs(ratio - k) > 1e-12:
        return None
    return _T_POWER[k % 8]


@dataclass(frozen=True)
class LowerResult:
    circuit: Circuit
    synth_distances: tuple[float, ...]

    @property
    def error_bound(self) -> float:
        return float(sum(self.synth_distances))


def lower(
    c: Circuit,
    eps_gate: float = 1e-2,
    strategy: str = "a",
    db: SynthesisDatabase | None = None,
    optimize: bool = True,
) -> LowerResult:
    """Translate a fully inlined circuit to the discrete gate set.

    Every synthesized rotation meets ``eps_gate`` (modulo global phase);
    achieved distances accumulate into ``LowerResult.synth_distances`` so
    the total error bound is their sum.
    """
    if db is None and eps_gate < 0.3:
        db = get_database()
    folded = fold_rotations(c)
    expanded = expand_controls(folded, strategy)

    out: list[Command] = []
    distances: list[float] = []
    for cmd in expanded.commands:
        name = cmd.gate.name
        if name in ("measure", "alloc", "dealloc") or (name in DEFAULT_GATESET and not cmd.gate.is_rotation):
            out.append(cmd)
            continue
        if name == "swap":
            a, b = cmd.targets
            out.append(_cmd(CNOT, [b], [a]))
            out.append(_cmd(CNOT, [a], [b]))
            out.append(_cmd(CNOT, [b], [a]))
            continue
        if name == "y":
            (t,) = cmd.targets
            out.append(_cmd(Gate("z"), [t]))
            out.append(_cmd(Gate("x"), [t]))
            continue
        if name in ("rz", "phase"):
            (t,) = cmd.targets
            exact = _exact_t_power(cmd.gate.param % (2 * math.pi))
            if exact is not None:
                out.extend(_cmd(Gate(letter), [t]) for letter in exact)
                continue
            result = synthesize_rz(cmd.gate.param, eps_gate, db=db)
            distances.append(result.distance)
            out.extend(_cmd(Gate(letter), [t]) for letter in result.word)
            continue
        raise CompileError(f"cannot lower '{name}' to the discrete gate set")

    lowered = Circuit(expanded.num_qubits, tuple(out), LLQIR, DEFAULT_GATESET)
    if optimize:
        lowered = peephole_optimize(lowered)
    return LowerResult(lowered, tuple(distances))
