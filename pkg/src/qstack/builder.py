"""Programmatic circuit construction.

The builder records gates into a tagged high-level circuit. Meta
operations are scoped:

- ``with b.compute(): ...`` marks a basis-change block; a later
  ``b.uncompute()`` appends its inverse automatically.
- ``with b.control(q): ...`` records ``q`` as a pending control on every
  command inside; the high-level compiler places the controls (skipping
  compute/uncompute blocks).
- ``b.quifelse(q, body0, body1)`` branches on a qubit, using the cheap
  conditional-inverse form when the bodies are mirrored z-rotations.
- ``b.repeat_classical(k, body)`` unrolls a classically bounded loop.
"""
from __future__ import annotations

import warnings
from contextlib import contextmanager
from dataclasses import dataclass

from .gates import (
    CNOT, CR, Gate, H, Measure, Phase, Rz, S, Sdg, Swap, T, Tdg, X, Y, Z, LibCall,
)
from .ir import Circuit, Command, QIR, inverse


class BuilderError(ValueError):
    pass


@dataclass(frozen=True)
class QuReg:
    """An ordered block of qubit indices; index 0 is the least significant."""

    name: str
    qubits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, i):
        picked = self.qubits[i]
        if isinstance(i, slice):
            return QuReg(f"{self.name}[{i.start}:{i.stop}]", picked)
        return picked

    def __iter__(self):
        return iter(self.qubits)


class ProgramBuilder:
    def __init__(self, num_qubits: int = 0):
        # qubits passed to the constructor preexist: they get no alloc
        # commands and no leak tracking (library fragments use this)
        self._n = num_qubits
        self._commands: list[Command] = []
        self._controls: list[int] = []
        self._open_computes: list[int] = []  # start index of open compute blocks
        self._pending_uncompute: list[tuple[int, int]] = []  # closed, not yet inverted
        self._live: dict[str, QuReg] = {}
        self._measured: set[int] = set()
        self._reg_counter = 0

    # register management

    def allocate_qureg(self, n: int, init: int = 0, name: str | None = None) -> QuReg:
        """Allocate ``n`` qubits and load the classical value ``init``."""
        if not 0 <= init < (1 << n):
            raise BuilderError(f"initial value {init} does not fit in {n} qubits")
        if self._controls:
            raise BuilderError("cannot allocate inside a controlled block")
        if name is None:
            name = f"r{self._reg_counter}"
        self._reg_counter += 1
        qubits = tuple(range(self._n, self._n + n))
        self._n += n
        for q in qubits:
            self._emit(Gate("alloc"), (q,))
        for k in range(n):
            if (init >> k) & 1:
                self._emit(X, (qubits[k],))
        reg = QuReg(name, qubits)
        self._live[name] = reg
        return reg

    def deallocate(self, reg: QuReg) -> None:
        if reg.name not in self._live:
            raise BuilderError(f"register '{reg.name}' is not live")
        if self._controls:
            raise BuilderError("cannot deallocate inside a controlled block")
        for q in reversed(reg.qubits):
            self._emit(Gate("dealloc"), (q,))
        del self._live[reg.name]

    # gate emission

    def _emit(self, gate: Gate, targets, controls=(), section: str = "") -> None:
        pending = frozenset(self._controls)
        cmd = Command(gate, tuple(targets), frozenset(controls), pending, section)
        if pending & (set(cmd.targets) | cmd.controls):
            raise BuilderError(
                f"control qubit(s) {sorted(pending & cmd.qubits())} used inside their own controlled block"
            )
        self._commands.append(cmd)

    def apply(self, gate: Gate, *targets: int, controls=()) -> None:
        self._emit(gate, targets, controls)

    def x(self, q): self.apply(X, q)
    def y(self, q): self.apply(Y, q)
    def z(self, q): self.apply(Z, q)
    def h(self, q): self.apply(H, q)
    def s(self, q): self.apply(S, q)
    def sdg(self, q): self.apply(Sdg, q)
    def t(self, q): self.apply(T, q)
    def tdg(self, q): self.apply(Tdg, q)

    def rz(self, theta, q): self.apply(Rz(theta), q)
    def phase(self, theta, q): self.apply(Phase(theta), q)
    def cr(self, theta, ctrl, target): self.apply(CR(theta), target, controls=(ctrl,))
    def cnot(self, ctrl, target): self.apply(CNOT, target, controls=(ctrl,))
    def swap(self, a, b): self.apply(Swap, a, b)

    def libcall(self, name: str, targets, *args: int) -> None:
        self._emit(LibCall(name, *args), tuple(targets))

    def measure(self, *qubits) -> None:
        qs: list[int] = []
        for q in qubits:
            qs.extend(q.qubits if isinstance(q, QuReg) else (q,))
        if self._controls:
            raise BuilderError("measurement inside a controlled block is not representable")
        if self._open_computes:
            raise BuilderError("measurement inside a compute block")
        self._emit(Measure, qs)
        self._measured.update(qs)

    # meta operations

    @contextmanager
    def control(self, qubit: int):
        if qubit in self._controls:
            raise BuilderError(f"qubit {qubit} is already an active control")
        self._controls.append(qubit)
        try:
            yield
        finally:
            self._controls.pop()

    @contextmanager
    def compute(self):
        start = len(self._commands)
        self._open_computes.append(start)
        try:
            yield
        finally:
            self._open_computes.pop()
        end = len(self._commands)
        for i in range(start, end):
            if self._commands[i].gate.name == "measure":
                raise BuilderError("measurement inside a compute block")
            self._commands[i] = self._commands[i].with_section("compute")
        self._pending_uncompute.append((start, end))

    def uncompute(self, custom=None) -> None:
        """Append the inverse of the most recent compute block.

        ``custom``, when given, is a callable emitting a hand-optimized
        uncomputation instead of the automatic inversion.
        """
        if not self._pending_uncompute:
            raise BuilderError("no compute block to uncompute")
        start, end = self._pending_uncompute.pop()
        if custom is not None:
            mark = len(self._commands)
            custom(self)
            for i in range(mark, len(self._commands)):
                if self._commands[i].gate.name == "measure":
                    raise BuilderError("measurement inside an uncompute block")
                self._commands[i] = self._commands[i].with_section("uncompute")
            return
        block = Circuit(max(self._n, 1), tuple(self._commands[start:end]))
        for cmd in inverse(block).commands:
            # inverse flips compute -> uncompute; keep the current pending set
            self._commands.append(
                Command(cmd.gate, cmd.targets, cmd.controls, frozenset(self._controls), "uncompute")
            )

    def with_compute(self, compute_body, action_body) -> None:
        """compute / action / automatic uncompute in one call."""
        with self.compute():
            compute_body(self)
        action_body(self)
        self.uncompute()

    def quifelse(self, ctrl: int, body0, body1, optimize: bool = True) -> None:
        """Apply ``body0`` where ``ctrl`` is 0 and ``body1`` where it is 1."""
        rec0 = self._record(body0)
        rec1 = self._record(body1)
        qubits0 = set().union(*[c.qubits() for c in rec0]) if rec0 else set()
        qubits1 = set().union(*[c.qubits() for c in rec1]) if rec1 else set()
        if qubits0 != qubits1:
            raise BuilderError("quifelse branches must act on the same qubit set")
        if ctrl in qubits0:
            raise BuilderError("quifelse control collides with branch qubits")

        if not rec0 and not rec1:
            return
        if optimize and self._is_mirrored_rz(rec0, rec1):
            target = rec0[0].targets[0]
            self._emit(CNOT, (target,), controls=(ctrl,))
            self._append_recorded(rec0, extra_pending=frozenset())
            self._emit(CNOT, (target,), controls=(ctrl,))
            return
        self._emit(X, (ctrl,))
        self._append_recorded(rec0, extra_pending=frozenset({ctrl}))
        self._emit(X, (ctrl,))
        self._append_recorded(rec1, extra_pending=frozenset({ctrl}))

    @staticmethod
    def _is_mirrored_rz(rec0, rec1) -> bool:
        # syntactic detection only: a single z-rotation against its inverse
        if len(rec0) != 1 or len(rec1) != 1:
            return False
        a, b = rec0[0], rec1[0]
        return (
            a.gate.name == "rz"
            and b.gate.name == "rz"
            and a.targets == b.targets
            and not a.controls and not b.controls
            and b.gate.param == -a.gate.param
        )

    def _record(self, body) -> list[Command]:
        mark = len(self._commands)
        scopes = (len(self._open_computes), len(self._pending_uncompute))
        saved_controls = self._controls
        self._controls = []
        try:
            body(self)
        finally:
            self._controls = saved_controls
        if scopes != (len(self._open_computes), len(self._pending_uncompute)):
            raise BuilderError("compute blocks may not cross a quifelse branch")
        recorded = self._commands[mark:]
        del self._commands[mark:]
        for cmd in recorded:
            if cmd.gate.name in ("measure", "alloc", "dealloc"):
                raise BuilderError(f"'{cmd.gate.name}' not allowed inside a quifelse branch")
        return recorded

    def _append_recorded(self, recorded, extra_pending: frozenset[int]) -> None:
        base = frozenset(self._controls) | extra_pending
        for cmd in recorded:
            self._commands.append(
                Command(cmd.gate, cmd.targets, cmd.controls, cmd.pending | base, cmd.section)
            )

    def repeat_classical(self, k: int, body) -> None:
        if k < 0:
            raise BuilderError("repeat count must be nonnegative")
        for _ in range(k):
            body(self)

    # finalization

    def finish(self) -> Circuit:
        if self._controls:
            raise BuilderError("unclosed control scope")
        if self._open_computes:
            raise BuilderError("unclosed compute scope")
        if self._pending_uncompute:
            raise BuilderError("compute block was never uncomputed")
        leaked = [
            reg.name
            for reg in self._live.values()
            if not set(reg.qubits) <= self._measured
        ]
        if leaked:
            warnings.warn(
                f"registers neither measured nor deallocated at finish: {leaked}",
                stacklevel=2,
            )
        return Circuit(self._n, tuple(self._commands), QIR)
