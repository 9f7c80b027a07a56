"""High-level compilation passes.

Works on tagged high-level circuits: places pending controls (skipping
compute/uncompute blocks, whose combined action is trivial when the
conditioned body is masked out), inlines library calls to fixpoint, and
constant-folds runs of identical rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .ir import Circuit, Command, QIR, remap, validate


class CompileError(ValueError):
    pass


class UnresolvedCallError(CompileError):
    def __init__(self, names):
        self.names = sorted(set(names))
        super().__init__(f"unresolved library call(s): {', '.join(self.names)}")


class InlineDepthError(CompileError):
    pass


@dataclass
class LibraryEntry:
    #: (args, width) -> Circuit over `width` local qubits
    make: Callable[[tuple[int, ...], int], Circuit]
    #: registry name of the variant taking one extra leading control qubit
    controlled: str | None = None


class LibraryRegistry:
    def __init__(self):
        self._entries: dict[str, LibraryEntry] = {}

    def register(self, name: str, make, controlled: str | None = None) -> None:
        self._entries[name] = LibraryEntry(make, controlled)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def names(self) -> list[str]:
        return sorted(self._entries)

    def controlled_variant(self, name: str) -> str | None:
        entry = self._entries.get(name)
        return entry.controlled if entry else None

    def generate(self, name: str, args: tuple[int, ...], width: int) -> Circuit:
        if name not in self._entries:
            raise UnresolvedCallError([name])
        circuit = self._entries[name].make(args, width)
        if circuit.num_qubits != width:
            raise CompileError(
                f"library '{name}' produced {circuit.num_qubits} qubits for a {width}-qubit call"
            )
        errors = validate(circuit)
        if errors:
            raise CompileError(f"library '{name}' produced an invalid circuit: {errors[0]}")
        return circuit


def resolve_controls(c: Circuit, registry: LibraryRegistry | None = None) -> Circuit:
    """Place pending controls.

    Commands in compute/uncompute sections drop them; everything else
    absorbs them, library calls by switching to a registered controlled
    variant where one exists.
    """
    out = []
    for cmd in c.commands:
        if not cmd.pending:
            out.append(cmd)
            continue
        if cmd.section in ("compute", "uncompute"):
            out.append(replace(cmd, pending=frozenset()))
            continue
        if cmd.gate.name == "measure":
            raise CompileError("a conditioned measurement is not representable")
        if cmd.gate.name == "libcall" and registry is not None:
            gate, targets, leftover = cmd.gate, cmd.targets, set(cmd.pending)
            for ctl in sorted(cmd.pending):
                variant = registry.controlled_variant(gate.call)
                if variant is None:
                    break
                gate = replace(gate, call=variant)
                targets = (ctl, *targets)
                leftover.discard(ctl)
            out.append(Command(gate, targets, cmd.controls | frozenset(leftover), frozenset(), cmd.section))
            continue
        out.append(replace(cmd, controls=cmd.controls | cmd.pending, pending=frozenset()))
    return c.with_commands(out)


def _inject_pending(c: Circuit, controls: frozenset[int]) -> Circuit:
    if not controls:
        return c
    return c.with_commands(replace(cmd, pending=cmd.pending | controls) for cmd in c.commands)


def inline_libraries(
    c: Circuit,
    registry: LibraryRegistry,
    opaque: frozenset[str] | set[str] = frozenset(),
    max_depth: int = 64,
    rounds: int | None = None,
) -> Circuit:
    """Substitute library calls until none remain (or `rounds` sweeps ran).

    Controls on a call are pushed into the generated body as pending
    controls and resolved there, so basis-change blocks inside libraries
    stay uncontrolled. Substitution is in program order; `max_depth`
    sweeps bound recursive vocabularies.
    """
    depth = 0
    while True:
        unresolved: list[str] = []
        changed = False
        out: list[Command] = []
        for cmd in c.commands:
            if cmd.gate.name != "libcall" or cmd.gate.call in opaque:
                out.append(cmd)
                continue
            name = cmd.gate.call
            if name not in registry:
                unresolved.append(name)
                out.append(cmd)
                continue
            sub = registry.generate(name, cmd.gate.args, len(cmd.targets))
            sub = remap(sub, cmd.targets, c.num_qubits)
            if cmd.controls:
                sub = resolve_controls(_inject_pending(sub, cmd.controls), registry)
            if cmd.pending:
                sub = _inject_pending(sub, cmd.pending)
            if cmd.section:
                sub = sub.with_commands(replace(s, section=cmd.section) for s in sub.commands)
            out.extend(sub.commands)
            changed = True
        if unresolved:
            raise UnresolvedCallError(unresolved)
        c = c.with_commands(out)
        depth += 1
        if rounds is not None and depth >= rounds:
            return c
        if not changed:
            return c
        if depth >= max_depth:
            raise InlineDepthError(
                f"library inlining did not terminate after {max_depth} rounds"
            )


_PERIOD = {"rz": 4.0 * math.pi, "phase": 2.0 * math.pi, "cr": 2.0 * math.pi}


def fold_rotations(c: Circuit, tol: float = 1e-12) -> Circuit:
    """Merge runs of same-kind, same-qubit, same-control rotations.

    Merged angles are summed modulo the kind's period; rotations that
    land within `tol` of the identity are deleted. Any other command on
    one of the rotation's qubits breaks the run.
    """
    out: list[Command | None] = []
    last_touch: dict[int, int] = {}

    def touch(cmd: Command, idx: int) -> None:
        for q in cmd.qubits():
            last_touch[q] = idx

    def rewind(qubits) -> None:
        for q in qubits:
            last_touch[q] = next(
                (j for j in range(len(out) - 1, -1, -1) if out[j] is not None and q in out[j].qubits()),
                -1,
            )

    def signature(cmd: Command):
        return (cmd.gate.name, cmd.targets, cmd.controls, cmd.pending, cmd.section)

    for cmd in c.commands:
        if cmd.gate.name not in _PERIOD:
            out.append(cmd)
            touch(cmd, len(out) - 1)
            continue
        period = _PERIOD[cmd.gate.name]
        qubits = cmd.qubits()
        prev_idx = {last_touch.get(q, -1) for q in qubits}
        merged = False
        if len(prev_idx) == 1:
            i = prev_idx.pop()
            if i >= 0 and out[i] is not None and signature(out[i]) == signature(cmd):
                angle = (out[i].gate.param + cmd.gate.param) % period
                if min(angle, period - angle) < tol:
                    out[i] = None
                    rewind(qubits)
                else:
                    out[i] = replace(out[i], gate=replace(out[i].gate, param=angle))
                merged = True
        if not merged:
            angle = cmd.gate.param % period
            if min(angle, period - angle) < tol:
                continue
            out.append(cmd)
            touch(cmd, len(out) - 1)

    return c.with_commands(cmd for cmd in out if cmd is not None)
