"""Circuit intermediate representation.

Two abstraction levels share one command type:

- ``qir``:   any gate kind, arbitrary control sets, compute/uncompute
  section tags, unresolved library calls, pending (not yet compiled)
  controls.
- ``llqir``: only gates from the circuit's discrete gateset, controls only
  on ``cnot``, no tags, no library calls.

Qubit 0 is the least-significant bit of a basis-state index
(``i = sum q_k * 2**k``). Circuits are immutable; passes build new ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .gates import (
    DEFAULT_GATESET,
    Gate,
    ROTATION_KINDS,
    STRUCTURAL_KINDS,
    UNITARY_KINDS,
)

QIR = "qir"
LLQIR = "llqir"

#: kinds that carry an intrinsic control in their ``controls`` set
INTRINSICALLY_CONTROLLED = frozenset({"cnot", "cr"})


class NonInvertibleError(ValueError):
    """Circuit contains a measurement and cannot be inverted."""


class ValidationError(ValueError):
    """Raised by :func:`check`; carries the full violation list."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class Command:
    """One gate application.

    ``controls`` are resolved positive controls; ``pending`` are controls
    recorded by the builder that the high-level compiler still has to
    place (they skip compute/uncompute sections).
    """

    gate: Gate
    targets: tuple[int, ...]
    controls: frozenset[int] = frozenset()
    pending: frozenset[int] = frozenset()
    section: str = ""  # "", "compute" or "uncompute"

    def qubits(self) -> frozenset[int]:
        return frozenset(self.targets) | self.controls | self.pending

    def with_section(self, tag: str) -> Command:
        return replace(self, section=tag)

    def __repr__(self) -> str:
        s = f"{self.gate!r} @ {list(self.targets)}"
        if self.controls:
            s += f" ctrl {sorted(self.controls)}"
        if self.pending:
            s += f" pending {sorted(self.pending)}"
        if self.section:
            s += f" [{self.section}]"
        return s


def command(gate: Gate, targets, controls=(), pending=(), section: str = "") -> Command:
    """Convenience constructor accepting any iterables."""
    return Command(
        gate,
        tuple(int(t) for t in targets),
        frozenset(int(c) for c in controls),
        frozenset(int(c) for c in pending),
        section,
    )


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    commands: tuple[Command, ...] = ()
    level: str = QIR
    gateset: frozenset[str] | None = None

    def __post_init__(self):
        if self.level == LLQIR and self.gateset is None:
            object.__setattr__(self, "gateset", DEFAULT_GATESET)

    def __len__(self) -> int:
        return len(self.commands)

    def __iter__(self):
        return iter(self.commands)

    def with_commands(self, commands) -> Circuit:
        return replace(self, commands=tuple(commands))


def inverse(c: Circuit) -> Circuit:
    """Reverse the command list and adjoint every gate.

    Section tags swap (compute <-> uncompute). Measurements make a circuit
    non-invertible.
    """
    out = []
    for cmd in reversed(c.commands):
        if cmd.gate.name == "measure":
            raise NonInvertibleError("circuit contains a measurement")
        tag = {"compute": "uncompute", "uncompute": "compute"}.get(cmd.section, cmd.section)
        out.append(replace(cmd, gate=cmd.gate.adjoint(), section=tag))
    return c.with_commands(out)


def remap(c: Circuit, mapping, num_qubits: int) -> Circuit:
    """Re-index a circuit's qubits; ``mapping[local] = global``."""
    mapping = tuple(mapping)
    out = []
    for cmd in c.commands:
        out.append(
            Command(
                cmd.gate,
                tuple(mapping[t] for t in cmd.targets),
                frozenset(mapping[q] for q in cmd.controls),
                frozenset(mapping[q] for q in cmd.pending),
                cmd.section,
            )
        )
    return Circuit(num_qubits, tuple(out), c.level, c.gateset)


def concat(num_qubits: int, *parts: Circuit, level: str = QIR) -> Circuit:
    cmds: list[Command] = []
    for p in parts:
        cmds.extend(p.commands)
    return Circuit(num_qubits, tuple(cmds), level)


def validate(c: Circuit) -> list[str]:
    """Return a list of violations (empty when the circuit is well formed)."""
    errors: list[str] = []
    compute_blocks = uncompute_blocks = 0
    prev_tag = ""
    for i, cmd in enumerate(c.commands):
        g = cmd.gate
        where = f"command {i}"

        for q in cmd.qubits():
            if not 0 <= q < c.num_qubits:
                errors.append(f"{where}: qubit {q} out of range for {c.num_qubits} qubits")
        overlap = (set(cmd.targets) & cmd.controls) | (set(cmd.targets) & cmd.pending)
        if overlap:
            errors.append(f"{where}: targets and controls overlap on {sorted(overlap)}")
        if len(set(cmd.targets)) != len(cmd.targets):
            errors.append(f"{where}: duplicate targets {list(cmd.targets)}")

        if g.is_rotation:
            if g.param is None or not math.isfinite(g.param):
                errors.append(f"{where}: non-finite rotation parameter")
        if g.name in INTRINSICALLY_CONTROLLED:
            if len(cmd.targets) != 1 or not cmd.controls:
                errors.append(f"{where}: {g.name} needs one target and at least one control")
        elif g.name == "swap":
            if len(cmd.targets) != 2:
                errors.append(f"{where}: swap needs two targets")
        elif g.name in UNITARY_KINDS and len(cmd.targets) != 1:
            errors.append(f"{where}: {g.name} takes exactly one target")

        if g.name == "measure" and (cmd.controls or cmd.pending):
            errors.append(f"{where}: controlled measurement is not representable")

        if cmd.section and cmd.section not in ("compute", "uncompute"):
            errors.append(f"{where}: unknown section tag '{cmd.section}'")
        if cmd.section != prev_tag:
            if cmd.section == "compute":
                compute_blocks += 1
            elif cmd.section == "uncompute":
                uncompute_blocks += 1
                if uncompute_blocks > compute_blocks:
                    errors.append(f"{where}: uncompute block without a preceding compute block")
        prev_tag = cmd.section

        if c.level == LLQIR:
            if g.name == "libcall":
                errors.append(f"{where}: library call '{g.call}' in low-level circuit")
            elif g.name not in STRUCTURAL_KINDS and g.name not in c.gateset:
                errors.append(f"{where}: gate '{g.name}' not in gateset")
            if cmd.pending:
                errors.append(f"{where}: pending controls in low-level circuit")
            if cmd.controls and g.name != "cnot":
                errors.append(f"{where}: controls on '{g.name}' in low-level circuit")
            elif g.name == "cnot" and len(cmd.controls) != 1:
                errors.append(f"{where}: low-level cnot needs exactly one control")
            if cmd.section:
                errors.append(f"{where}: section tag in low-level circuit")

    if compute_blocks != uncompute_blocks:
        errors.append(
            f"unbalanced sections: {compute_blocks} compute vs {uncompute_blocks} uncompute blocks"
        )
    return errors


def check(c: Circuit) -> Circuit:
    """Validate and return ``c``; raise :class:`ValidationError` on failure."""
    errors = validate(c)
    if errors:
        raise ValidationError(errors)
    return c
