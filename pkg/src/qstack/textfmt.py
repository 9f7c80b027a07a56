"""Textual circuit format, the interchange between all CLI stages.

::

    qir 1
    qubits <n>
    level <qir|llqir>
    gateset <name...>                      # llqir only
    apply <gate>[(<param>)] [ctrl <c...> :] <targets...>
    section <compute|uncompute> <begin|end>
    measure <q...>
    alloc <q...>
    dealloc <q...>

Comments start with ``#``. Gate names are lowercase; a name outside the
built-in set denotes a library call whose parenthesised arguments are
integers (``apply phiadd(5) 0 1 2``). For ``cnot`` and ``cr`` the first
positional operand is the control. Parameters print with 12 significant
digits, extended when needed so that parsing returns the exact float.
"""
from __future__ import annotations

import math

from .gates import FIXED_UNITARY_KINDS, Gate, LibCall, ROTATION_KINDS
from .ir import Circuit, Command, LLQIR, QIR

_BUILTIN = FIXED_UNITARY_KINDS | ROTATION_KINDS
_WORD = frozenset("abcdefghijklmnopqrstuvwxyz0123456789_")

#: library-call names the parser accepts; qlib extends this on import
KNOWN_CALLS: set[str] = set()


def register_call_names(*names: str) -> None:
    KNOWN_CALLS.update(names)


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class SerializeError(ValueError):
    pass


def format_param(x: float) -> str:
    """Shortest decimal with >= 12 significant digits that parses back exactly."""
    s = f"{x:.12g}"
    if float(s) == x:
        return s
    return repr(x)


def _format_command(cmd: Command) -> str:
    g = cmd.gate
    if g.name in ("measure", "alloc", "dealloc"):
        if cmd.controls or cmd.pending:
            raise SerializeError(f"controls on '{g.name}' are not representable")
        return " ".join([g.name, *map(str, cmd.targets)])
    if cmd.pending:
        raise SerializeError("pending controls must be resolved before serialization")

    if g.name == "libcall":
        head = g.call + (f"({','.join(map(str, g.args))})" if g.args else "")
    elif g.param is not None:
        head = f"{g.name}({format_param(g.param)})"
    else:
        head = g.name

    controls = sorted(cmd.controls)
    positional = list(cmd.targets)
    if g.name in ("cnot", "cr") and controls:
        positional.insert(0, controls[0])
        controls = controls[1:]

    parts = ["apply", head]
    if controls:
        parts += ["ctrl", *map(str, controls), ":"]
    parts += map(str, positional)
    return " ".join(parts)


def serialize(c: Circuit) -> str:
    lines = ["qir 1", f"qubits {c.num_qubits}", f"level {c.level}"]
    if c.level == LLQIR:
        lines.append("gateset " + " ".join(sorted(c.gateset)))
    tag = ""
    for cmd in c.commands:
        if cmd.section != tag:
            if tag:
                lines.append(f"section {tag} end")
            if cmd.section:
                lines.append(f"section {cmd.section} begin")
            tag = cmd.section
        lines.append(_format_command(cmd))
    if tag:
        lines.append(f"section {tag} end")
    return "\n".join(lines) + "\n"


def _parse_gate(token: str, lineno: int, known_calls) -> Gate:
    name, param_src = token, None
    if "(" in token:
        if not token.endswith(")"):
            raise ParseError(lineno, f"malformed gate token '{token}'")
        name, param_src = token[: token.index("(")], token[token.index("(") + 1 : -1]
    if not name or not set(name) <= _WORD:
        raise ParseError(lineno, f"malformed gate name '{name}'")
    if name not in _BUILTIN and name not in known_calls:
        raise ParseError(lineno, f"unknown gate '{name}'")

    if name in ROTATION_KINDS:
        if param_src is None:
            raise ParseError(lineno, f"gate '{name}' needs a parameter")
        try:
            param = float(param_src)
        except ValueError:
            raise ParseError(lineno, f"bad parameter '{param_src}'") from None
        if not math.isfinite(param):
            raise ParseError(lineno, f"non-finite parameter '{param_src}'")
        return Gate(name, param)
    if name in FIXED_UNITARY_KINDS:
        if param_src is not None:
            raise ParseError(lineno, f"gate '{name}' takes no parameter")
        return Gate(name)
    # anything else is a library call with integer arguments
    args: tuple[int, ...] = ()
    if param_src:
        try:
            args = tuple(int(a) for a in param_src.split(","))
        except ValueError:
            raise ParseError(lineno, f"bad libcall arguments '{param_src}'") from None
    return LibCall(name, *args)


def _parse_qubits(tokens: list[str], lineno: int) -> list[int]:
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(lineno, f"bad qubit index '{tok}'") from None
    return out


def parse(text: str, known_calls: set[str] | None = None) -> Circuit:
    if known_calls is None:
        known_calls = KNOWN_CALLS
    num_qubits = None
    level = QIR
    gateset = None
    commands: list[Command] = []
    tag = ""
    saw_magic = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]

        if not saw_magic:
            if tokens != ["qir", "1"]:
                raise ParseError(lineno, "expected header 'qir 1'")
            saw_magic = True
            continue
        if head == "qubits":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError(lineno, "expected 'qubits <n>'")
            num_qubits = int(tokens[1])
            continue
        if head == "level":
            if len(tokens) != 2 or tokens[1] not in (QIR, LLQIR):
                raise ParseError(lineno, "expected 'level qir' or 'level llqir'")
            level = tokens[1]
            continue
        if head == "gateset":
            gateset = frozenset(tokens[1:])
            continue
        if num_qubits is None:
            raise ParseError(lineno, "missing 'qubits <n>' before commands")

        if head == "section":
            if len(tokens) != 3 or tokens[1] not in ("compute", "uncompute") or tokens[2] not in ("begin", "end"):
                raise ParseError(lineno, "expected 'section <compute|uncompute> <begin|end>'")
            if tokens[2] == "begin":
                if tag:
                    raise ParseError(lineno, f"section '{tag}' still open")
                tag = tokens[1]
            else:
                if tag != tokens[1]:
                    raise ParseError(lineno, f"closing '{tokens[1]}' but '{tag or 'nothing'}' is open")
                tag = ""
            continue
        if head in ("measure", "alloc", "dealloc"):
            qs = _parse_qubits(tokens[1:], lineno)
            if not qs:
                raise ParseError(lineno, f"'{head}' needs at least one qubit")
            commands.append(Command(Gate(head), tuple(qs), section=tag))
            continue
        if head != "apply":
            raise ParseError(lineno, f"unknown directive '{head}'")

        if len(tokens) < 3:
            raise ParseError(lineno, "expected 'apply <gate> <qubits...>'")
        gate = _parse_gate(tokens[1], lineno, known_calls)
        rest = tokens[2:]
        controls: list[int] = []
        if rest and rest[0] == "ctrl":
            if ":" not in rest:
                raise ParseError(lineno, "missing ':' after control list")
            sep = rest.index(":")
            controls = _parse_qubits(rest[1:sep], lineno)
            rest = rest[sep + 1 :]
        operands = _parse_qubits(rest, lineno)

        if gate.name in ("cnot", "cr"):
            if len(operands) != 2:
                raise ParseError(lineno, f"'{gate.name}' needs control and target operands")
            controls.append(operands[0])
            operands = operands[1:]
        if not operands:
            raise ParseError(lineno, "missing target qubits")
        commands.append(Command(gate, tuple(operands), frozenset(controls), section=tag))

    if not saw_magic:
        raise ParseError(1, "empty input, expected header 'qir 1'")
    if num_qubits is None:
        raise ParseError(1, "missing 'qubits <n>'")
    if tag:
        raise ParseError(len(text.splitlines()), f"section '{tag}' never closed")
    return Circuit(num_qubits, tuple(commands), level, gateset)
