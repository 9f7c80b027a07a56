"""Quantum circuit library.

Fourier transforms, Fourier-space (Draper) constant adders, the Cuccaro
ripple-carry adder, Beauregard-style modular addition and controlled
modular multiplication, phase estimation, and an auto-tuner that picks
the cheaper adder under a cost model.

Conventions (documented because every piece must agree):

- registers read least-significant-bit first: value(reg) = sum reg[k]*2^k;
- the Fourier transform here is the swap-free ladder, so it equals the
  unitary DFT with a bit-reversed output index: applied to |x> it puts
  amplitude exp(2*pi*i*x*rev(k)/2^n)/sqrt(2^n) on basis state |k>;
- phase estimation therefore applies the inverse transform on the
  reversed ancilla wires and decodes outcomes by classical bit reversal
  (`decode_phase_bits`), with the highest ancilla driving the largest
  power of the estimated unitary.

Library entries register under stable names usable in textual circuits
(qft, iqft, phiadd/cphiadd/ccphiadd, phisub/..., modadd/..., cua, qpe,
toffoli, add_draper, add_cuccaro).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import textfmt
from .backends import emulator
from .backends.resources import CostModel, ResourceReport, count_resources
from .gates import CNOT, CR, Gate, H, LibCall, Phase, Swap, X, register_libcall_adjoint
from .hlc import CompileError, LibraryRegistry, inline_libraries
from .ir import Circuit, Command, command, concat, inverse, remap
from .linalg import bit_reverse
from .llc import lower, toffoli_commands


def qft(n: int) -> Circuit:
    """Swap-free Fourier ladder; qubit j ends carrying phase x / 2^(j+1)."""
    if n < 1:
        raise ValueError("qft needs at least one qubit")
    cmds = []
    for j in reversed(range(n)):
        cmds.append(command(H, [j]))
        for m in reversed(range(j)):
            cmds.append(command(CR(math.pi / (1 << (j - m))), [j], controls=[m]))
    return Circuit(n, tuple(cmds))


def iqft(n: int) -> Circuit:
    return inverse(qft(n))


def phi_add(a: int, n: int, n_controls: int = 0) -> Circuit:
    """Add the classical constant ``a`` to an n-qubit register already in
    the Fourier basis: one phase rotation per qubit, optionally controlled.

    Local qubits: [controls... , register...].
    """
    if n_controls not in (0, 1, 2):
        raise ValueError("phi_add supports at most two controls")
    controls = list(range(n_controls))
    cmds = []
    for j in range(n):
        angle = (2.0 * math.pi * a / (1 << (j + 1))) % (2.0 * math.pi)
        if angle == 0.0:
            continue
        cmds.append(command(Phase(angle), [n_controls + j], controls=controls))
    return Circuit(n_controls + n, tuple(cmds))


def phi_sub(a: int, n: int, n_controls: int = 0) -> Circuit:
    return inverse(phi_add(a, n, n_controls))


def add_draper(n: int) -> Circuit:
    """In-place quantum-quantum adder |x>|y> -> |x>|x+y mod 2^n>.

    Fourier basis change on y, one controlled phase per (x bit, y bit)
    pair, inverse basis change. Local qubits: [x..., y...].
    """
    x = list(range(n))
    y = list(range(n, 2 * n))
    cmds = list(remap(qft(n), y, 2 * n).commands)
    for i in range(n):
        for j in range(i, n):
            angle = (2.0 * math.pi * (1 << i) / (1 << (j + 1))) % (2.0 * math.pi)
            if angle == 0.0:
                continue
            cmds.append(command(Phase(angle), [y[j]], controls=[x[i]]))
    cmds.extend(remap(iqft(n), y, 2 * n).commands)
    return Circuit(2 * n, tuple(cmds))


def _maj(c: int, b: int, a: int) -> list[Command]:
    return [
        command(CNOT, [b], controls=[a]),
        command(CNOT, [c], controls=[a]),
        command(X, [a], controls=[c, b]),
    ]


def _uma(c: int, b: int, a: int) -> list[Command]:
    return [
        command(X, [a], controls=[c, b]),
        command(CNOT, [c], controls=[a]),
        command(CNOT, [b], controls=[c]),
    ]


def add_cuccaro(n: int) -> Circuit:
    """Ripple-carry adder |x>|y> -> |x>|x+y mod 2^n> with one carry
    ancilla returned clean (arXiv:quant-ph/0410184 circuit, no carry-out).

    Local qubits: [x..., y..., carry].
    """
    x = list(range(n))
    y = list(range(n, 2 * n))
    carry = 2 * n
    cmds: list[Command] = []
    chain = [carry] + x[:-1]
    for i in range(n):
        cmds.extend(_maj(chain[i], y[i], x[i]))
    for i in reversed(range(n)):
        cmds.extend(_uma(chain[i], y[i], x[i]))
    return Circuit(2 * n + 1, tuple(cmds))


def modulus_width(N: int) -> int:
    if N < 2:
        raise ValueError("modulus must be at least 2")
    return (N - 1).bit_length()


_PHI_NAMES = {0: "phiadd", 1: "cphiadd", 2: "ccphiadd"}
_PHI_INV_NAMES = {0: "phisub", 1: "cphisub", 2: "ccphisub"}


def modadd(a: int, N: int, n_controls: int = 0) -> Circuit:
    """Modular constant addition |b> -> |(b + a) mod N> for b < N.

    The working register spans n+1 qubits (one overflow bit) plus one
    comparison ancilla that is returned clean; the body is the standard
    Fourier-space construction (arXiv:quant-ph/0205095): add a, subtract
    N, detect the sign on the top bit, conditionally re-add N, then undo
    the comparison. Only the constant-a additions carry the external
    controls. Local qubits: [controls..., b (n+1)..., cmp].
    """
    if not 0 <= a < N:
        raise ValueError("need 0 <= a < N")
    if n_controls not in (0, 1, 2):
        raise ValueError("modadd supports at most two controls")
    n = modulus_width(N)
    width = n_controls + (n + 1) + 1
    ctrls = list(range(n_controls))
    b = list(range(n_controls, n_controls + n + 1))
    cmp_anc = width - 1
    add_a = _PHI_NAMES[n_controls]
    sub_a = _PHI_INV_NAMES[n_controls]

    cmds = [
        command(LibCall(add_a, a), ctrls + b),
        command(LibCall("phisub", N), b),
        command(LibCall("iqft"), b),
        command(CNOT, [cmp_anc], controls=[b[-1]]),
        command(LibCall("qft"), b),
        command(LibCall("cphiadd", N), [cmp_anc] + b),
        command(LibCall(sub_a, a), ctrls + b),
        command(LibCall("iqft"), b),
        command(X, [b[-1]]),
        command(CNOT, [cmp_anc], controls=[b[-1]]),
        command(X, [b[-1]]),
        command(LibCall("qft"), b),
        command(LibCall(add_a, a), ctrls + b),
    ]
    return Circuit(width, tuple(cmds))


def modsub(a: int, N: int, n_controls: int = 0) -> Circuit:
    return inverse(modadd(a, N, n_controls))


def controlled_ua(a: int, N: int) -> Circuit:
    """Controlled modular multiplication |x> -> |a*x mod N| when the
    control is set (arXiv:quant-ph/0205095): doubly-controlled modular
    additions into a zero register, a controlled swap-back, then the
    inverse multiplication with a^-1 to clear the scratch register.

    Local qubits: [control, x (n)..., b (n+1)..., cmp].
    """
    if math.gcd(a, N) != 1:
        raise ValueError(f"multiplier {a} is not invertible modulo {N}")
    n = modulus_width(N)
    ctrl = 0
    x = list(range(1, 1 + n))
    b = list(range(1 + n, 2 * n + 2))
    cmp_anc = 2 * n + 2
    a = a % N
    a_inv = pow(a, -1, N)

    cmds = [command(LibCall("qft"), b)]
    for i in range(n):
        cmds.append(
            command(LibCall("ccmodadd", (a << i) % N, N), [ctrl, x[i]] + b + [cmp_anc])
        )
    cmds.append(command(LibCall("iqft"), b))
    for i in range(n):
        cmds.append(command(Swap, [x[i], b[i]], controls=[ctrl]))
    cmds.append(command(LibCall("qft"), b))
    for i in range(n):
        cmds.append(
            command(LibCall("ccmodsub", (a_inv << i) % N, N), [ctrl, x[i]] + b + [cmp_anc])
        )
    cmds.append(command(LibCall("iqft"), b))
    return Circuit(2 * n + 3, tuple(cmds))


def qpe(controlled_powers, n_anc: int, system_width: int) -> Circuit:
    """Phase estimation scaffold.

    ``controlled_powers(k)`` must return a circuit over
    ``1 + system_width`` qubits applying the k-th squared power of the
    estimated unitary under the control on local qubit 0. Ancilla k
    drives power 2^k, so the most significant ancilla receives the
    largest power; the inverse transform runs on the reversed ancilla
    wires and outcomes decode via `decode_phase_bits`.
    """
    width = n_anc + system_width
    anc = list(range(n_anc))
    system = list(range(n_anc, width))
    cmds = [command(H, [k]) for k in anc]
    for k in range(n_anc):
        block = controlled_powers(k)
        if block.num_qubits != 1 + system_width:
            raise ValueError("controlled power block has the wrong width")
        cmds.extend(remap(block, [anc[k]] + system, width).commands)
    cmds.append(command(LibCall("iqft"), list(reversed(anc))))
    return Circuit(width, tuple(cmds))


def decode_phase_bits(m: int, n_anc: int) -> int:
    """Measured ancilla value -> phase numerator (classical bit reversal)."""
    return bit_reverse(m, n_anc)


def shor_qpe(a: int, N: int, n_anc: int | None = None) -> Circuit:
    """Order-finding phase estimation over controlled a^(2^k) multipliers.

    Local qubits: [ancillas (2n by default)..., x (n)..., b (n+1)..., cmp].
    The x register must be prepared in |1>; the caller measures the
    ancillas.
    """
    n = modulus_width(N)
    if n_anc is None:
        n_anc = 2 * n
    system_width = 2 * n + 2

    def powers(k: int) -> Circuit:
        call = LibCall("cua", pow(a, 1 << k, N), N)
        return Circuit(1 + system_width, (command(call, range(1 + system_width)),))

    return qpe(powers, n_anc, system_width)


# registry


def _fixed_args(expected: int, name: str, args):
    if len(args) != expected:
        raise CompileError(f"library '{name}' takes {expected} argument(s), got {len(args)}")


def _entry_qft(args, width):
    _fixed_args(0, "qft", args)
    return qft(width)


def _entry_iqft(args, width):
    _fixed_args(0, "iqft", args)
    return iqft(width)


def _phi_entry(name, inverse_form, n_controls):
    def make(args, width):
        _fixed_args(1, name, args)
        n = width - n_controls
        circuit = phi_add(args[0], n, n_controls)
        return inverse(circuit) if inverse_form else circuit

    return make


def _mod_entry(name, inverse_form, n_controls):
    def make(args, width):
        _fixed_args(2, name, args)
        a, N = args
        expected = n_controls + modulus_width(N) + 2
        if width != expected:
            raise CompileError(f"library '{name}' expects {expected} qubits, got {width}")
        return modsub(a, N, n_controls) if inverse_form else modadd(a, N, n_controls)

    return make


def _entry_cua(args, width):
    _fixed_args(2, "cua", args)
    a, N = args
    expected = 2 * modulus_width(N) + 3
    if width != expected:
        raise CompileError(f"library 'cua' expects {expected} qubits, got {width}")
    return controlled_ua(a, N)


def _entry_qpe(args, width):
    _fixed_args(2, "qpe", args)
    a, N = args
    n = modulus_width(N)
    n_anc = width - (2 * n + 2)
    if n_anc < 1:
        raise CompileError("qpe call is too narrow for its modulus")
    return shor_qpe(a, N, n_anc)


def _entry_toffoli(args, width):
    _fixed_args(0, "toffoli", args)
    if width != 3:
        raise CompileError("toffoli takes three qubits")
    return Circuit(3, tuple(toffoli_commands(0, 1, 2)))


def _entry_add(maker, name):
    def make(args, width):
        _fixed_args(0, name, args)
        n = width // 2
        circuit = maker(n)
        if circuit.num_qubits != width:
            raise CompileError(f"library '{name}' expects {circuit.num_qubits} qubits, got {width}")
        return circuit

    return make


def build_default_registry() -> LibraryRegistry:
    reg = LibraryRegistry()
    reg.register("qft", _entry_qft)
    reg.register("iqft", _entry_iqft)
    reg.register("phiadd", _phi_entry("phiadd", False, 0), controlled="cphiadd")
    reg.register("cphiadd", _phi_entry("cphiadd", False, 1), controlled="ccphiadd")
    reg.register("ccphiadd", _phi_entry("ccphiadd", False, 2))
    reg.register("phisub", _phi_entry("phisub", True, 0), controlled="cphisub")
    reg.register("cphisub", _phi_entry("cphisub", True, 1), controlled="ccphisub")
    reg.register("ccphisub", _phi_entry("ccphisub", True, 2))
    reg.register("modadd", _mod_entry("modadd", False, 0), controlled="cmodadd")
    reg.register("cmodadd", _mod_entry("cmodadd", False, 1), controlled="ccmodadd")
    reg.register("ccmodadd", _mod_entry("ccmodadd", False, 2))
    reg.register("modsub", _mod_entry("modsub", True, 0), controlled="cmodsub")
    reg.register("cmodsub", _mod_entry("cmodsub", True, 1), controlled="ccmodsub")
    reg.register("ccmodsub", _mod_entry("ccmodsub", True, 2))
    reg.register("cua", _entry_cua)
    reg.register("qpe", _entry_qpe)
    reg.register("toffoli", _entry_toffoli)
    reg.register("add_draper", _entry_add(add_draper, "add_draper"))
    reg.register("add_cuccaro", _entry_add(add_cuccaro, "add_cuccaro"))
    return reg


DEFAULT_REGISTRY = build_default_registry()

textfmt.register_call_names(*DEFAULT_REGISTRY.names())

register_libcall_adjoint("qft", "iqft")
for _k in range(3):
    register_libcall_adjoint(_PHI_NAMES[_k], _PHI_INV_NAMES[_k])
register_libcall_adjoint("modadd", "modsub")
register_libcall_adjoint("cmodadd", "cmodsub")
register_libcall_adjoint("ccmodadd", "ccmodsub")
register_libcall_adjoint("toffoli", "toffoli")
register_libcall_adjoint("cua", "cua", args_fn=lambda args: (pow(args[0], -1, args[1]), args[1]))


# emulator shortcuts: arithmetic calls as basis permutations


def _emu_modadd(sign):
    def fn(args, values, width):
        a, N = args
        a = (a * sign) % N
        shifted = (values + a) % N
        return np.where(values < N, shifted, values)

    return fn


def _emu_cua(args, values, width):
    a, N = args
    n = modulus_width(N)
    x = values & ((1 << n) - 1)
    rest = values >> n
    mapped = (x * a) % N
    new_x = np.where(x < N, mapped, x)
    return new_x | (rest << n)


for _name, _ctrls in (("modadd", 0), ("cmodadd", 1), ("ccmodadd", 2)):
    emulator.register_action(_name, _emu_modadd(+1), control_qubits=_ctrls)
for _name, _ctrls in (("modsub", 0), ("cmodsub", 1), ("ccmodsub", 2)):
    emulator.register_action(_name, _emu_modadd(-1), control_qubits=_ctrls)
emulator.register_action("cua", _emu_cua, control_qubits=1)


# adder auto-tuning


@dataclass(frozen=True)
class AdderChoice:
    width: int
    reports: dict[str, tuple[ResourceReport, float]]
    chosen: str
    cost: float


_autotune_cache: dict = {}


def autotune_adder(
    n: int,
    model: CostModel | None = None,
    eps_gate: float = 1e-2,
    registry: LibraryRegistry | None = None,
) -> AdderChoice:
    """Lower both adder variants, count resources under the model, and
    pick the cheaper one (ties: fewer qubits, then the Fourier adder).

    Results are cached per (width, model, tolerance) because tuning runs
    at library granularity.
    """
    if n < 1:
        raise ValueError("adder width must be positive")
    model = model or CostModel()
    key = (n, tuple(sorted(model.weights.items())), model.default_weight, eps_gate)
    if key in _autotune_cache:
        return _autotune_cache[key]
    registry = registry or DEFAULT_REGISTRY

    reports: dict[str, tuple[ResourceReport, float]] = {}
    for name, maker in (("draper", add_draper), ("cuccaro", add_cuccaro)):
        circuit = inline_libraries(maker(n), registry)
        lowered = lower(circuit, eps_gate=eps_gate)
        reports[name] = count_resources(lowered.circuit, model, swap_as_cnots=True)

    def rank(name: str):
        report, cost = reports[name]
        return (cost, report.width, 0 if name == "draper" else 1)

    chosen = min(("draper", "cuccaro"), key=rank)
    choice = AdderChoice(n, reports, chosen, reports[chosen][1])
    _autotune_cache[key] = choice
    return choice
