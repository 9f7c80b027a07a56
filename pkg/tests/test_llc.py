import math

import numpy as np
import pytest

from qstack.gates import CNOT, CR, Gate, H, Phase, Rz, Swap, T, X, Y, gate_matrix
from qstack.hlc import CompileError
from qstack.ir import Circuit, LLQIR, command, validate
from qstack.linalg import phase_distance
from qstack.llc import (
    LowerResult, UnsupportedDecompositionError, controlled_1q_commands,
    decompose_controlled_phase, decompose_controlled_rz, expand_controls,
    lower, peephole_optimize, toffoli_commands,
)
from qstack.synthesis import build_database
from qstack.backends.sim import circuit_unitary

from helpers import oracle_unitary


@pytest.fixture(scope="module")
def db():
    return build_database(15)


def crz_matrix(theta):
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = gate_matrix(Rz(theta))
    return m


def unitary_of(commands, n):
    return circuit_unitary(Circuit(n, tuple(commands)))


# controlled-rz decompositions


@pytest.mark.parametrize("strategy", ["a", "b"])
def test_controlled_rz_two_rotations_two_cnots(strategy):
    theta = 0.813
    cmds = decompose_controlled_rz(command(Rz(theta), [0], [1]), strategy)
    names = [c.gate.name for c in cmds]
    assert names.count("rz") == 2 and names.count("cnot") == 2
    assert phase_distance(unitary_of(cmds, 2), crz_matrix(theta)) < 1e-12


def test_controlled_rz_strategy_c_single_rotation():
    theta = -1.1
    cmds = decompose_controlled_rz(command(Rz(theta), [0], [1]), "c", ancilla=2)
    rotations = [c for c in cmds if c.gate.name == "rz"]
    assert len(rotations) == 1 and rotations[0].gate.param == theta
    assert sum(1 for c in cmds if c.gate.name == "swap") == 2
    u = unitary_of(cmds, 3)
    expected = np.eye(8, dtype=complex)
    expected[:4, :4] = crz_matrix(theta)  # ancilla (qubit 2) stays |0>
    assert phase_distance(u[:4, :4], crz_matrix(theta)) < 1e-12
    assert np.max(np.abs(u[4:, :4])) < 1e-12


def test_controlled_rz_zero_angle_folds_away():
    from qstack.hlc import fold_rotations

    cmds = decompose_controlled_rz(command(Rz(0.0), [0], [1]), "a")
    folded = peephole_optimize(fold_rotations(Circuit(2, tuple(cmds))))
    assert len(folded) == 0


def test_controlled_rz_rejects_multiple_controls():
    with pytest.raises(UnsupportedDecompositionError):
        decompose_controlled_rz(command(Rz(1.0), [0], [1, 2]), "a")


# controlled-phase decompositions


def test_cr_half_pi_exact_clifford_t():
    cmds = decompose_controlled_phase(command(CR(-math.pi / 2), [1], [0]), "a")
    lowered = lower(Circuit(2, tuple(cmds)), eps_gate=0.5)
    names = [c.gate.name for c in lowered.circuit.commands]
    t_count = names.count("t") + names.count("tdg")
    assert t_count == 3
    assert lowered.synth_distances == ()
    expected = np.diag([1, 1, 1, np.exp(-1j * math.pi / 2)])
    assert phase_distance(circuit_unitary(lowered.circuit), expected) < 1e-12


def test_cr_zero_is_empty():
    assert decompose_controlled_phase(command(CR(0.0), [1], [0])) == []


def test_cr_quarter_pi_needs_synthesis(db):
    cmds = decompose_controlled_phase(command(CR(-math.pi / 4), [1], [0]))
    lowered = lower(Circuit(2, tuple(cmds)), eps_gate=1e-2, db=db)
    assert len(lowered.synth_distances) == 3
    assert all(d <= 1e-2 for d in lowered.synth_distances)
    expected = np.diag([1, 1, 1, np.exp(-1j * math.pi / 4)])
    assert phase_distance(circuit_unitary(lowered.circuit), expected) <= lowered.error_bound + 1e-12


@pytest.mark.parametrize("theta", [0.71, -2.3])
@pytest.mark.parametrize("strategy", ["a", "b", "c"])
def test_cr_general_angle_all_strategies(theta, strategy, db):
    cmds = decompose_controlled_phase(command(CR(theta), [1], [0]), strategy, ancilla=2)
    n = 3 if strategy == "c" else 2
    u = unitary_of(cmds, n)
    expected = np.diag([1, 1, 1, np.exp(1j * theta)])
    assert phase_distance(u[: 4, : 4], expected) < 1e-12


# toffoli and generic controlled gates


def test_toffoli_matches_matrix_oracle():
    cmds = toffoli_commands(0, 1, 2)
    u = unitary_of(cmds, 3)
    expected = np.eye(8, dtype=complex)
    expected[[3, 7]] = expected[[7, 3]]  # swap |011> and |111>
    assert np.max(np.abs(u - expected)) < 1e-12
    names = [c.gate.name for c in cmds]
    assert names.count("t") + names.count("tdg") == 7
    assert names.count("cnot") == 6


@pytest.mark.parametrize("gate", [H, Y, T, Gate("sdg")])
def test_generic_controlled_1q_is_exact(gate):
    cmds = controlled_1q_commands(command(gate, [0], [1]))
    u = unitary_of(cmds, 2)
    expected = np.eye(4, dtype=complex)
    expected[2:, 2:] = gate_matrix(gate)
    assert np.max(np.abs(u - expected)) < 1e-12


def test_expand_controls_handles_nested_kinds():
    rng = np.random.default_rng(17)
    circuits = [
        Circuit(3, (command(Rz(0.4), [0], [1, 2]),)),
        Circuit(3, (command(CR(0.9), [0], [1, 2]),)),
        Circuit(3, (command(Swap, [0, 1], [2]),)),
        Circuit(3, (command(X, [0], [1, 2]),)),
        Circuit(3, (command(Gate("s"), [0], [2]),)),
        Circuit(3, (command(H, [1], [0]),)),
    ]
    for c in circuits:
        expanded = expand_controls(c, "a")
        for cmd in expanded.commands:
            assert cmd.gate.name in ("measure", "alloc", "dealloc") or len(cmd.controls) <= 1
            if cmd.controls:
                assert cmd.gate.name == "cnot"
        assert phase_distance(
            circuit_unitary(expanded)[: 8, : 8], circuit_unitary(c)
        ) < 1e-10


def test_expand_controls_strategy_c_requests_ancilla():
    c = Circuit(2, (command(Rz(0.4), [0], [1]),))
    expanded = expand_controls(c, "c")
    assert expanded.num_qubits == 3
    assert expanded.commands[0].gate.name == "alloc"
    assert expanded.commands[-1].gate.name == "dealloc"


# peephole


def test_peephole_cancels_pairs():
    c = Circuit(1, (command(H, [0]), command(H, [0])))
    assert len(peephole_optimize(c)) == 0


def test_peephole_merges_t_pairs():
    c = Circuit(1, (command(T, [0]), command(T, [0])))
    out = peephole_optimize(c)
    assert [cmd.gate.name for cmd in out.commands] == ["s"]


def test_peephole_cascades():
    c = Circuit(1, tuple(command(Gate("t"), [0]) for _ in range(8)))
    assert len(peephole_optimize(c)) == 0  # t^8 = identity via s/z merges


def test_peephole_cnot_pair_with_gap_on_other_wire():
    c = Circuit(
        3,
        (
            command(CNOT, [1], [0]),
            command(H, [2]),
            command(CNOT, [1], [0]),
        ),
    )
    out = peephole_optimize(c)
    assert [cmd.gate.name for cmd in out.commands] == ["h"]


def test_peephole_respects_control_direction():
    c = Circuit(2, (command(CNOT, [1], [0]), command(CNOT, [0], [1])))
    assert len(peephole_optimize(c)) == 2


def test_peephole_idempotent_tcount_and_semantics():
    from helpers import random_unitary_circuit

    rng = np.random.default_rng(23)
    for _ in range(20):
        base = lower(random_unitary_circuit(rng, 4, 30), eps_gate=0.2).circuit
        once = peephole_optimize(base)
        twice = peephole_optimize(once)
        assert once == twice

        def t_count(circ):
            return sum(1 for cmd in circ.commands if cmd.gate.name in ("t", "tdg"))

        assert t_count(once) <= t_count(base)
        assert len(once) <= len(base)
        if base.num_qubits <= 5:
            assert phase_distance(circuit_unitary(base), circuit_unitary(once)) < 1e-10


# lower


def test_lower_clifford_circuit_is_exact_and_synthesis_free():
    c = Circuit(2, (command(H, [0]), command(CNOT, [1], [0]), command(Gate("s"), [1])))
    res = lower(c, eps_gate=1e-2)
    assert res.synth_distances == ()
    assert res.circuit.level == LLQIR
    assert validate(res.circuit) == []
    assert phase_distance(circuit_unitary(res.circuit), circuit_unitary(c)) < 1e-12


def test_lower_soundness_error_bound(db):
    rng = np.random.default_rng(31)
    from helpers import random_unitary_circuit

    for _ in range(5):
        c = random_unitary_circuit(rng, 3, 12)
        res = lower(c, eps_gate=5e-2, db=db)
        assert validate(res.circuit) == []
        dist = phase_distance(circuit_unitary(res.circuit), circuit_unitary(c))
        assert dist <= res.error_bound + 1e-9


def test_lower_swap_becomes_three_cnots():
    c = Circuit(2, (command(Swap, [0, 1]),))
    res = lower(c, eps_gate=1e-2)
    assert [cmd.gate.name for cmd in res.circuit.commands] == ["cnot"] * 3
    assert phase_distance(circuit_unitary(res.circuit), circuit_unitary(c)) < 1e-12


def test_lower_y_gate():
    c = Circuit(1, (command(Y, [0]),))
    res = lower(c, eps_gate=1e-2)
    assert phase_distance(circuit_unitary(res.circuit), gate_matrix(Y)) < 1e-12


def test_lower_rejects_libcalls():
    c = Circuit(1, (command(Gate("libcall", call="qft"), [0]),))
    with pytest.raises(CompileError, match="qft"):
        lower(c, eps_gate=1e-2)


def test_lower_records_distances_per_synthesized_rotation(db):
    c = Circuit(1, (command(Rz(0.3), [0]), command(Phase(1.1), [0])))
    res = lower(c, eps_gate=1e-2, db=db, optimize=False)
    assert len(res.synth_distances) == 2
    assert res.error_bound == pytest.approx(sum(res.synth_distances))
