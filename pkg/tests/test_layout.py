import numpy as np
import pytest

from qstack.gates import CNOT, Gate, H, Swap, T, X
from qstack.ir import Circuit, command, validate
from qstack.layout import (
    ConnectivityGraph, QecScheme, RoutingError, Schedule, check_adjacency,
    identity_map, permutation_matrix, route, schedule,
)
from qstack.backends.sim import circuit_unitary

from helpers import random_unitary_circuit


def test_graph_constructors():
    line = ConnectivityGraph.line(4)
    assert line.adjacent(0, 1) and line.adjacent(2, 3) and not line.adjacent(0, 2)
    ring = ConnectivityGraph.ring(4)
    assert ring.adjacent(0, 3)
    full = ConnectivityGraph.complete(4)
    assert all(full.adjacent(i, j) for i in range(4) for j in range(4) if i != j)


def test_graph_from_text():
    g = ConnectivityGraph.from_text(
        "# demo\nqubits 3\nedge 0 1\nedge 1 2\nduration cnot 2.5\nduration h 0.5\n"
    )
    assert g.num_qubits == 3 and g.adjacent(0, 1)
    assert g.duration("cnot") == 2.5
    assert g.duration("h") == 0.5
    assert g.duration("t") == 1.0
    assert g.duration("swap") == 7.5  # 3x cnot by default


def test_disconnected_graph_rejected():
    with pytest.raises(RoutingError, match="not connected"):
        ConnectivityGraph(4, frozenset({(0, 1), (2, 3)}))


def test_route_cnot_on_line():
    c = Circuit(3, (command(CNOT, [2], controls=[0]),))
    routed, final = route(c, ConnectivityGraph.line(3))
    names = [(cmd.gate.name, tuple(sorted(cmd.qubits()))) for cmd in routed.commands]
    assert names == [("swap", (1, 2)), ("cnot", (0, 1))]
    assert final == (0, 2, 1)


def test_route_already_adjacent_unchanged():
    c = Circuit(3, (command(CNOT, [1], controls=[0]), command(H, [2])))
    routed, final = route(c, ConnectivityGraph.line(3))
    assert routed.commands == c.commands
    assert final == identity_map(3)


def test_route_complete_graph_never_swaps():
    rng = np.random.default_rng(3)
    for _ in range(10):
        c = random_unitary_circuit(rng, 5, 30)
        routed, _ = route(c, ConnectivityGraph.complete(5))
        assert all(cmd.gate.name != "swap" or cmd in c.commands for cmd in routed.commands)
        assert len(routed) == len(c)


def test_route_capacity_error():
    c = Circuit(5, ())
    with pytest.raises(RoutingError, match="graph has 3"):
        route(c, ConnectivityGraph.line(3))


def test_route_adjacency_predicate_on_corpus():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        c = random_unitary_circuit(rng, n, 40)
        graph = ConnectivityGraph.line(n) if rng.random() < 0.5 else ConnectivityGraph.ring(n)
        routed, _ = route(c, graph)
        assert check_adjacency(routed, graph)
        assert validate(routed) == []


def test_route_preserves_semantics_under_tracked_permutation():
    rng = np.random.default_rng(5)
    for trial in range(15):
        n = int(rng.integers(2, 6))
        c = random_unitary_circuit(rng, n, 25)
        graph = ConnectivityGraph.line(n)
        initial = tuple(rng.permutation(n).tolist()) if trial % 2 else identity_map(n)
        routed, final = route(c, graph, initial=initial)
        u_routed = circuit_unitary(routed)
        u_orig = circuit_unitary(c)
        p_init = permutation_matrix(initial, n)
        p_final = permutation_matrix(final, n)
        assert np.max(np.abs(u_routed - p_final @ u_orig @ p_init.T)) < 1e-10


def test_route_rejects_wide_commands():
    c = Circuit(3, (command(X, [0], controls=[1, 2]),))
    with pytest.raises(RoutingError, match="3-qubit"):
        route(c, ConnectivityGraph.line(3))


# scheduling


def test_schedule_parallel_hadamards():
    g = ConnectivityGraph.line(2)
    c = Circuit(2, (command(H, [0]), command(H, [1])))
    s = schedule(c, g)
    assert s.starts == (0.0, 0.0)
    assert s.depth == 1.0


def test_schedule_dependency_chain():
    g = ConnectivityGraph.line(2)
    c = Circuit(2, (command(H, [0]), command(CNOT, [1], controls=[0])))
    assert schedule(c, g).depth == 2.0


def test_schedule_serial_chain_depth():
    g = ConnectivityGraph.line(1)
    k = 7
    c = Circuit(1, tuple(command(T, [0]) for _ in range(k)))
    assert schedule(c, g).depth == float(k)


def test_schedule_durations_respected():
    g = ConnectivityGraph.from_text("qubits 2\nedge 0 1\nduration h 2\nduration cnot 5\n")
    c = Circuit(2, (command(H, [0]), command(CNOT, [1], controls=[0]), command(H, [1])))
    s = schedule(c, g)
    assert s.starts == (0.0, 2.0, 7.0)
    assert s.depth == 9.0


def test_schedule_no_qubit_overlap():
    rng = np.random.default_rng(6)
    g = ConnectivityGraph.complete(4)
    c = random_unitary_circuit(rng, 4, 40)
    s = schedule(c, g)
    spans = list(zip(s.starts, (s.starts[i] + g.duration(c.commands[i].gate.name) for i in range(len(c)))))
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if c.commands[i].qubits() & c.commands[j].qubits():
                assert spans[i][1] <= spans[j][0] + 1e-12


# QEC accounting


def test_qec_schemes():
    none = QecScheme.none()
    assert (none.qubit_multiplier, none.gate_multiplier, none.time_multiplier) == (1, 1, 1)
    rep = QecScheme.repetition(3)
    assert (rep.qubit_multiplier, rep.gate_multiplier, rep.time_multiplier) == (3, 3, 1)
    surf = QecScheme.surface(5)
    assert (surf.qubit_multiplier, surf.gate_multiplier, surf.time_multiplier) == (25, 25, 5)
    assert QecScheme.parse("surface(3)") == QecScheme.surface(3)
    assert QecScheme.parse("none") == none
    with pytest.raises(ValueError):
        QecScheme.parse("magic(3)")
