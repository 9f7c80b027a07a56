import numpy as np
import pytest

from qstack.gates import CNOT, CR, Gate, H, Rz, T, Tdg, X
from qstack.ir import (
    Circuit, Command, LLQIR, NonInvertibleError, ValidationError, check,
    command, concat, inverse, remap, validate,
)
from qstack.backends.sim import circuit_unitary

from helpers import random_unitary_circuit


def test_inverse_empty():
    c = Circuit(2)
    assert inverse(c) == c


def test_inverse_reverses_and_adjoints():
    c = Circuit(1, (command(H, [0]), command(T, [0])))
    inv = inverse(c)
    assert [cmd.gate for cmd in inv.commands] == [Tdg, H]


def test_inverse_swaps_section_tags():
    c = Circuit(1, (command(H, [0], section="compute"),))
    assert inverse(c).commands[0].section == "uncompute"


def test_inverse_rejects_measurement():
    c = Circuit(1, (command(Gate("measure"), [0]),))
    with pytest.raises(NonInvertibleError):
        inverse(c)


def test_inverse_is_semantic_inverse_on_random_circuits():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        c = random_unitary_circuit(rng, n, 25)
        u = circuit_unitary(c)
        v = circuit_unitary(inverse(c))
        assert np.max(np.abs(v @ u - np.eye(1 << n))) < 1e-10


def test_validate_out_of_range():
    c = Circuit(4, (command(CNOT, [5], controls=[0]),))
    errors = validate(c)
    assert len(errors) == 1 and "out of range" in errors[0] and "command 0" in errors[0]


def test_validate_target_control_overlap():
    c = Circuit(2, (command(X, [0], controls=[0]),))
    assert any("overlap" in e for e in validate(c))


def test_validate_llqir_gateset_violation():
    c = Circuit(1, (command(Rz(0.1), [0]),), level=LLQIR)
    assert any("not in gateset" in e for e in validate(c))


def test_validate_llqir_rejects_extra_controls_and_tags():
    bad = Circuit(
        2,
        (
            command(H, [0], controls=[1]),
            command(H, [0], section="compute"),
            command(Gate("libcall", call="qft"), [0, 1]),
        ),
        level=LLQIR,
    )
    errors = validate(bad)
    assert any("controls on 'h'" in e for e in errors)
    assert any("section tag" in e for e in errors)
    assert any("library call" in e for e in errors)


def test_validate_unbalanced_sections():
    c = Circuit(1, (command(H, [0], section="compute"),))
    assert any("unbalanced" in e for e in validate(c))


def test_validate_non_finite_param():
    c = Circuit(1, (command(Rz(float("nan")), [0]),))
    assert any("non-finite" in e for e in validate(c))


def test_validate_controlled_measure():
    c = Circuit(2, (command(Gate("measure"), [0], controls=[1]),))
    assert any("measurement" in e for e in validate(c))


def test_check_raises_with_error_list():
    c = Circuit(1, (command(X, [3]),))
    with pytest.raises(ValidationError) as exc:
        check(c)
    assert exc.value.errors


def test_valid_circuit_passes():
    c = Circuit(
        3,
        (
            command(H, [0], section="compute"),
            command(CR(0.5), [1], controls=[0]),
            command(H, [0], section="uncompute"),
        ),
    )
    assert validate(c) == []


def test_remap():
    c = Circuit(2, (command(CNOT, [1], controls=[0]),))
    r = remap(c, [3, 1], 4)
    assert r.num_qubits == 4
    assert r.commands[0].targets == (1,) and r.commands[0].controls == frozenset({3})


def test_concat():
    a = Circuit(2, (command(H, [0]),))
    b = Circuit(2, (command(X, [1]),))
    c = concat(2, a, b)
    assert len(c) == 2 and c.commands[0].gate == H and c.commands[1].gate == X
