import math

import numpy as np
import pytest

from qstack.gates import CR, Gate, LibCall, X
from qstack.hlc import inline_libraries, resolve_controls
from qstack.ir import Circuit, command, concat, inverse, remap, validate
from qstack.linalg import bit_reverse, phase_distance
from qstack.qlib import (
    DEFAULT_REGISTRY, add_cuccaro, add_draper, autotune_adder, controlled_ua,
    decode_phase_bits, iqft, modadd, modsub, modulus_width, phi_add, qft, qpe,
    shor_qpe,
)
from qstack.backends.resources import CostModel, count_resources
from qstack.backends.sim import Statevector, circuit_unitary, simulate
from qstack.llc import lower


def inline(c):
    return inline_libraries(c, DEFAULT_REGISTRY)


def basis_map(c, index):
    """Simulate a basis state; assert the result is a basis state and return it."""
    out = simulate(inline(c), index).to_array()
    top = int(np.argmax(np.abs(out)))
    assert abs(abs(out[top]) - 1.0) < 1e-9, "output is not a computational basis state"
    return top


# Fourier transform


def test_qft_single_qubit_is_hadamard():
    c = qft(1)
    assert [cmd.gate.name for cmd in c.commands] == ["h"]


def test_iqft3_ladder_structure():
    c = iqft(3)
    kinds = [cmd.gate.name for cmd in c.commands]
    assert kinds == ["h", "cr", "h", "cr", "cr", "h"]
    angles = [cmd.gate.param for cmd in c.commands if cmd.gate.name == "cr"]
    assert angles == pytest.approx([-math.pi / 2, -math.pi / 4, -math.pi / 2])
    report, _ = count_resources(c)
    assert report.counts == {"h": 3, "cr": 3}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_qft_matches_dft_formula_with_bit_reversed_output(n):
    u = circuit_unitary(qft(n))
    dim = 1 << n
    expected = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        for k in range(dim):
            expected[k, x] = np.exp(2j * np.pi * x * bit_reverse(k, n) / dim) / math.sqrt(dim)
    assert np.max(np.abs(u - expected)) < 1e-12


def test_iqft_inverts_qft():
    for n in (1, 2, 4):
        u = circuit_unitary(concat(n, qft(n), iqft(n)))
        assert np.max(np.abs(u - np.eye(1 << n))) < 1e-12


# Fourier-space constant adder


def test_phi_add_zero_is_empty():
    assert len(phi_add(0, 4)) == 0


def test_phi_add_exhaustive_n4():
    n = 4
    for a in range(1 << n):
        c = concat(n, qft(n), phi_add(a, n), iqft(n))
        for x in range(1 << n):
            assert basis_map(c, x) == (x + a) % (1 << n)


def test_doubly_controlled_phi_add_fires_only_when_both_set():
    n, a = 3, 5
    body = phi_add(a, n, n_controls=2)  # qubits [c0, c1, reg...]
    reg = [2, 3, 4]
    c = Circuit(5, tuple(
        list(remap(qft(n), reg, 5).commands)
        + list(body.commands)
        + list(remap(iqft(n), reg, 5).commands)
    ))
    x = 3
    for ctrls in range(4):
        index = ctrls | (x << 2)
        expected_x = (x + a) % 8 if ctrls == 3 else x
        assert basis_map(c, index) == ctrls | (expected_x << 2)


# ripple-carry adder


def test_cuccaro_single_bit_half_add():
    c = add_cuccaro(1)
    for x in range(2):
        for y in range(2):
            out = basis_map(c, x | (y << 1))
            assert out == x | (((x + y) % 2) << 1)


def test_cuccaro_exhaustive_n3():
    n = 3
    c = add_cuccaro(n)
    for x in range(8):
        for y in range(8):
            out = basis_map(c, x | (y << n))
            assert out == x | (((x + y) % 8) << n), (x, y)


def test_cuccaro_agrees_with_draper_path_n3():
    n = 3
    cuccaro = add_cuccaro(n)
    draper = add_draper(n)
    for x in range(8):
        for y in range(8):
            idx = x | (y << n)
            assert basis_map(cuccaro, idx) == basis_map(draper, idx)


# modular addition


def test_modadd_emits_listing_sequence():
    labels = [cmd.gate.label() for cmd in modadd(3, 7, n_controls=2).commands]
    assert labels == [
        "ccphiadd", "phisub", "iqft", "cnot", "qft", "cphiadd", "ccphisub",
        "iqft", "x", "cnot", "x", "qft", "ccphiadd",
    ]


def test_modadd_exhaustive_n7():
    N = 7
    n = modulus_width(N)
    width = n + 2
    for a in range(N):
        c = modadd(a, N)
        wrapped = Circuit(width, tuple(
            list(remap(qft(n + 1), list(range(n + 1)), width).commands)
            + list(c.commands)
            + list(remap(iqft(n + 1), list(range(n + 1)), width).commands)
        ))
        for b in range(N):
            assert basis_map(wrapped, b) == (a + b) % N, (a, b)


def test_modadd_zero_is_identity_action():
    N = 7
    n = modulus_width(N)
    width = n + 2
    c = modadd(0, N)
    wrapped = Circuit(width, tuple(
        list(remap(qft(n + 1), list(range(n + 1)), width).commands)
        + list(c.commands)
        + list(remap(iqft(n + 1), list(range(n + 1)), width).commands)
    ))
    for b in range(N):
        assert basis_map(wrapped, b) == b


def test_modsub_inverts_modadd():
    N = 7
    n = modulus_width(N)
    width = n + 2
    c = concat(width, modadd(3, N), modsub(3, N))
    wrapped = Circuit(width, tuple(
        list(remap(qft(n + 1), list(range(n + 1)), width).commands)
        + list(c.commands)
        + list(remap(iqft(n + 1), list(range(n + 1)), width).commands)
    ))
    for b in range(N):
        assert basis_map(wrapped, b) == b


def test_controlled_variant_matches_generic_construction():
    # registry invariant: a registered controlled variant must equal the
    # generic controlled build of the plain entry (on the valid domain)
    a, n = 5, 3
    plain = phi_add(a, n)
    generic = resolve_controls(
        plain.with_commands(
            command(cmd.gate, cmd.targets, cmd.controls, cmd.pending | {n}, cmd.section)
            for cmd in plain.commands
        )
    )
    generic = remap(generic, [1, 2, 3, 0], 4)  # control first, register after
    variant = DEFAULT_REGISTRY.generate("cphiadd", (a,), n + 1)
    assert phase_distance(circuit_unitary(generic), circuit_unitary(variant)) < 1e-10


def test_controlled_modadd_variant_on_valid_domain():
    # the controlled variant must act like the generic controlled
    # construction wherever the plain entry's contract holds (b < N)
    a, N = 2, 3
    n = modulus_width(N)
    width = 1 + n + 2
    b_reg = list(range(1, n + 2))
    wrapped = Circuit(width, tuple(
        list(remap(qft(n + 1), b_reg, width).commands)
        + list(modadd(a, N, n_controls=1).commands)
        + list(remap(iqft(n + 1), b_reg, width).commands)
    ))
    for ctrl in (0, 1):
        for b in range(N):
            idx = ctrl | (b << 1)
            expected_b = (b + a) % N if ctrl else b
            assert basis_map(wrapped, idx) == ctrl | (expected_b << 1)


# controlled modular multiplication


def test_controlled_ua_requires_invertible_multiplier():
    with pytest.raises(ValueError, match="not invertible"):
        controlled_ua(6, 15)


def test_controlled_ua_identity_multiplier():
    c = inline(controlled_ua(1, 15))
    n = 4
    for x in (1, 7, 14):
        idx = 1 | (x << 1)
        out = simulate(c, idx).to_array()
        assert abs(abs(out[idx]) - 1.0) < 1e-9


def test_controlled_ua_matches_classical_map():
    N, a = 15, 7
    n = modulus_width(N)
    c = inline(controlled_ua(a, N))
    for x in range(N):
        idx = 1 | (x << 1)
        out = simulate(c, idx).to_array()
        expect = 1 | (((a * x) % N) << 1)
        assert abs(abs(out[expect]) - 1.0) < 1e-9, x


def test_controlled_ua_control_off_fixes_basis_states():
    N, a = 15, 7
    c = inline(controlled_ua(a, N))
    for x in (0, 1, 5, 11):
        idx = 0 | (x << 1)
        out = simulate(c, idx).to_array()
        assert abs(abs(out[idx]) - 1.0) < 1e-9


# phase estimation


def qpe_distribution(circuit, n_anc, init_index):
    sv = simulate(inline(circuit), init_index)
    probs = sv.probabilities()
    anc_probs = np.zeros(1 << n_anc)
    for idx, p in enumerate(probs):
        anc_probs[idx & ((1 << n_anc) - 1)] += p
    return anc_probs


def test_qpe_exact_quarter_phase():
    n_anc = 2

    def powers(k):
        return Circuit(2, (command(CR(2 * math.pi * 0.25 * (1 << k)), [1], controls=[0]),))

    circuit = qpe(powers, n_anc, 1)
    # eigenstate |1> on the system qubit
    prep = Circuit(3, (command(X, [2]),))
    full = concat(3, prep, circuit)
    probs = qpe_distribution(full, n_anc, 0)
    decoded = {decode_phase_bits(m, n_anc): p for m, p in enumerate(probs)}
    assert decoded[1] > 1.0 - 1e-10  # phase 0.25 = 1/4


def test_qpe_identity_gives_zero():
    n_anc = 3

    def powers(k):
        return Circuit(2, ())

    circuit = qpe(powers, n_anc, 1)
    probs = qpe_distribution(circuit, n_anc, 0)
    assert probs[0] > 1.0 - 1e-10


def test_qpe_one_third_phase_mode():
    n_anc = 4
    phase = 1.0 / 3.0

    def powers(k):
        return Circuit(2, (command(CR(2 * math.pi * phase * (1 << k)), [1], controls=[0]),))

    circuit = qpe(powers, n_anc, 1)
    prep = Circuit(5, (command(X, [4]),))
    probs = qpe_distribution(concat(5, prep, circuit), n_anc, 0)
    decoded = np.zeros_like(probs)
    for m, p in enumerate(probs):
        decoded[decode_phase_bits(m, n_anc)] = p
    assert int(np.argmax(decoded)) == round(16 * phase) == 5


def test_qpe_libcall_inlines_to_layered_structure():
    a, N = 7, 15
    n = modulus_width(N)
    n_anc = 2 * n
    width = n_anc + 2 * n + 2
    c = Circuit(width, (command(LibCall("qpe", a, N), list(range(width))),))
    once = inline_libraries(c, DEFAULT_REGISTRY, rounds=1)
    labels = [cmd.gate.label() for cmd in once.commands]
    assert labels[:n_anc] == ["h"] * n_anc
    assert labels[n_anc : n_anc + n_anc] == ["cua"] * n_anc
    assert labels[-1] == "iqft"
    args = [cmd.gate.args for cmd in once.commands if cmd.gate.label() == "cua"]
    assert args == [(pow(a, 1 << k, N), N) for k in range(n_anc)]


# ancilla hygiene across the library


def test_library_circuits_are_basis_permutations_with_clean_ancillas():
    N = 7
    n = modulus_width(N)
    b_reg = list(range(n + 1))
    wrapped_modadd = Circuit(n + 2, tuple(
        list(remap(qft(n + 1), b_reg, n + 2).commands)
        + list(modadd(2, N).commands)
        + list(remap(iqft(n + 1), b_reg, n + 2).commands)
    ))
    cases = [
        # circuit, valid inputs, bits above which everything must be zero
        (add_cuccaro(2), range(16), 4),
        (inline(wrapped_modadd), range(N), n + 1),
        (inline(controlled_ua(7, 15)), [c | (x << 1) for c in (0, 1) for x in range(15)], 5),
    ]
    for circuit, domain, payload_bits in cases:
        for x in domain:
            out = simulate(circuit, x).to_array()
            top = int(np.argmax(np.abs(out)))
            assert abs(abs(out[top]) - 1.0) < 1e-9, x
            assert top >> payload_bits == 0, "ancillas not returned to zero"


# auto-tuning


def test_autotune_reports_match_recount():
    model = CostModel({"t": 5.0, "tdg": 5.0})
    choice = autotune_adder(3, model)
    assert set(choice.reports) == {"draper", "cuccaro"}
    for name in ("draper", "cuccaro"):
        report, cost = choice.reports[name]
        recount = sum(model.weight(k) * v for k, v in report.counts.items())
        assert cost == pytest.approx(recount)
    assert choice.chosen == min(
        ("draper", "cuccaro"),
        key=lambda v: (choice.reports[v][1], choice.reports[v][0].width, v != "draper"),
    )
    assert choice.cost == choice.reports[choice.chosen][1]


def test_autotune_scale_invariance():
    base = CostModel({"t": 3.0, "cnot": 2.0}, default_weight=1.0)
    doubled = CostModel({"t": 6.0, "cnot": 4.0}, default_weight=2.0)
    assert autotune_adder(4, base).chosen == autotune_adder(4, doubled).chosen


def test_autotune_cache_returns_same_object():
    model = CostModel({"t": 2.0})
    assert autotune_adder(2, model) is autotune_adder(2, model)


def test_autotune_tcount_matches_hand_count():
    choice = autotune_adder(4, CostModel({"t": 1.0, "tdg": 1.0}, default_weight=0.0))
    for name in ("draper", "cuccaro"):
        report, cost = choice.reports[name]
        assert cost == pytest.approx(report.t_count)
