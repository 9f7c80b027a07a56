"""Factoring demonstration: order finding by phase estimation plus the
classical pre- and post-processing around it.

A trial picks a random base, runs phase estimation over controlled
modular multiplication with 2n ancillas on |x=1>, decodes the measured
phase through a continued-fraction expansion, and applies the standard
even-order / nontrivial-root checks. Trials are seeded as
``seed + trial_index`` so runs are reproducible and independent trials
could execute concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gates import Gate, X
from .hlc import inline_libraries
from .ir import Circuit, command, concat
from .qlib import DEFAULT_REGISTRY, decode_phase_bits, modulus_width, shor_qpe
from .backends.emulator import Distribution, emulate
from .backends.sim import measure as sim_measure, simulate

#: library calls the emulator keeps opaque (classical actions registered)
EMULATED_CALLS = frozenset({"cua", "qft", "iqft"})


def continued_fraction_denominator(m: int, q: int, bound: int) -> int:
    """Denominator of the best convergent of m/q with denominator <= bound."""
    if not 0 <= m < q:
        raise ValueError("need 0 <= m < q")
    if m == 0:
        return 1
    num, den = m, q
    h_prev, h = 1, 0  # convergent denominators q_{k-2}, q_{k-1}
    best = 1
    while den:
        a = num // den
        num, den = den, num - a * den
        h_prev, h = h, a * h + h_prev
        if h > bound:
            break
        best = h
    return best


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def perfect_power_root(n: int) -> int | None:
    """Smallest p with p^k = n for some k >= 2, else None."""
    for k in range(2, n.bit_length() + 1):
        p = round(n ** (1.0 / k))
        for candidate in (p - 1, p, p + 1):
            if candidate >= 2 and candidate ** k == n:
                return candidate
    return None


def multiplicative_order(a: int, n: int) -> int:
    value, order = a % n, 1
    while value != 1:
        value = (value * a) % n
        order += 1
    return order


@dataclass(frozen=True)
class Trial:
    index: int
    a: int
    outcome: int | None = None
    phase: int | None = None
    r: int | None = None
    note: str = ""
    factors: tuple[int, int] | None = None

    def line(self) -> str:
        parts = [f"trial {self.index}: a={self.a}"]
        if self.outcome is not None:
            parts.append(f"m={self.outcome} phase={self.phase} r={self.r}")
        if self.note:
            parts.append(self.note)
        if self.factors:
            parts.append(f"factors {self.factors[0]} x {self.factors[1]}")
        return " ".join(parts)


@dataclass(frozen=True)
class ShorResult:
    n: int
    factors: tuple[int, int] | None
    trials: tuple[Trial, ...]
    seed: int
    backend: str
    note: str = ""

    @property
    def success(self) -> bool:
        return self.factors is not None

    def transcript(self) -> str:
        lines = [f"factoring N={self.n} backend={self.backend} seed={self.seed}"]
        if self.note:
            lines.append(self.note)
        lines.extend(t.line() for t in self.trials)
        if self.factors:
            lines.append(f"result: {self.n} = {self.factors[0]} * {self.factors[1]}")
        else:
            lines.append("result: failed")
        return "\n".join(lines)


def order_finding_circuit(a: int, N: int) -> tuple[Circuit, int]:
    """Phase-estimation program measuring 2n ancillas; x prepared in |1>."""
    n = modulus_width(N)
    n_anc = 2 * n
    qpe_block = shor_qpe(a, N, n_anc)
    width = qpe_block.num_qubits
    prep = Circuit(width, (command(X, [n_anc]),))  # x register starts at qubit n_anc
    meas = Circuit(width, (command(Gate("measure"), range(n_anc)),))
    return concat(width, prep, qpe_block, meas), n_anc


def _run_order_finding(a: int, N: int, backend: str, rng) -> int:
    circuit, n_anc = order_finding_circuit(a, N)
    if backend == "emu":
        dist = emulate(circuit, init=0)
        assert isinstance(dist, Distribution)
        return dist.sample(rng)
    if backend == "sim":
        gates = inline_libraries(circuit, DEFAULT_REGISTRY)
        unitary_part = gates.with_commands(
            cmd for cmd in gates.commands if cmd.gate.name != "measure"
        )
        sv = simulate(unitary_part)
        bits, _ = sim_measure(sv, range(n_anc), rng=rng)
        return sum(b << j for j, b in enumerate(bits))
    raise ValueError(f"unknown backend '{backend}'")


def shor_factor(N: int, seed: int = 0, backend: str = "emu", max_trials: int = 20) -> ShorResult:
    """Factor an odd composite; classical shortcuts answer trivial inputs."""
    if N < 2:
        raise ValueError("N must be at least 2")
    if N % 2 == 0:
        return ShorResult(N, (2, N // 2), (), seed, backend, note="even input: classical factor 2")
    if is_prime(N):
        return ShorResult(N, None, (), seed, backend, note="input is prime")
    root = perfect_power_root(N)
    if root is not None:
        return ShorResult(N, (root, N // root), (), seed, backend,
                          note=f"perfect power: classical root {root}")

    n_anc = 2 * modulus_width(N)
    trials: list[Trial] = []
    for index in range(max_trials):
        rng = np.random.default_rng(seed + index)
        a = int(rng.integers(2, N - 1))
        g = math.gcd(a, N)
        if g > 1:
            trials.append(Trial(index, a, note="shares a factor classically",
                                factors=(g, N // g)))
            return ShorResult(N, (g, N // g), tuple(trials), seed, backend)

        m = _run_order_finding(a, N, backend, rng)
        t = decode_phase_bits(m, n_anc)
        r = continued_fraction_denominator(t, 1 << n_anc, N)
        if r < 2 or pow(a, r, N) != 1:
            trials.append(Trial(index, a, m, t, r, note="order candidate rejected"))
            continue
        if r % 2 == 1:
            trials.append(Trial(index, a, m, t, r, note="odd order"))
            continue
        half = pow(a, r // 2, N)
        if half == N - 1:
            trials.append(Trial(index, a, m, t, r, note="trivial root"))
            continue
        f1 = math.gcd(half - 1, N)
        f2 = math.gcd(half + 1, N)
        factor = f1 if 1 < f1 < N else f2
        if not 1 < factor < N:
            trials.append(Trial(index, a, m, t, r, note="no factor from root"))
            continue
        pair = (min(factor, N // factor), max(factor, N // factor))
        trials.append(Trial(index, a, m, t, r, factors=pair))
        return ShorResult(N, pair, tuple(trials), seed, backend)
    return ShorResult(N, None, tuple(trials), seed, backend, note="retry limit exhausted")
