"""Qubit layout: routing onto a connectivity graph, ASAP scheduling and
error-correction overhead accounting.

Routing is a greedy shortest-path pass: when a two-qubit gate spans
non-adjacent hardware qubits, swaps move the first operand along a
shortest path until the pair is adjacent. Swaps are never undone; the
logical-to-hardware map is tracked instead, and the routed circuit equals
the original conjugated by the tracked permutations.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .gates import Gate, Swap
from .ir import Circuit, Command, LLQIR, command


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class ConnectivityGraph:
    num_qubits: int
    edges: frozenset[tuple[int, int]]
    durations: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise RoutingError(f"edge ({a}, {b}) out of range")
        if self.num_qubits > 1 and not self._connected():
            raise RoutingError("connectivity graph is not connected")

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            q = queue.popleft()
            for nb in self.neighbors(q):
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return len(seen) == self.num_qubits

    def neighbors(self, q: int) -> list[int]:
        out = [b for a, b in self.edges if a == q] + [a for a, b in self.edges if b == q]
        return sorted(out)

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def shortest_path(self, a: int, b: int) -> list[int]:
        prev = {a: a}
        queue = deque([a])
        while queue:
            q = queue.popleft()
            if q == b:
                break
            for nb in self.neighbors(q):
                if nb not in prev:
                    prev[nb] = q
                    queue.append(nb)
        if b not in prev:
            raise RoutingError(f"no path between {a} and {b}")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def duration(self, kind: str) -> float:
        if kind in self.durations:
            return self.durations[kind]
        if kind in ("alloc", "dealloc"):
            return 0.0
        if kind == "swap":
            return 3.0 * self.durations.get("cnot", 1.0)
        return 1.0

    @classmethod
    def line(cls, n: int, durations=None) -> ConnectivityGraph:
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)), dict(durations or {}))

    @classmethod
    def ring(cls, n: int, durations=None) -> ConnectivityGraph:
        edges = {(i, i + 1) for i in range(n - 1)} | ({(0, n - 1)} if n > 2 else set())
        return cls(n, frozenset(edges), dict(durations or {}))

    @classmethod
    def complete(cls, n: int, durations=None) -> ConnectivityGraph:
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)), dict(durations or {}))

    @classmethod
    def from_text(cls, text: str) -> ConnectivityGraph:
        num = None
        edges = set()
        durations: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0] == "qubits" and len(tokens) == 2:
                num = int(tokens[1])
            elif tokens[0] == "edge" and len(tokens) == 3:
                a, b = int(tokens[1]), int(tokens[2])
                edges.add((min(a, b), max(a, b)))
            elif tokens[0] == "duration" and len(tokens) == 3:
                durations[tokens[1]] = float(tokens[2])
            else:
                raise RoutingError(f"graph line {lineno}: cannot parse '{raw.strip()}'")
        if num is None:
            raise RoutingError("graph file missing 'qubits <n>'")
        return cls(num, frozenset(edges), durations)


def identity_map(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def permutation_matrix(mapping, num_qubits: int) -> np.ndarray:
    """P with P|x> = |y> where bit mapping[q] of y equals bit q of x."""
    dim = 1 << num_qubits
    p = np.zeros((dim, dim))
    for x in range(dim):
        y = 0
        for q in range(num_qubits):
            y |= ((x >> q) & 1) << mapping[q]
        p[y, x] = 1.0
    return p


def route(
    c: Circuit,
    graph: ConnectivityGraph,
    initial=None,
) -> tuple[Circuit, tuple[int, ...]]:
    """Make every two-qubit command adjacent by inserting swaps.

    Returns the routed circuit over the graph's qubits plus the final
    logical-to-hardware map. The routed circuit simulates to the original
    conjugated by the initial/final map permutations.
    """
    if c.num_qubits > graph.num_qubits:
        raise RoutingError(
            f"circuit needs {c.num_qubits} qubits but the graph has {graph.num_qubits}"
        )
    l2p = list(initial) if initial is not None else list(range(c.num_qubits))
    if sorted(set(l2p)) != sorted(l2p) or any(not 0 <= p < graph.num_qubits for p in l2p):
        raise RoutingError("initial map is not an injection into the hardware qubits")
    p2l = [-1] * graph.num_qubits
    for lq, pq in enumerate(l2p):
        p2l[pq] = lq

    out: list[Command] = []

    def hw_swap(a: int, b: int) -> None:
        out.append(command(Swap, (a, b)))
        la, lb = p2l[a], p2l[b]
        p2l[a], p2l[b] = lb, la
        if la != -1:
            l2p[la] = b
        if lb != -1:
            l2p[lb] = a

    for cmd in c.commands:
        qubits = sorted(cmd.qubits())
        if cmd.pending:
            raise RoutingError("pending controls cannot be routed")
        if len(qubits) > 2:
            raise RoutingError(f"cannot route a {len(qubits)}-qubit command; lower it first")
        if len(qubits) == 2:
            # walk the far operand back along a shortest path from the
            # anchor (the control, for controlled gates) until adjacent
            anchor = next(iter(cmd.controls)) if cmd.controls else cmd.targets[0]
            other = (set(qubits) - {anchor}).pop()
            pa, pb = l2p[anchor], l2p[other]
            if not graph.adjacent(pa, pb) and pa != pb:
                path = graph.shortest_path(pa, pb)
                for step in range(len(path) - 1, 1, -1):
                    hw_swap(path[step - 1], path[step])
        out.append(
            Command(
                cmd.gate,
                tuple(l2p[t] for t in cmd.targets),
                frozenset(l2p[q] for q in cmd.controls),
                frozenset(),
                cmd.section,
            )
        )

    gateset = c.gateset | {"swap"} if c.level == LLQIR else c.gateset
    routed = Circuit(graph.num_qubits, tuple(out), c.level, gateset)
    return routed, tuple(l2p)


def check_adjacency(c: Circuit, graph: ConnectivityGraph) -> bool:
    """Pure predicate: every two-qubit command acts on adjacent qubits."""
    for cmd in c.commands:
        qubits = sorted(cmd.qubits())
        if len(qubits) == 2 and not graph.adjacent(*qubits):
            return False
    return True


@dataclass(frozen=True)
class Schedule:
    starts: tuple[float, ...]
    depth: float


def schedule(c: Circuit, graph: ConnectivityGraph) -> Schedule:
    """As-soon-as-possible schedule honoring per-kind durations.

    Each command starts at the latest ready time over its qubits; the
    depth is the largest end time.
    """
    ready = [0.0] * c.num_qubits
    starts = []
    depth = 0.0
    for cmd in c.commands:
        qubits = cmd.qubits()
        start = max((ready[q] for q in qubits), default=0.0)
        end = start + graph.duration(cmd.gate.name)
        for q in qubits:
            ready[q] = end
        starts.append(start)
        depth = max(depth, end)
    return Schedule(tuple(starts), depth)


@dataclass(frozen=True)
class QecScheme:
    """Error-correction overhead multipliers; accounting only."""

    kind: str
    qubit_multiplier: float = 1.0
    gate_multiplier: float = 1.0
    time_multiplier: float = 1.0

    def __post_init__(self):
        if min(self.qubit_multiplier, self.gate_multiplier, self.time_multiplier) < 1.0:
            raise ValueError("QEC multipliers must be at least 1")

    @classmethod
    def none(cls) -> QecScheme:
        return cls("none")

    @classmethod
    def repetition(cls, d: int) -> QecScheme:
        return cls(f"repetition({d})", qubit_multiplier=d, gate_multiplier=d, time_multiplier=1)

    @classmethod
    def surface(cls, d: int) -> QecScheme:
        return cls(f"surface({d})", qubit_multiplier=d * d, gate_multiplier=d * d, time_multiplier=d)

    @classmethod
    def parse(cls, spec: str) -> QecScheme:
        spec = spec.strip().lower()
        if spec in ("", "none"):
            return cls.none()
        for name, factory in (("repetition", cls.repetition), ("surface", cls.surface)):
            if spec.startswith(name + "(") and spec.endswith(")"):
                return factory(int(spec[len(name) + 1 : -1]))
        raise ValueError(f"unknown QEC scheme '{spec}'")
