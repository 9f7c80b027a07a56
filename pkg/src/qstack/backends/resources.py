"""Resource counting: per-kind gate counts, t-count, width, depth, cost.

Width is the high-water mark of simultaneously live qubits (qubits never
explicitly allocated count as live from the start). Depth comes from the
ASAP scheduler when a connectivity graph is supplied. Swaps can be
charged as three cnots, the honest hardware cost after routing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..ir import Circuit
from ..layout import ConnectivityGraph, QecScheme, schedule


@dataclass(frozen=True)
class CostModel:
    weights: dict[str, float] = field(default_factory=dict)
    default_weight: float = 1.0

    def __post_init__(self):
        for kind, w in self.weights.items():
            if not (math.isfinite(w) and w >= 0):
                raise ValueError(f"weight for '{kind}' must be finite and nonnegative")

    def weight(self, kind: str) -> float:
        return self.weights.get(kind, self.default_weight)


@dataclass(frozen=True)
class ResourceReport:
    counts: dict[str, int]
    t_count: int
    width: int
    depth: float
    qec: str = "none"

    def total_gates(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "t_count": self.t_count,
            "width": self.width,
            "depth": self.depth,
            "qec": self.qec,
        }


_STRUCTURAL = ("alloc", "dealloc")


def count_resources(
    c: Circuit,
    model: CostModel | None = None,
    graph: ConnectivityGraph | None = None,
    swap_as_cnots: bool = False,
) -> tuple[ResourceReport, float]:
    """Exact counts by kind plus the weighted total cost.

    Library calls count as opaque units under their callee name. With
    ``swap_as_cnots`` every swap is charged as three cnots (the
    hardware-level decomposition used after routing).
    """
    counts: dict[str, int] = {}
    allocated = {q for cmd in c.commands if cmd.gate.name == "alloc" for q in cmd.targets}
    always_live = {
        q for cmd in c.commands if cmd.gate.name != "alloc" for q in cmd.qubits()
    } - allocated

    live = set(always_live)
    width = len(live)
    for cmd in c.commands:
        name = cmd.gate.name
        if name == "alloc":
            live.update(cmd.targets)
            width = max(width, len(live))
            continue
        if name == "dealloc":
            live.difference_update(cmd.targets)
            continue
        label = cmd.gate.label()
        if swap_as_cnots and name == "swap":
            counts["cnot"] = counts.get("cnot", 0) + 3
        else:
            counts[label] = counts.get(label, 0) + 1

    t_count = counts.get("t", 0) + counts.get("tdg", 0)
    depth = schedule(c, graph).depth if graph is not None else 0.0
    report = ResourceReport(counts, t_count, width, depth)

    model = model or CostModel()
    total_cost = float(sum(model.weight(kind) * n for kind, n in counts.items()))
    return report, total_cost


def apply_qec_accounting(report: ResourceReport, scheme: QecScheme) -> ResourceReport:
    """Scale a report by the scheme's qubit/gate/time multipliers."""
    scaled = {k: int(round(v * scheme.gate_multiplier)) for k, v in report.counts.items()}
    return ResourceReport(
        counts=scaled,
        t_count=int(round(report.t_count * scheme.gate_multiplier)),
        width=int(round(report.width * scheme.qubit_multiplier)),
        depth=report.depth * scheme.time_multiplier,
        qec=scheme.kind,
    )
