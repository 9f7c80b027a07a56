"""Hardware backend stub.

No device is attached in this build; the stub exercises the interface
boundary by serializing the low-level circuit plus its schedule into the
payload a device adapter would consume.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..ir import Circuit, LLQIR
from ..layout import Schedule
from ..textfmt import serialize

STATUS_NO_DEVICE = "no device attached"


@dataclass(frozen=True)
class SubmitResult:
    payload: str
    status: str


def submit(c: Circuit, schedule: Schedule | None = None) -> SubmitResult:
    """Serialize a low-level circuit (plus schedule) for a device adapter."""
    if c.level != LLQIR:
        raise ValueError("hardware submission expects a low-level circuit")
    lines = [serialize(c)]
    if schedule is not None:
        lines.append(f"# depth {schedule.depth}")
        lines.extend(
            f"# start {i} {t}" for i, t in enumerate(schedule.starts)
        )
    return SubmitResult("\n".join(lines), STATUS_NO_DEVICE)
