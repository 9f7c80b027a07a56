"""qstack: a layered quantum circuit compiler and its execution backends.

Pipeline stages: program builder -> high-level compile (control
resolution, library inlining, rotation folding) -> low-level compile
(discrete-gateset synthesis) -> layout (routing, scheduling, error
correction accounting) -> simulator / emulator / resource counter.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .builder import ProgramBuilder
from .gates import CNOT, CR, H, LibCall, Phase, Rz, S, Sdg, Swap, T, Tdg, X, Y, Z
from .ir import Circuit, Command, LLQIR, QIR, inverse, validate
from . import qlib  # registers the library vocabulary and emulator actions

__all__ = [
    "ProgramBuilder", "Circuit", "Command", "QIR", "LLQIR", "inverse", "validate",
    "X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg", "CNOT", "Swap", "Rz", "Phase", "CR",
    "LibCall", "qlib",
]
