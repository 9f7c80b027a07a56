"""Execution backends: statevector simulator, shortcut emulator, resource
counter and a hardware stub, all consuming the same circuit type."""
from .emulator import ClassicalAction, Distribution, EmulationError, emulate, register_action
from .resources import CostModel, ResourceReport, apply_qec_accounting, count_resources
from .sim import (
    CapacityError, RunResult, Statevector, UnsupportedCommandError,
    circuit_unitary, measure, run_circuit, simulate,
)
from . import hardware

__all__ = [
    "ClassicalAction", "Distribution", "EmulationError", "emulate", "register_action",
    "CostModel", "ResourceReport", "apply_qec_accounting", "count_resources",
    "CapacityError", "RunResult", "Statevector", "UnsupportedCommandError",
    "circuit_unitary", "measure", "run_circuit", "simulate", "hardware",
]
