"""Gate kinds and their unitary matrices.

A gate is identified by a lowercase name plus an optional rotation angle
(``rz``, ``phase``, ``cr``) or, for library calls, a callee name with
integer arguments. Matrix conventions:

- ``rz(t)``  = diag(e^{-it/2}, e^{it/2})
- ``phase(t)`` = diag(1, e^{it})
- ``cr(t)``  = diag(1, 1, 1, e^{it})   (controlled phase)
- controlled extension of U is block-diag(I, U) with the control as the
  high-order index bit.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

_SQRT2_INV = 1.0 / math.sqrt(2.0)

#: names of parameterised rotation kinds
ROTATION_KINDS = frozenset({"rz", "phase", "cr"})
#: non-unitary bookkeeping kinds
STRUCTURAL_KINDS = frozenset({"measure", "alloc", "dealloc"})
#: fixed (parameter-free) unitary kinds
FIXED_UNITARY_KINDS = frozenset({"x", "y", "z", "h", "s", "sdg", "t", "tdg", "cnot", "swap"})
#: every kind with a defined matrix
UNITARY_KINDS = FIXED_UNITARY_KINDS | ROTATION_KINDS
#: discrete target set of the low-level compiler
DEFAULT_GATESET = frozenset({"h", "t", "tdg", "s", "sdg", "x", "z", "cnot"})

_ARITY = {"cnot": 2, "swap": 2, "cr": 2}

_SELF_ADJOINT = frozenset({"x", "y", "z", "h", "cnot", "swap"})
_ADJOINT_NAME = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}

# Library calls whose adjoint is another library call.  qlib registers its
# vocabulary here on import; args_fn maps the call arguments.
_LIBCALL_ADJOINTS: dict[str, tuple[str, object]] = {}


def register_libcall_adjoint(name: str, inverse_name: str, args_fn=None) -> None:
    """Declare ``inverse(libcall name) = libcall inverse_name`` (both ways)."""
    _LIBCALL_ADJOINTS[name] = (inverse_name, args_fn)
    if inverse_name != name:
        _LIBCALL_ADJOINTS[inverse_name] = (name, args_fn)


class UnsupportedGateError(ValueError):
    """Requested matrix or adjoint for a kind that has none."""


@dataclass(frozen=True)
class Gate:
    """A gate kind: name, optional angle, optional libcall payload."""

    name: str
    param: float | None = None
    call: str = ""  # libcall callee, name == "libcall"
    args: tuple[int, ...] = ()

    @property
    def is_unitary(self) -> bool:
        return self.name in UNITARY_KINDS

    @property
    def is_rotation(self) -> bool:
        return self.name in ROTATION_KINDS

    @property
    def arity(self) -> int:
        # libcall arity is set by the command's target list
        return _ARITY.get(self.name, 1)

    def adjoint(self) -> Gate:
        if self.name in _SELF_ADJOINT:
            return self
        if self.name in _ADJOINT_NAME:
            return Gate(_ADJOINT_NAME[self.name])
        if self.name in ROTATION_KINDS:
            return Gate(self.name, -self.param)
        if self.name == "alloc":
            return Gate("dealloc")
        if self.name == "dealloc":
            return Gate("alloc")
        if self.name == "libcall":
            if self.call not in _LIBCALL_ADJOINTS:
                raise UnsupportedGateError(f"no adjoint registered for libcall '{self.call}'")
            inv_name, args_fn = _LIBCALL_ADJOINTS[self.call]
            args = tuple(args_fn(self.args)) if args_fn is not None else self.args
            return Gate("libcall", call=inv_name, args=args)
        raise UnsupportedGateError(f"gate '{self.name}' has no adjoint")

    def label(self) -> str:
        """Display / counting key: kind name, or callee name for libcalls."""
        return self.call if self.name == "libcall" else self.name

    def __repr__(self) -> str:
        if self.name == "libcall":
            return f"Gate({self.call}{self.args})"
        if self.param is not None:
            return f"Gate({self.name}({self.param}))"
        return f"Gate({self.name})"


# Constructors / singletons

X = Gate("x")
Y = Gate("y")
Z = Gate("z")
H = Gate("h")
S = Gate("s")
Sdg = Gate("sdg")
T = Gate("t")
Tdg = Gate("tdg")
CNOT = Gate("cnot")
Swap = Gate("swap")
Measure = Gate("measure")
Alloc = Gate("alloc")
Dealloc = Gate("dealloc")


def Rz(theta: float) -> Gate:
    return Gate("rz", float(theta))


def Phase(theta: float) -> Gate:
    return Gate("phase", float(theta))


def CR(theta: float) -> Gate:
    return Gate("cr", float(theta))


def LibCall(call: str, *args: int) -> Gate:
    return Gate("libcall", call=call, args=tuple(int(a) for a in args))


_FIXED_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def gate_matrix(g: Gate) -> np.ndarray:
    """Dense unitary of ``g``; raises for non-unitary kinds."""
    if g.name in _FIXED_MATRICES:
        return _FIXED_MATRICES[g.name].copy()
    if g.name == "rz":
        return np.array([[cmath.exp(-0.5j * g.param), 0], [0, cmath.exp(0.5j * g.param)]])
    if g.name == "phase":
        return np.array([[1, 0], [0, cmath.exp(1j * g.param)]], dtype=complex)
    if g.name == "cr":
        return np.diag([1, 1, 1, cmath.exp(1j * g.param)]).astype(complex)
    raise UnsupportedGateError(f"gate '{g.label()}' has no unitary matrix")


def controlled_matrix(u: np.ndarray, n_controls: int = 1) -> np.ndarray:
    """Block-diag(I, U) extension, controls as high-order index bits."""
    m = u
    for _ in range(n_controls):
        d = m.shape[0]
        out = np.eye(2 * d, dtype=complex)
        out[d:, d:] = m
        m = out
    return m
