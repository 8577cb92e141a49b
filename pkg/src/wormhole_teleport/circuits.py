"""Gate vocabulary, circuit execution with mid-circuit measurement, and the
reference protocols: standard teleportation, superdense coding and the
three-qubit V operator.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import kernels, qstate
from .qstate import SQRT1_2, StateError
from .report import ProtocolReport

I2 = np.eye(2, dtype=complex)
H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MAT = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)
S_MAT = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG_MAT = S_MAT.conj()
CNOT_MAT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ_MAT = np.diag([1, 1, 1, -1]).astype(complex)
SWAP_MAT = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

_FIXED = {"H": H_MAT, "X": X_MAT, "Y": Y_MAT, "Z": Z_MAT, "S": S_MAT, "SDG": SDG_MAT,
          "CNOT": CNOT_MAT, "CZ": CZ_MAT, "SWAP": SWAP_MAT}
_ARITY = {"H": 1, "X": 1, "Y": 1, "Z": 1, "S": 1, "SDG": 1, "RY": 1, "CNOT": 2, "CZ": 2, "SWAP": 2}


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple[int, ...]
    theta: float | None = None
    custom: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if self.kind == "CUSTOM":
            if self.custom is None:
                raise StateError("custom gate needs a matrix")
            m = np.asarray(self.custom, dtype=complex)
            if m.shape != (2 ** len(self.wires),) * 2:
                raise StateError(f"custom matrix {m.shape} does not fit {len(self.wires)} wire(s)")
            if not qstate.is_unitary(m):
                raise StateError("custom gate matrix is not unitary within 1e-10")
            object.__setattr__(self, "custom", m)
        elif self.kind not in _ARITY:
            raise StateError(f"unknown gate kind {self.kind!r}")
        elif len(self.wires) != _ARITY[self.kind]:
            raise StateError(f"{self.kind} acts on {_ARITY[self.kind]} wire(s), got {self.wires}")
        elif self.kind == "RY" and self.theta is None:
            raise StateError("RY needs an angle")
        if len(set(self.wires)) != len(self.wires):
            raise StateError(f"duplicate wire in {self.kind}{self.wires}")

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "CUSTOM":
            return self.custom
        if self.kind == "RY":
            return ry_matrix(self.theta)
        return _FIXED[self.kind]


def H(w: int) -> Gate: return Gate("H", (w,))
def X(w: int) -> Gate: return Gate("X", (w,))
def Y(w: int) -> Gate: return Gate("Y", (w,))
def Z(w: int) -> Gate: return Gate("Z", (w,))
def S(w: int) -> Gate: return Gate("S", (w,))
def SDG(w: int) -> Gate: return Gate("SDG", (w,))
def RY(theta: float, w: int) -> Gate: return Gate("RY", (w,), theta=float(theta))
def CNOT(control: int, target: int) -> Gate: return Gate("CNOT", (control, target))
def CZ(a: int, b: int) -> Gate: return Gate("CZ", (a, b))
def SWAP(a: int, b: int) -> Gate: return Gate("SWAP", (a, b))
def Custom(matrix, wires: Sequence[int]) -> Gate: return Gate("CUSTOM", tuple(wires), custom=matrix)


@dataclass(frozen=True)
class Measure:
    wire: int
    bit: int


@dataclass(frozen=True)
class ClassicallyControlled:
    gate: Gate
    bit: int


Step = Union[Gate, Measure, ClassicallyControlled]


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    steps: tuple[Step, ...] = ()
    n_bits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for i, step in enumerate(self.steps):
            if isinstance(step, Measure):
                wires, bits = (step.wire,), (step.bit,)
            elif isinstance(step, ClassicallyControlled):
                wires, bits = step.gate.wires, (step.bit,)
            elif isinstance(step, Gate):
                wires, bits = step.wires, ()
            else:
                raise StateError(f"step {i}: not a circuit step: {step!r}")
            if any(not 0 <= w < self.n_wires for w in wires):
                raise StateError(f"step {i}: wire out of range in {step!r}")
            if any(not 0 <= b < self.n_bits for b in bits):
                raise StateError(f"step {i}: classical bit out of range in {step!r}")

    def gates(self) -> list[Gate]:
        return [s for s in self.steps if isinstance(s, Gate)]

    def unitary(self) -> np.ndarray:
        """Matrix of a measurement-free circuit, built column by column."""
        if len(self.gates()) != len(self.steps):
            raise StateError("circuit contains measurements or classical control")
        dim = 2**self.n_wires
        cols = np.eye(dim, dtype=complex)
        for g in self.steps:
            cols = kernels.apply_unitary(
                np.ascontiguousarray(cols.T), g.matrix, np.asarray(g.wires, dtype=np.intp), self.n_wires
            ).T
        return np.ascontiguousarray(cols)


@dataclass
class MeasurementRecord:
    bits: np.ndarray
    state: np.ndarray


def _measure(psi: np.ndarray, wire: int, n: int, rng: np.random.Generator, forced: int | None):
    t = psi.reshape((2,) * n)
    t = np.moveaxis(t, wire, 0)
    p1 = float(np.sum(np.abs(t[1]) ** 2))
    if forced is None:
        outcome = int(rng.random() < p1)
    else:
        outcome = int(forced)
    p = p1 if outcome else 1 - p1
    if p <= 1e-14:
        raise StateError(f"outcome {outcome} on wire {wire} has zero probability")
    t = t.copy()
    t[1 - outcome] = 0
    t /= np.sqrt(p)
    return np.moveaxis(t, 0, wire).reshape(-1), outcome


def run_circuit(
    circuit: Circuit,
    state,
    rng_seed: int = 0,
    *,
    initial_bits: Sequence[int] | None = None,
    forced: Mapping[int, int] | None = None,
) -> MeasurementRecord:
    """Execute ``circuit`` on ``state``.

    Measurements sample and collapse. ``forced`` maps a classical bit index
    to a prescribed outcome, which projects onto that branch instead of
    sampling; used to enumerate measurement branches.
    """
    psi = qstate.check_state(state)
    n = circuit.n_wires
    if qstate.n_qubits(psi) != n:
        raise StateError(f"input has {qstate.n_qubits(psi)} qubits, circuit has {n} wires")
    bits = np.zeros(circuit.n_bits, dtype=np.int8)
    if initial_bits is not None:
        if len(initial_bits) > circuit.n_bits:
            raise StateError("more initial bits than classical register")
        bits[: len(initial_bits)] = initial_bits
    forced = dict(forced or {})
    rng = np.random.default_rng(rng_seed)
    for step in circuit.steps:
        if isinstance(step, Measure):
            psi, bits[step.bit] = _measure(psi, step.wire, n, rng, forced.get(step.bit))
            continue
        if isinstance(step, ClassicallyControlled):
            if not bits[step.bit]:
                continue
            step = step.gate
        psi = kernels.apply_unitary(
            np.ascontiguousarray(psi.reshape(1, -1)), step.matrix, np.asarray(step.wires, dtype=np.intp), n
        )[0]
    return MeasurementRecord(bits=bits, state=psi)


def epr_pair() -> np.ndarray:
    return np.array([SQRT1_2, 0, 0, SQRT1_2], dtype=complex)


def epr_circuit(a: int = 0, b: int = 1) -> list[Gate]:
    return [H(a), CNOT(a, b)]


def v_gates(a: int, b: int, c: int) -> list[Gate]:
    """The V operator on wires (a, b, c): CNOT(a,b); H(a), CNOT(b,c); CZ(a,c)."""
    return [CNOT(a, b), H(a), CNOT(b, c), CZ(a, c)]


def build_v() -> np.ndarray:
    return Circuit(3, v_gates(0, 1, 2)).unitary()


def v_closed_form(a: int, b: int, c: int) -> np.ndarray:
    """V|abc> evaluated from its two-term closed form."""
    if any(x not in (0, 1) for x in (a, b, c)):
        raise StateError("a, b, c must be bits")
    na, ab, abc = 1 - a, a ^ b, a ^ b ^ c
    out = np.zeros(8, dtype=complex)
    out[(na << 2) | (ab << 1) | abc] += (-1) ** (na * abc) * SQRT1_2
    out[(a << 2) | (ab << 1) | abc] += (-1) ** (a * abc + a) * SQRT1_2
    return out


def teleportation_circuit() -> Circuit:
    """Standard teleportation: psi on wire 0, EPR on (1, 2); bit 0 <- wire 0, bit 1 <- wire 1."""
    return Circuit(
        3,
        [
            H(1), CNOT(1, 2),
            CNOT(0, 1), H(0),
            Measure(0, 0), Measure(1, 1),
            ClassicallyControlled(X(2), 1),
            ClassicallyControlled(Z(2), 0),
        ],
        n_bits=2,
    )


def standard_teleportation(psi, rng_seed: int = 0, *, outcomes: tuple[int, int] | None = None,
                           label: str = "custom") -> ProtocolReport:
    """Run the measurement-based protocol; ``outcomes`` forces the (wire 0, wire 1) results."""
    psi = qstate.check_state(psi)
    if psi.size != 2:
        raise StateError("teleported state must be a single qubit")
    start = np.kron(psi, qstate.basis_state(0, 2))
    forced = None if outcomes is None else {0: outcomes[0], 1: outcomes[1]}
    rec = run_circuit(teleportation_circuit(), start, rng_seed, forced=forced)
    bob = qstate.reduced_state(rec.state, [2])
    return ProtocolReport(
        teleported_state_label=label,
        output_fidelity=qstate.state_fidelity(psi, bob),
        output_reduced_dm=bob,
        metadata={"protocol": "standard_teleportation", "seed": rng_seed,
                  "measured_bits": [int(b) for b in rec.bits]},
    )


def superdense_circuit() -> Circuit:
    """Bits 0, 1 carry the message (b1 -> Z, b0 -> X); bits 2, 3 receive the decoded pair."""
    return Circuit(
        2,
        [
            H(0), CNOT(0, 1),
            ClassicallyControlled(X(0), 1),
            ClassicallyControlled(Z(0), 0),
            CNOT(0, 1), H(0),
            Measure(0, 2), Measure(1, 3),
        ],
        n_bits=4,
    )


def superdense_code(b1: int, b0: int, rng_seed: int = 0) -> tuple[int, int]:
    if b1 not in (0, 1) or b0 not in (0, 1):
        raise StateError("message bits must be 0 or 1")
    rec = run_circuit(superdense_circuit(), qstate.basis_state(0, 2), rng_seed, initial_bits=[b1, b0])
    return int(rec.bits[2]), int(rec.bits[3])
