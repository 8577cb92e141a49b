"""Measurement-free teleportation with entanglement recycling.

Register layout for ``N`` shared pairs (``2N + 1`` wires):

* wire 0 holds the state to send,
* wires ``1..2N`` hold nested EPR pairs ``(i, 2N + 1 - i)``, i.e. the
  infinite-temperature thermofield double between the two sides,
* the sender applies ``V`` to wires ``0..N``, hands wire ``N`` (the Hawking
  qubit) over, and the receiver applies the same ``V`` to wires ``N..2N``.

Afterwards wire ``2N`` carries the state and wires ``0..2N-1`` carry the
pairs again, nested as ``(i, 2N - 1 - i)``. For the three-qubit ``V`` the
pairs come back with wires 0 and 1 exchanged; that relabeling is applied
virtually.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import kernels, qstate
from .circuits import CNOT, H, Circuit, v_gates
from .qstate import StateError
from .report import LN2, ProtocolReport

MAX_MIXED_1Q = np.eye(2, dtype=complex) / 2

# virtual relabelings accepted when checking that the pairs came back
RELABELINGS = ("identity", "swap01")


class RecyclingError(RuntimeError):
    """The returned entanglement block is not pure enough to be reused."""


def relabel_order(name: str, n_wires: int) -> list[int]:
    order = list(range(n_wires))
    if name == "swap01":
        order[0], order[1] = 1, 0
    elif name != "identity":
        raise StateError(f"unknown relabeling {name!r}")
    return order


def nested_epr_block(n_pairs: int) -> np.ndarray:
    """``2N``-qubit state with EPR pairs on wires ``(i, 2N - 1 - i)``."""
    n = 2 * n_pairs
    psi = np.zeros((2,) * n, dtype=complex)
    for bits in np.ndindex(*(2,) * n_pairs):
        idx = [0] * n
        for i, b in enumerate(bits):
            idx[i] = idx[n - 1 - i] = b
        psi[tuple(idx)] = 1
    return psi.reshape(-1) / math.sqrt(2**n_pairs)


def preparation_circuit(n_pairs: int) -> Circuit:
    """H + CNOT on each nested pair (i, 2N + 1 - i) of a 2N + 1 wire register."""
    steps = []
    for i in range(1, n_pairs + 1):
        steps += [H(i), CNOT(i, 2 * n_pairs + 1 - i)]
    return Circuit(2 * n_pairs + 1, steps)


def _run_gates(psi: np.ndarray, gates, n: int) -> np.ndarray:
    batch = np.ascontiguousarray(psi.reshape(1, -1))
    for g in gates:
        batch = kernels.apply_unitary(batch, g.matrix, np.asarray(g.wires, dtype=np.intp), n)
    return batch[0]


def _single_qubit(psi) -> np.ndarray:
    psi = qstate.check_state(psi)
    if psi.size != 2:
        raise StateError("teleported state must be a single qubit")
    return psi


def pre_exchange_state(psi, resource: np.ndarray | None = None) -> np.ndarray:
    """Five-qubit state after the sender's V, before the Hawking qubit leaves."""
    psi = _single_qubit(psi)
    if resource is None:
        start = _run_gates(np.kron(psi, qstate.basis_state(0, 4)), preparation_circuit(2).steps, 5)
    else:
        start = np.kron(psi, resource)
    return _run_gates(start, v_gates(0, 1, 2), 5)


def receiver_unitary() -> np.ndarray:
    """32 x 32 matrix of the receiver's V on wires (2, 3, 4)."""
    return Circuit(5, v_gates(2, 3, 4)).unitary()


def _teleport_once(psi: np.ndarray, resource: np.ndarray | None, label: str):
    psi0 = pre_exchange_state(psi, resource)
    rho_h = qstate.reduced_state(psi0, [2])
    final = _run_gates(psi0, v_gates(2, 3, 4), 5)
    out = qstate.reduced_state(final, [4])
    # wires 0 and 1 come back exchanged; read them in swapped order
    block = qstate.reduced_state(final, relabel_order("swap01", 4))
    report = ProtocolReport(
        teleported_state_label=label,
        output_fidelity=qstate.state_fidelity(psi, out),
        hawking_fidelity=qstate.fidelity(MAX_MIXED_1Q, rho_h),
        hawking_entropy_nats=qstate.von_neumann_entropy(rho_h),
        hawking_reduced_dm=rho_h,
        epr_restored_fidelity=qstate.state_fidelity(nested_epr_block(2), block),
        output_reduced_dm=out,
        metadata={"protocol": "measurement_free_teleport", "n_pairs": 2, "hawking_wire": 2,
                  "output_wire": 4, "relabeling": "swap01"},
    )
    return report, block


def measurement_free_teleport(psi, label: str = "custom") -> ProtocolReport:
    report, _ = _teleport_once(_single_qubit(psi), None, label)
    return report


def recycle_teleport(states: Sequence, labels: Sequence[str] | None = None, *,
                     resource: np.ndarray | None = None) -> list[ProtocolReport]:
    """Teleport ``states`` one after another through the same two EPR pairs.

    ``resource`` replaces the freshly prepared four-qubit pair block of the
    first round.
    """
    if len(states) == 0:
        raise StateError("need at least one state to teleport")
    labels = list(labels) if labels is not None else ["custom"] * len(states)
    if resource is not None:
        resource = qstate.check_state(resource)
        if resource.size != 16:
            raise StateError("resource must be a four-qubit state")
    reports = []
    for k, (psi, label) in enumerate(zip(states, labels)):
        report, block = _teleport_once(_single_qubit(psi), resource, label)
        vals, vecs = np.linalg.eigh(block)
        purity = float(vals[-1])
        if purity < 1 - 1e-8:
            raise RecyclingError(
                f"round {k}: entanglement block is mixed (largest eigenvalue {purity:.12f}); cannot recycle"
            )
        resource = vecs[:, -1]
        report.metadata.update(protocol="recycle_teleport", round=k, block_purity=purity)
        reports.append(report)
    return reports


@dataclass(frozen=True)
class TfdSpec:
    energies: tuple[float, ...]
    beta: float = 0.0

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        object.__setattr__(self, "energies", e)
        if len(e) < 2 or len(e) & (len(e) - 1):
            raise StateError(f"number of energies must be a power of two >= 2, got {len(e)}")
        if not all(math.isfinite(x) for x in e):
            raise StateError("energies must be finite")
        if math.isnan(self.beta) or self.beta < 0:
            raise StateError(f"beta must be >= 0 or +inf, got {self.beta}")

    @property
    def n_qubits(self) -> int:
        return len(self.energies).bit_length() - 1


def boltzmann_weights(spec: TfdSpec) -> np.ndarray:
    """Squared TFD amplitudes exp(-2 beta E_n) / Z."""
    e = np.asarray(spec.energies)
    if math.isinf(spec.beta):
        ground = np.flatnonzero(e == e.min())
        if ground.size > 1:
            raise StateError("beta = inf with a degenerate ground energy has no unique limit")
        p = np.zeros_like(e)
        p[ground[0]] = 1.0
        return p
    # shift by the minimum energy so large beta does not underflow
    w = np.exp(-2 * spec.beta * (e - e.min()))
    return w / w.sum()


def tfd_state(spec: TfdSpec) -> np.ndarray:
    """(1/sqrt Z) sum_n exp(-beta E_n) |n>_A |n>_B, side A on the first N wires."""
    n = spec.n_qubits
    dim = 2**n
    amps = np.sqrt(boltzmann_weights(spec))
    psi = np.zeros(dim * dim, dtype=complex)
    idx = np.arange(dim)
    psi[idx * dim + idx] = amps
    return psi


def black_hole_side_entropy(tfd, side_qubits: int) -> float:
    psi = np.asarray(tfd, dtype=complex)
    if qstate.n_qubits(psi) != 2 * side_qubits:
        raise StateError(f"state has {qstate.n_qubits(psi)} qubits, expected {2 * side_qubits}")
    return qstate.von_neumann_entropy(qstate.reduced_state(psi, list(range(side_qubits))))


def prepared_register(psis: np.ndarray, n_pairs: int) -> np.ndarray:
    """Rows psi_k tensored with the nested pair block on wires 1..2N."""
    block = nested_epr_block(n_pairs)
    return np.ascontiguousarray(np.einsum("bi,j->bij", psis, block).reshape(len(psis), -1))


def _check_v(v, n_pairs: int) -> np.ndarray:
    if n_pairs < 1:
        raise StateError("need at least one pair")
    v = np.ascontiguousarray(v, dtype=complex)
    if v.shape != (2 ** (n_pairs + 1),) * 2:
        raise StateError(f"V of shape {v.shape} does not act on {n_pairs + 1} qubits")
    if not qstate.is_unitary(v):
        raise StateError("V is not unitary within 1e-10")
    return v


def run_general(start: np.ndarray, v: np.ndarray, n_pairs: int):
    """Batched protocol core. Returns (Hawking-qubit DMs, final states)."""
    n = 2 * n_pairs + 1
    alice = np.arange(n_pairs + 1, dtype=np.intp)
    bob = np.arange(n_pairs, n, dtype=np.intp)
    mid = kernels.apply_unitary(start, v, alice, n)
    rho_h = kernels.reduced_density(mid, np.array([n_pairs], dtype=np.intp), n)
    final = kernels.apply_unitary(mid, v, bob, n)
    return rho_h, final


def target_overlaps(final: np.ndarray, psis: np.ndarray, n_pairs: int,
                    relabelings: Sequence[str] = RELABELINGS) -> np.ndarray:
    """|<pairs (x) psi_k | relabeled final_k>|^2, one column per relabeling."""
    n = 2 * n_pairs + 1
    batch = final.shape[0]
    block = nested_epr_block(n_pairs).reshape((2,) * (n - 1))
    out = np.empty((batch, len(relabelings)))
    t = final.reshape((batch,) + (2,) * n)
    for j, name in enumerate(relabelings):
        order = relabel_order(name, n - 1) + [n - 1]
        tp = np.transpose(t, [0] + [w + 1 for w in order])
        # contract the pair block first, leaving the output wire
        amp = np.tensordot(tp, block.conj(), axes=(list(range(1, n)), list(range(n - 1))))
        out[:, j] = np.abs(np.sum(psis.conj() * amp, axis=1)) ** 2
    return out


def general_protocol(psi, v, n_pairs: int, label: str = "custom",
                     relabelings: Sequence[str] = RELABELINGS) -> ProtocolReport:
    psi = _single_qubit(psi)
    v = _check_v(v, n_pairs)
    n = 2 * n_pairs + 1
    rho_h, final = run_general(prepared_register(psi[None, :], n_pairs), v, n_pairs)
    rho_h, final = rho_h[0], final[0]
    out = qstate.reduced_state(final, [n - 1])
    block_fids = {
        name: qstate.state_fidelity(nested_epr_block(n_pairs),
                                    qstate.reduced_state(final, relabel_order(name, n - 1)))
        for name in relabelings
    }
    best = max(block_fids, key=block_fids.get)
    return ProtocolReport(
        teleported_state_label=label,
        output_fidelity=qstate.state_fidelity(psi, out),
        hawking_fidelity=qstate.fidelity(MAX_MIXED_1Q, rho_h),
        hawking_entropy_nats=qstate.von_neumann_entropy(rho_h),
        hawking_reduced_dm=rho_h,
        epr_restored_fidelity=block_fids[best],
        output_reduced_dm=out,
        metadata={"protocol": "general_protocol", "n_pairs": n_pairs, "hawking_wire": n_pairs,
                  "output_wire": n - 1, "relabeling": best},
    )


def hawking_entropy_over_ln2(rho_h: np.ndarray) -> float:
    return qstate.von_neumann_entropy(rho_h) / LN2
