import itertools
import math

import numpy as np
import pytest

from conftest import embed
from wormhole_teleport import qstate
from wormhole_teleport.circuits import (
    CNOT,
    CZ,
    H,
    RY,
    SWAP,
    Circuit,
    ClassicallyControlled,
    Custom,
    Gate,
    Measure,
    X,
    Z,
    build_v,
    epr_circuit,
    epr_pair,
    ry_matrix,
    run_circuit,
    standard_teleportation,
    superdense_code,
    teleportation_circuit,
    v_closed_form,
)
from wormhole_teleport.qstate import StateError, haar_state

s2 = 1 / math.sqrt(2)


def ket(bits):
    return qstate.basis_state(bits)


@pytest.mark.parametrize("gate", [H(0), X(0), Z(0), RY(0.7, 0), CNOT(0, 1), CZ(0, 1), SWAP(0, 1)])
def test_gate_matrices_unitary(gate):
    assert qstate.is_unitary(gate.matrix, atol=1e-12)


def test_ry_periodicity():
    np.testing.assert_allclose(ry_matrix(0), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(ry_matrix(2 * math.pi), -np.eye(2), atol=1e-15)
    np.testing.assert_allclose(ry_matrix(math.pi) @ [1, 0], [0, 1], atol=1e-15)


@pytest.mark.parametrize(
    "kind,wires,kw",
    [("CNOT", (0,), {}), ("H", (0, 1), {}), ("CZ", (1, 1), {}), ("RY", (0,), {}), ("FOO", (0,), {})],
)
def test_gate_validation(kind, wires, kw):
    with pytest.raises(StateError):
        Gate(kind, wires, **kw)


def test_custom_gate_must_be_unitary():
    with pytest.raises(StateError):
        Custom(np.ones((2, 2)), [0])


def test_circuit_rejects_bad_references():
    with pytest.raises(StateError):
        Circuit(2, [H(2)])
    with pytest.raises(StateError):
        Circuit(1, [Measure(0, 0)], n_bits=0)
    with pytest.raises(StateError):
        Circuit(1, ["H"])


def test_circuit_unitary_matches_embedded_product():
    c = Circuit(3, [H(0), CNOT(0, 2), RY(0.3, 1), CZ(2, 1)])
    want = np.eye(8)
    for g in c.gates():
        want = embed(g.matrix, g.wires, 3) @ want
    np.testing.assert_allclose(c.unitary(), want, atol=1e-14)


def test_unitary_refuses_measurements():
    with pytest.raises(StateError):
        Circuit(1, [Measure(0, 0)], n_bits=1).unitary()


# run_circuit

def test_hadamard_measure_statistics():
    c = Circuit(1, [H(0), Measure(0, 0)], n_bits=1)
    shots = 8192
    ones = sum(int(run_circuit(c, ket("0"), seed).bits[0]) for seed in range(shots))
    sigma = 0.5 / math.sqrt(shots)
    assert abs(ones / shots - 0.5) < 4 * sigma


def test_deterministic_measurement_collapses():
    rec = run_circuit(Circuit(1, [X(0), Measure(0, 0)], n_bits=1), ket("0"), 3)
    assert rec.bits[0] == 1
    np.testing.assert_allclose(rec.state, [0, 1], atol=1e-15)


def test_empty_circuit_is_identity(rng):
    psi = haar_state(3, rng)
    np.testing.assert_allclose(run_circuit(Circuit(3), psi, 0).state, psi, atol=1e-15)


def test_run_is_deterministic_per_seed(rng):
    psi = haar_state(3, rng)
    c = Circuit(3, [H(0), Measure(0, 0), Measure(1, 1), ClassicallyControlled(X(2), 0)], n_bits=2)
    a, b = run_circuit(c, psi, 11), run_circuit(c, psi, 11)
    np.testing.assert_array_equal(a.bits, b.bits)
    np.testing.assert_array_equal(a.state, b.state)


def test_collapse_renormalizes(rng):
    psi = haar_state(2, rng)
    rec = run_circuit(Circuit(2, [Measure(1, 0)], n_bits=1), psi, 5)
    assert np.linalg.norm(rec.state) == pytest.approx(1, abs=1e-12)


def test_forced_impossible_outcome_raises():
    with pytest.raises(StateError):
        run_circuit(Circuit(1, [Measure(0, 0)], n_bits=1), ket("0"), 0, forced={0: 1})


def test_wrong_register_size_rejected():
    with pytest.raises(StateError):
        run_circuit(Circuit(2), ket("0"), 0)


# EPR

def test_epr_pair():
    np.testing.assert_allclose(epr_pair(), [s2, 0, 0, s2], atol=1e-15)
    built = run_circuit(Circuit(2, epr_circuit(0, 1)), ket("00"), 0).state
    assert qstate.state_fidelity(epr_pair(), built) == pytest.approx(1, abs=1e-12)
    for w in (0, 1):
        np.testing.assert_allclose(qstate.reduced_state(epr_pair(), [w]), np.eye(2) / 2, atol=1e-15)


# V operator

def test_v_examples():
    v = build_v()
    np.testing.assert_allclose(v @ ket("000"), s2 * (ket("000") + ket("100")), atol=1e-15)
    np.testing.assert_allclose(v @ ket("110"), s2 * (ket("000") - ket("100")), atol=1e-15)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(8), atol=1e-12)


def test_v_entries_are_real_half_roots():
    v = build_v()
    assert np.max(np.abs(v.imag)) < 1e-15
    vals = np.abs(v.real)
    assert np.all((vals < 1e-12) | (np.abs(vals - s2) < 1e-12))


def test_v_matches_explicit_gate_product():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    had = np.array([[1, 1], [1, -1]]) * s2
    want = embed(np.diag([1, 1, 1, -1]), [0, 2], 3) @ np.kron(had, cnot) @ embed(cnot, [0, 1], 3)
    np.testing.assert_allclose(build_v(), want, atol=1e-14)


def test_closed_form_examples():
    np.testing.assert_allclose(v_closed_form(0, 0, 0), s2 * (ket("000") + ket("100")), atol=1e-15)
    np.testing.assert_allclose(v_closed_form(1, 0, 0), s2 * (ket("011") + ket("111")), atol=1e-15)


@pytest.mark.parametrize("abc", list(itertools.product((0, 1), repeat=3)))
def test_closed_form_matches_gate_product(abc):
    idx = abc[0] * 4 + abc[1] * 2 + abc[2]
    np.testing.assert_allclose(build_v()[:, idx], v_closed_form(*abc), atol=1e-12)


def test_closed_form_rejects_non_bits():
    with pytest.raises(StateError):
        v_closed_form(2, 0, 0)


# standard teleportation

def test_teleport_zero():
    rep = standard_teleportation(ket("0"), 0)
    assert rep.output_fidelity == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("label", ["plus", "right", "left", "1"])
@pytest.mark.parametrize("outcomes", list(itertools.product((0, 1), repeat=2)))
def test_teleport_every_branch(label, outcomes):
    rep = standard_teleportation(qstate.labeled_state(label), outcomes=outcomes)
    assert rep.output_fidelity == pytest.approx(1, abs=1e-10)
    assert tuple(rep.metadata["measured_bits"]) == outcomes


def test_teleport_haar_states(rng):
    seen = set()
    for seed in range(50):
        psi = haar_state(1, rng)
        rep = standard_teleportation(psi, seed)
        assert rep.output_fidelity == pytest.approx(1, abs=1e-10)
        seen.add(tuple(rep.metadata["measured_bits"]))
    assert len(seen) == 4


def test_teleportation_circuit_measures_two_wires():
    c = teleportation_circuit()
    assert sum(isinstance(s, Measure) for s in c.steps) == 2


def test_teleport_rejects_two_qubit_input():
    with pytest.raises(StateError):
        standard_teleportation(ket("00"))


# superdense coding

@pytest.mark.parametrize("msg", list(itertools.product((0, 1), repeat=2)))
def test_superdense_decodes(msg):
    for seed in range(5):
        assert superdense_code(*msg, rng_seed=seed) == msg


def test_superdense_is_bijection():
    decoded = {superdense_code(*m) for m in itertools.product((0, 1), repeat=2)}
    assert len(decoded) == 4


def test_superdense_rejects_non_bits():
    with pytest.raises(StateError):
        superdense_code(2, 0)
