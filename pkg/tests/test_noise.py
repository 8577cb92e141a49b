import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wormhole_teleport import qstate
from wormhole_teleport.noise import (
    CLASSICAL_LIMIT,
    ExperimentConfig,
    NoiseConfig,
    expected_counts,
    pseudo_pure,
    run_experiment,
    sample_counts,
    tomograph,
    tomography_1q,
)
from wormhole_teleport.protocols import pre_exchange_state
from wormhole_teleport.qstate import StateError, fidelity, random_density, to_density

PLUS = qstate.labeled_state("plus")


# pseudo-pure mixing

def test_pseudo_pure_endpoints(rng):
    rho = random_density(3, rng)
    np.testing.assert_allclose(pseudo_pure(rho, 0.0), rho, atol=1e-15)
    np.testing.assert_allclose(pseudo_pure(rho, 1.0), np.eye(8) / 8, atol=1e-15)


def test_pseudo_pure_is_affine(rng):
    rho = random_density(2, rng)
    a, b, t = 0.2, 0.9, 0.35
    mixed = (1 - t) * pseudo_pure(rho, a) + t * pseudo_pure(rho, b)
    np.testing.assert_allclose(mixed, pseudo_pure(rho, (1 - t) * a + t * b), atol=1e-14)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.5, 1.0])
@pytest.mark.parametrize("label", qstate.STATE_LABELS)
def test_hawking_qubit_ignores_noise(eps, label):
    rho = pseudo_pure(to_density(pre_exchange_state(qstate.labeled_state(label))), eps)
    qstate.check_density(rho)
    np.testing.assert_allclose(qstate.partial_trace(rho, [2]), np.eye(2) / 2, atol=1e-12)


@pytest.mark.parametrize("eps", [-0.1, 1.5])
def test_pseudo_pure_rejects_epsilon(eps):
    with pytest.raises(StateError):
        pseudo_pure(np.eye(2) / 2, eps)


# sampling

def test_sample_deterministic_outcomes():
    assert sample_counts(to_density([1, 0]), "Z", 100, 0) == (100, 0)
    assert sample_counts(to_density(PLUS), "X", 500, 1) == (500, 0)
    assert sample_counts(to_density(qstate.labeled_state("right")), "Y", 500, 1) == (500, 0)
    assert sample_counts(to_density(qstate.labeled_state("left")), "Y", 500, 1) == (0, 500)


def test_sample_maximally_mixed_concentrates():
    shots = 8192
    c0, c1 = sample_counts(np.eye(2) / 2, "Z", shots, 42)
    assert c0 + c1 == shots
    assert abs(c1 - shots / 2) < 4 * math.sqrt(shots / 4)


def test_sample_is_deterministic_per_seed(rng):
    rho = random_density(1, rng)
    assert sample_counts(rho, "Y", 1000, 9, 0.05) == sample_counts(rho, "Y", 1000, 9, 0.05)


def test_readout_flips_mix_outcomes():
    c0, c1 = sample_counts(to_density([1, 0]), "Z", 20000, 3, readout_flip_prob=0.1)
    assert abs(c1 / 20000 - 0.1) < 4 * math.sqrt(0.09 / 20000)


def test_unknown_basis_rejected():
    with pytest.raises(StateError):
        sample_counts(np.eye(2) / 2, "W", 10, 0)


# tomography

def test_tomography_exact_zero_state():
    res = tomography_1q((50, 50), (50, 50), (100, 0))
    np.testing.assert_allclose(res.reconstructed_dm, [[1, 0], [0, 0]], atol=1e-15)
    assert res.shots_used == 300


def test_tomography_balanced_is_mixed():
    res = tomography_1q((10, 10), (10, 10), (10, 10))
    np.testing.assert_allclose(res.reconstructed_dm, np.eye(2) / 2, atol=1e-15)
    assert res.bloch_vector == (0.0, 0.0, 0.0)


def test_tomography_rescales_unphysical_vector():
    res = tomography_1q((100, 0), (100, 0), (100, 0))
    assert np.linalg.norm(res.bloch_vector) == pytest.approx(1, abs=1e-12)
    qstate.check_density(res.reconstructed_dm)


def test_tomography_rejects_empty_basis():
    with pytest.raises(StateError):
        tomography_1q((0, 0), (1, 1), (1, 1))


def test_tomography_of_sampled_plus():
    res = tomograph(to_density(PLUS), 8192, np.random.default_rng(5))
    assert fidelity(res.reconstructed_dm, to_density(PLUS)) >= 0.99


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_tomography_inverts_exact_probabilities(seed, rank):
    rho = random_density(1, np.random.default_rng(seed), rank)
    counts = [expected_counts(rho, b, 1.0) for b in "XYZ"]
    np.testing.assert_allclose(tomography_1q(*counts).reconstructed_dm, rho, atol=1e-12)


# configs

@pytest.mark.parametrize("kw", [{"epsilon": 1.1}, {"epsilon": -0.1}, {"readout_flip_prob": 1.0}])
def test_noise_config_validation(kw):
    with pytest.raises(StateError):
        NoiseConfig(**kw)


@pytest.mark.parametrize("kw", [{"runs": 0}, {"shots": 0}, {"state_labels": ("up",)}])
def test_experiment_config_validation(kw):
    with pytest.raises(StateError):
        ExperimentConfig(**kw)


# experiment replay

@pytest.fixture(scope="module")
def clean_run():
    return run_experiment(ExperimentConfig(runs=12, shots=8192, rng_seed=7), NoiseConfig(0.0))


def test_clean_experiment_fidelities(clean_run):
    summ = clean_run.summary()
    assert set(summ) == set(qstate.STATE_LABELS)
    for label, m in summ.items():
        assert m["output_fidelity"]["mean"] >= 0.99
        assert m["hawking_fidelity"]["mean"] >= 0.999
        assert m["output_fidelity"]["sem"] > 0


def test_experiment_record_count(clean_run):
    assert len(clean_run.records) == 12 * 6


def test_noisy_hawking_qubit_unchanged():
    rep = run_experiment(ExperimentConfig(runs=12, shots=8192, rng_seed=3), NoiseConfig(0.3))
    summ = rep.summary()
    for label in qstate.STATE_LABELS:
        assert summ[label]["hawking_fidelity"]["mean"] >= 0.999
        assert summ[label]["output_fidelity"]["mean"] > CLASSICAL_LIMIT
    assert all(rep.state_independence("hawking_fidelity").values())
    assert all(rep.state_independence("hawking_entropy_over_ln2").values())


def test_fully_mixed_output_is_half():
    rep = run_experiment(ExperimentConfig(runs=4, shots=8192, rng_seed=1), NoiseConfig(1.0))
    for m in rep.summary().values():
        assert m["output_fidelity"]["mean"] == pytest.approx(0.5, abs=0.02)


def test_state_independence_clean(clean_run):
    assert all(clean_run.state_independence("hawking_fidelity").values())
    assert all(clean_run.state_independence("hawking_entropy_over_ln2").values())


def test_single_run_has_no_error_bar():
    rep = run_experiment(ExperimentConfig(runs=1, shots=64, rng_seed=0))
    assert all(m["output_fidelity"]["sem"] is None for m in rep.summary().values())


def test_experiment_is_reproducible():
    cfg = ExperimentConfig(runs=3, shots=256, rng_seed=11)
    noise = NoiseConfig(0.2, 0.01)
    assert run_experiment(cfg, noise).runs_csv() == run_experiment(cfg, noise).runs_csv()
    other = run_experiment(ExperimentConfig(runs=3, shots=256, rng_seed=12), noise)
    assert other.runs_csv() != run_experiment(cfg, noise).runs_csv()


def test_runs_csv_columns(clean_run):
    rows = list(csv.reader(io.StringIO(clean_run.runs_csv())))
    assert rows[0] == ["state_label", "run", "output_fidelity", "hawking_fidelity", "hawking_entropy_over_ln2"]
    assert len(rows) == 1 + 72
    assert float(rows[1][2]) == clean_run.records[0].output_fidelity


def test_plot_data(clean_run):
    data = clean_run.plot_data()
    assert data["labels"] == list(qstate.STATE_LABELS)
    assert data["classical_limit"] == pytest.approx(2 / 3)
    assert len(data["output_fidelity_mean"]) == 6
