"""Pseudo-pure noise, finite-shot Pauli measurements, single-qubit tomography
and the synthetic replay of the hardware run structure (runs x shots per
teleported state).
"""
from __future__ import annotations

import math
import statistics
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from . import qstate
from .circuits import H_MAT, SDG_MAT
from .protocols import MAX_MIXED_1Q, pre_exchange_state, receiver_unitary
from .qstate import StateError
from .report import LN2, rows_to_csv

CLASSICAL_LIMIT = 2 / 3

# rotation taking the measured Pauli eigenbasis to the computational basis
_BASIS_ROTATIONS = {"X": H_MAT, "Y": H_MAT @ SDG_MAT, "Z": np.eye(2, dtype=complex)}


@dataclass(frozen=True)
class NoiseConfig:
    epsilon: float = 0.0
    readout_flip_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise StateError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.readout_flip_prob < 1.0:
            raise StateError(f"readout_flip_prob must lie in [0, 1), got {self.readout_flip_prob}")


@dataclass(frozen=True)
class ExperimentConfig:
    runs: int = 12
    shots: int = 8192
    rng_seed: int = 0
    state_labels: tuple[str, ...] = qstate.STATE_LABELS

    def __post_init__(self):
        if self.runs < 1 or self.shots < 1:
            raise StateError("runs and shots must be >= 1")
        if self.rng_seed < 0:
            raise StateError("rng_seed must be non-negative")
        object.__setattr__(self, "state_labels", tuple(self.state_labels))
        for label in self.state_labels:
            qstate.labeled_state(label)


@dataclass
class TomographyResult:
    bloch_vector: tuple[float, float, float]
    reconstructed_dm: np.ndarray
    shots_used: int


def pseudo_pure(rho0, epsilon: float) -> np.ndarray:
    """(1 - eps) rho0 + eps I / 2**n."""
    if not 0.0 <= epsilon <= 1.0:
        raise StateError(f"epsilon must lie in [0, 1], got {epsilon}")
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    return (1 - epsilon) * rho0 + epsilon * np.eye(dim, dtype=complex) / dim


def outcome_probabilities(dm, basis: str) -> tuple[float, float]:
    try:
        r = _BASIS_ROTATIONS[basis]
    except KeyError:
        raise StateError(f"basis must be X, Y or Z, got {basis!r}") from None
    rho = np.asarray(dm, dtype=complex)
    if rho.shape != (2, 2):
        raise StateError("single-qubit density matrix expected")
    p0 = float(np.clip((r @ rho @ r.conj().T)[0, 0].real, 0.0, 1.0))
    return p0, 1.0 - p0


def expected_counts(dm, basis: str, shots: float) -> tuple[float, float]:
    """Infinite-statistics counts; feeding these to tomography_1q inverts exactly."""
    p0, p1 = outcome_probabilities(dm, basis)
    return p0 * shots, p1 * shots


def sample_counts(dm, basis: str, shots: int, rng_seed: int | np.random.Generator,
                  readout_flip_prob: float = 0.0) -> tuple[int, int]:
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    _, p1 = outcome_probabilities(dm, basis)
    ones = int(rng.binomial(shots, p1))
    if readout_flip_prob:
        up = int(rng.binomial(shots - ones, readout_flip_prob))
        down = int(rng.binomial(ones, readout_flip_prob))
        ones += up - down
    return shots - ones, ones


def tomography_1q(counts_x, counts_y, counts_z) -> TomographyResult:
    """Linear inversion from Pauli counts; an unphysical Bloch vector is scaled to unit length."""
    r = []
    total = 0
    for basis, (c0, c1) in zip("XYZ", (counts_x, counts_y, counts_z)):
        n = c0 + c1
        if n <= 0:
            raise StateError(f"no shots recorded in the {basis} basis")
        r.append((c0 - c1) / n)
        total += n
    r = np.array(r, dtype=float)
    norm = float(np.linalg.norm(r))
    if norm > 1:
        r /= norm
    x, y, z = r
    rho = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)
    return TomographyResult(bloch_vector=(float(x), float(y), float(z)), reconstructed_dm=rho,
                            shots_used=int(round(total)))


def tomograph(dm, shots: int, rng: np.random.Generator, readout_flip_prob: float = 0.0) -> TomographyResult:
    counts = [sample_counts(dm, b, shots, rng, readout_flip_prob) for b in "XYZ"]
    return tomography_1q(*counts)


@dataclass
class RunRecord:
    state_label: str
    run: int
    output_fidelity: float
    hawking_fidelity: float
    hawking_entropy_over_ln2: float


def _mean_sem(xs: Sequence[float]) -> tuple[float, float | None]:
    m = statistics.fmean(xs)
    if len(xs) < 2:
        return m, None
    return m, statistics.stdev(xs) / math.sqrt(len(xs))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    noise: NoiseConfig
    records: list[RunRecord] = field(default_factory=list)

    METRICS = ("output_fidelity", "hawking_fidelity", "hawking_entropy_over_ln2")

    def values(self, label: str, metric: str) -> list[float]:
        return [getattr(r, metric) for r in self.records if r.state_label == label]

    def summary(self) -> dict[str, dict[str, dict[str, float | None]]]:
        """Per state and metric: mean and standard deviation of the mean over runs."""
        out = {}
        for label in self.config.state_labels:
            out[label] = {}
            for metric in self.METRICS:
                m, sem = _mean_sem(self.values(label, metric))
                out[label][metric] = {"mean": m, "sem": sem}
        return out

    def state_independence(self, metric: str = "hawking_fidelity", nsigma: float = 3.0) -> dict[str, bool]:
        """Is each state's mean within ``nsigma`` combined errors of the pooled mean?"""
        summ = self.summary()
        pooled = [r for label in self.config.state_labels for r in self.values(label, metric)]
        pm, psem = _mean_sem(pooled)
        result = {}
        for label in self.config.state_labels:
            m, sem = summ[label][metric]["mean"], summ[label][metric]["sem"]
            if sem is None:
                result[label] = True
                continue
            result[label] = abs(m - pm) <= nsigma * math.hypot(sem, psem)
        return result

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "noise": asdict(self.noise),
            "classical_limit": CLASSICAL_LIMIT,
            "summary": self.summary(),
            "runs": [asdict(r) for r in self.records],
        }

    def runs_csv(self) -> str:
        rows = [[r.state_label, r.run, r.output_fidelity, r.hawking_fidelity, r.hawking_entropy_over_ln2]
                for r in self.records]
        return rows_to_csv(["state_label", "run", *self.METRICS], rows)

    def summary_csv(self) -> str:
        rows = []
        for label, metrics in self.summary().items():
            row = [label]
            for metric in self.METRICS:
                row += [metrics[metric]["mean"], "" if metrics[metric]["sem"] is None else metrics[metric]["sem"]]
            rows.append(row)
        header = ["state_label"] + [f"{m}_{s}" for m in self.METRICS for s in ("mean", "sem")]
        return rows_to_csv(header, rows)

    def plot_data(self) -> dict:
        """Series for a bar chart of mean output fidelity per state with the classical limit line."""
        summ = self.summary()
        labels = list(self.config.state_labels)
        return {
            "labels": labels,
            "output_fidelity_mean": [summ[k]["output_fidelity"]["mean"] for k in labels],
            "output_fidelity_sem": [summ[k]["output_fidelity"]["sem"] for k in labels],
            "classical_limit": CLASSICAL_LIMIT,
        }


def _run_rng(seed: int, run: int, state_index: int) -> np.random.Generator:
    # run seed is seed + run; each teleported state gets its own stream within a run
    return np.random.default_rng(np.random.SeedSequence(seed + run, spawn_key=(state_index,)))


def run_experiment(cfg: ExperimentConfig | None = None, noise: NoiseConfig | None = None) -> ExperimentReport:
    cfg = cfg or ExperimentConfig()
    noise = noise or NoiseConfig()
    ub = receiver_unitary()
    report = ExperimentReport(cfg, noise)
    exact = {}
    for label in cfg.state_labels:
        psi = qstate.labeled_state(label)
        rho_eps = pseudo_pure(qstate.to_density(pre_exchange_state(psi)), noise.epsilon)
        rho_h = qstate.partial_trace(rho_eps, [2])
        rho_out = qstate.partial_trace(ub @ rho_eps @ ub.conj().T, [4])
        exact[label] = (psi, rho_h, rho_out)
    for run in range(cfg.runs):
        for i, label in enumerate(cfg.state_labels):
            psi, rho_h, rho_out = exact[label]
            rng = _run_rng(cfg.rng_seed, run, i)
            tomo_h = tomograph(rho_h, cfg.shots, rng, noise.readout_flip_prob).reconstructed_dm
            tomo_out = tomograph(rho_out, cfg.shots, rng, noise.readout_flip_prob).reconstructed_dm
            report.records.append(RunRecord(
                state_label=label,
                run=run,
                output_fidelity=qstate.state_fidelity(psi, tomo_out),
                hawking_fidelity=qstate.fidelity(MAX_MIXED_1Q, tomo_h),
                hawking_entropy_over_ln2=qstate.von_neumann_entropy(tomo_h) / LN2,
            ))
    return report
