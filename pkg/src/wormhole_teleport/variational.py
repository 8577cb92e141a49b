"""Variational search for the V operator on N + 1 qubits.

The ansatz is the RY circuit: a layer of RY rotations on every wire, then
``reps`` times a linear CNOT staircase followed by another RY layer. The
cost averages, over a set of probe states, the fidelity of the final
register with ``pairs (x) psi`` and the Hawking-qubit entropy in bits::

    C = 1 - (1/2) * mean_k (F_k + S_k / ln 2)

so ``C = 0`` exactly when every probe is teleported perfectly and the
exchanged qubit is maximally mixed.
"""
from __future__ import annotations

import math
import statistics
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels, qstate
from .circuits import CNOT, RY, Circuit, build_v
from .optim import METHODS, minimize
from .protocols import RELABELINGS, prepared_register, run_general, target_overlaps
from .qstate import StateError
from .report import rows_to_csv

TWO_PI = 2 * math.pi


def n_params(n_qubits: int, reps: int) -> int:
    return n_qubits * (reps + 1)


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    reps: int
    thetas: tuple[float, ...]

    def __post_init__(self):
        if self.n_qubits < 1 or self.reps < 0:
            raise StateError("need n_qubits >= 1 and reps >= 0")
        th = tuple(float(t) for t in np.ravel(self.thetas))
        if len(th) != n_params(self.n_qubits, self.reps):
            raise StateError(
                f"RY ansatz on {self.n_qubits} qubits with {self.reps} reps takes "
                f"{n_params(self.n_qubits, self.reps)} angles, got {len(th)}"
            )
        object.__setattr__(self, "thetas", th)

    @classmethod
    def from_thetas(cls, thetas, n_qubits: int) -> AnsatzSpec:
        count = len(thetas)
        if count % n_qubits or count < n_qubits:
            raise StateError(f"{count} angles do not fit an RY ansatz on {n_qubits} qubits")
        return cls(n_qubits, count // n_qubits - 1, tuple(thetas))


def ry_ansatz(spec: AnsatzSpec) -> np.ndarray:
    return kernels.ry_ansatz_matrix(np.asarray(spec.thetas, dtype=float), spec.n_qubits, spec.reps)


def ry_ansatz_circuit(spec: AnsatzSpec) -> Circuit:
    """Gate list in drawing order: each wire gets its next rotation right after its last CNOT."""
    q, th = spec.n_qubits, spec.thetas
    steps = [RY(th[w], w) for w in range(q)]
    for r in range(1, spec.reps + 1):
        layer = th[r * q:(r + 1) * q]
        for w in range(q - 1):
            steps.append(CNOT(w, w + 1))
            steps.append(RY(layer[w], w))
        steps.append(RY(layer[q - 1], q - 1))
    return Circuit(q, steps)


class CostFunction:
    """Cost of RY angles for ``n_pairs`` shared pairs; caches the prepared probe register."""

    def __init__(self, n_pairs: int, state_set: Sequence | None = None,
                 relabelings: Sequence[str] = RELABELINGS):
        if n_pairs < 1:
            raise StateError("n_pairs must be >= 1")
        self.n_pairs = n_pairs
        self.relabelings = tuple(relabelings)
        states = qstate.six_states() if state_set is None else [np.asarray(s, dtype=complex) for s in state_set]
        if not states:
            raise StateError("state set must be non-empty")
        self.psis = np.array([qstate.check_state(s) for s in states])
        if self.psis.shape[1] != 2:
            raise StateError("probe states must be single-qubit")
        self.start = prepared_register(self.psis, n_pairs)

    def spec(self, thetas) -> AnsatzSpec:
        return AnsatzSpec.from_thetas(thetas, self.n_pairs + 1)

    def terms(self, thetas=None, *, v: np.ndarray | None = None):
        """Per-probe fidelities and Hawking entropies (in bits) for angles or an explicit V."""
        if v is None:
            v = ry_ansatz(self.spec(thetas)).astype(complex)
        elif v.shape != (2 ** (self.n_pairs + 1),) * 2:
            raise StateError(f"V of shape {v.shape} does not act on {self.n_pairs + 1} qubits")
        rho_h, final = run_general(self.start, np.ascontiguousarray(v, dtype=complex), self.n_pairs)
        fids = target_overlaps(final, self.psis, self.n_pairs, self.relabelings).max(axis=1)
        lam = np.clip(np.linalg.eigvalsh(rho_h), 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -np.sum(np.where(lam > 1e-300, lam * np.log2(lam), 0.0), axis=1)
        return fids, ent

    def __call__(self, thetas=None, *, v: np.ndarray | None = None) -> float:
        fids, ent = self.terms(thetas, v=v)
        return float(1 - 0.5 * np.mean(fids + ent))


def cost(thetas, n_pairs: int, state_set: Sequence | None = None,
         relabelings: Sequence[str] = RELABELINGS) -> float:
    return CostFunction(n_pairs, state_set, relabelings)(thetas)


@dataclass
class OptimizerConfig:
    max_iters: int = 500
    restarts: int = 5
    rng_seed: int = 0
    tol: float = 1e-8
    method: str = "cobyla"
    initial_step: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class RestartTrace:
    restart: int
    initial_thetas: list[float]
    costs: list[float]
    best_thetas: list[float]
    best_cost: float
    fidelity: float
    entropy_over_ln2: float
    entropy_over_ln2_sem: float
    message: str

    @property
    def running_best(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.costs))


@dataclass
class OptimizationTrace:
    n_pairs: int
    reps: int
    config: OptimizerConfig
    restarts: list[RestartTrace] = field(default_factory=list)

    @property
    def best(self) -> RestartTrace:
        return min(self.restarts, key=lambda r: r.best_cost)

    @property
    def best_cost(self) -> float:
        return self.best.best_cost

    @property
    def best_thetas(self) -> list[float]:
        return self.best.best_thetas

    @property
    def median_final_cost(self) -> float:
        return statistics.median(r.best_cost for r in self.restarts)

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "reps": self.reps,
            "config": asdict(self.config),
            "best_cost": self.best_cost,
            "best_restart": self.best.restart,
            "best_thetas": self.best_thetas,
            "median_final_cost": self.median_final_cost,
            "restarts": [asdict(r) for r in self.restarts],
        }

    def costs_csv(self) -> str:
        rows = [[r.restart, i, c] for r in self.restarts for i, c in enumerate(r.costs)]
        return rows_to_csv(["restart", "iteration", "cost"], rows)

    def summary_csv(self) -> str:
        rows = [[r.restart, r.best_cost, r.fidelity, r.entropy_over_ln2, r.entropy_over_ln2_sem]
                for r in self.restarts]
        return rows_to_csv(["restart", "cost", "fidelity", "entropy_over_ln2", "entropy_over_ln2_sem"], rows)


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(restart,)))


def optimize(n_pairs: int, reps: int, cfg: OptimizerConfig | None = None,
             state_set: Sequence | None = None,
             relabelings: Sequence[str] = RELABELINGS) -> OptimizationTrace:
    """Independent restarts from uniform random angles in [0, 2 pi)."""
    cfg = cfg or OptimizerConfig()
    f = CostFunction(n_pairs, state_set, relabelings)
    k = n_params(n_pairs + 1, reps)
    trace = OptimizationTrace(n_pairs, reps, cfg)
    for r in range(cfg.restarts):
        x0 = _restart_rng(cfg.rng_seed, r).uniform(0.0, TWO_PI, k)
        res = minimize(f, x0, method=cfg.method, max_evals=cfg.max_iters, tol=cfg.tol,
                       initial_step=cfg.initial_step)
        fids, ent = f.terms(res.x)
        trace.restarts.append(RestartTrace(
            restart=r,
            initial_thetas=x0.tolist(),
            costs=list(res.history),
            best_thetas=res.x.tolist(),
            best_cost=res.fun,
            fidelity=float(np.mean(fids)),
            entropy_over_ln2=float(np.mean(ent)),
            entropy_over_ln2_sem=float(np.std(ent, ddof=1) / math.sqrt(len(ent))) if len(ent) > 1 else 0.0,
            message=res.message,
        ))
    return trace


def verify_v_equivalence(thetas) -> dict:
    """Compare 3-qubit RY angles against the exact V, as operators and through the cost."""
    spec = AnsatzSpec.from_thetas(thetas, 3)
    a = ry_ansatz(spec)
    v = build_v()
    overlap = float(abs(np.trace(a.conj().T @ v)) / 8)
    c = cost(spec.thetas, 2)
    return {"operator_overlap": overlap, "cost": c, "equivalent": c < 1e-6, "reps": spec.reps}
