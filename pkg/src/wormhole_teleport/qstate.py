"""Dense pure and mixed qubit states.

States are plain numpy arrays: a state vector is a complex array of length
``2**n`` and a density matrix a complex ``(2**n, 2**n)`` array. Wire 0 is
the most significant bit of the basis index, so ``|abc>`` is index
``0b abc``.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from typing import NamedTuple

import numpy as np

from . import kernels

NORM_TOL = 1e-10
CLAMP_TOL = 1e-10
PSD_REJECT_TOL = 1e-8

SQRT1_2 = 1 / np.sqrt(2)


class StateError(ValueError):
    """Invalid state, operator or wire specification."""


class NotPSDError(StateError):
    """A matrix that should be positive semidefinite has a negative eigenvalue."""


class HermitianDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _qubits_for_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise StateError(f"dimension {dim} is not a power of two")
    return n


def n_qubits(x: np.ndarray) -> int:
    """Register size of a state vector or density matrix."""
    return _qubits_for_dim(np.shape(x)[0])


def check_state(state, atol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    if psi.ndim != 1:
        raise StateError(f"state vector must be 1-D, got shape {psi.shape}")
    _qubits_for_dim(psi.size)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1) > atol:
        raise StateError(f"state is not normalized: sum |a|^2 = {norm2!r}")
    return psi


def check_density(dm, atol: float = NORM_TOL) -> np.ndarray:
    rho = np.asarray(dm, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError(f"density matrix must be square, got shape {rho.shape}")
    _qubits_for_dim(rho.shape[0])
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > atol:
        raise StateError(f"density matrix is not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise StateError(f"density matrix trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -atol:
        raise NotPSDError(f"density matrix has eigenvalue {lo:.3g} < 0")
    return rho


def _check_wires(wires: Sequence[int], n: int) -> list[int]:
    ws = [int(w) for w in wires]
    if len(set(ws)) != len(ws):
        raise StateError(f"duplicate wire in {ws}")
    bad = [w for w in ws if not 0 <= w < n]
    if bad:
        raise StateError(f"wire(s) {bad} out of range for {n} qubits")
    return ws


def basis_state(index: int | str, n: int | None = None) -> np.ndarray:
    """Computational basis ket; ``basis_state("101")`` or ``basis_state(5, 3)``."""
    if isinstance(index, str):
        n = len(index)
        index = int(index, 2) if index else 0
    if n is None:
        raise StateError("n is required for an integer basis index")
    if not 0 <= index < 2**n:
        raise StateError(f"basis index {index} out of range for {n} qubits")
    psi = np.zeros(2**n, dtype=complex)
    psi[index] = 1
    return psi


def tensor_product(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_unitary(u: np.ndarray, atol: float = NORM_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol
    )


def apply_unitary(state, u, targets: Sequence[int]) -> np.ndarray:
    """Apply the ``2**k`` unitary ``u`` to wires ``targets`` (first target = MSB of ``u``)."""
    psi = np.asarray(state, dtype=complex)
    n = _qubits_for_dim(psi.size)
    ws = _check_wires(targets, n)
    u = np.ascontiguousarray(u, dtype=complex)
    if u.shape != (2 ** len(ws), 2 ** len(ws)):
        raise StateError(f"operator of shape {u.shape} does not match {len(ws)} target wire(s)")
    if not is_unitary(u):
        raise StateError("operator is not unitary within 1e-10")
    out = kernels.apply_unitary(np.ascontiguousarray(psi.reshape(1, -1)), u, np.asarray(ws, dtype=np.intp), n)
    return out[0]


def permute_wires(state, order: Sequence[int]) -> np.ndarray:
    """Relabel wires: new wire ``i`` carries old wire ``order[i]``."""
    psi = np.asarray(state, dtype=complex)
    n = _qubits_for_dim(psi.size)
    ws = _check_wires(order, n)
    if len(ws) != n:
        raise StateError("order must name every wire exactly once")
    return np.transpose(psi.reshape((2,) * n), ws).reshape(-1)


def to_density(state) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    return np.outer(psi, psi.conj())


def partial_trace(dm, keep: int | Iterable[int]) -> np.ndarray:
    """Trace out every wire not in ``keep``; kept wires stay in the order given."""
    rho = np.asarray(dm, dtype=complex)
    n = _qubits_for_dim(rho.shape[0])
    if isinstance(keep, (int, np.integer)):
        keep = [keep]
    elif isinstance(keep, (set, frozenset)):
        keep = sorted(keep)
    ws = _check_wires(list(keep), n)
    if not ws:
        raise StateError("keep set must be non-empty")
    rest = [w for w in range(n) if w not in ws]
    dk, dr = 2 ** len(ws), 2 ** len(rest)
    t = rho.reshape((2,) * (2 * n))
    t = np.transpose(t, ws + rest + [n + w for w in ws] + [n + w for w in rest])
    return np.einsum("arbr->ab", t.reshape(dk, dr, dk, dr))


def reduced_state(state, keep: int | Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state, without forming the full outer product."""
    psi = np.asarray(state, dtype=complex)
    n = _qubits_for_dim(psi.size)
    ws = _check_wires([keep] if isinstance(keep, (int, np.integer)) else keep, n)
    if not ws:
        raise StateError("keep set must be non-empty")
    return kernels.reduced_density(np.ascontiguousarray(psi.reshape(1, -1)), np.asarray(ws, dtype=np.intp), n)[0]


def eigh_decompose(m) -> HermitianDecomposition:
    m = np.asarray(m, dtype=complex)
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    return HermitianDecomposition(vals, vecs)


def _clamped_spectrum(dm) -> np.ndarray:
    vals = np.linalg.eigvalsh(np.asarray(dm, dtype=complex))
    if vals.min() < -PSD_REJECT_TOL:
        raise NotPSDError(f"eigenvalue {vals.min():.3g} below -{PSD_REJECT_TOL}")
    return np.clip(vals, 0.0, None)


def von_neumann_entropy(dm) -> float:
    """Entropy in nats, -sum(l ln l) over the spectrum with 0 ln 0 = 0."""
    vals = _clamped_spectrum(dm)
    vals = vals[vals > CLAMP_TOL]
    return max(0.0, float(-np.sum(vals * np.log(vals))))


def hermitian_sqrt(dm) -> np.ndarray:
    vals, vecs = eigh_decompose(dm)
    if vals.min() < -PSD_REJECT_TOL:
        raise NotPSDError(f"cannot take the square root: eigenvalue {vals.min():.3g}")
    # eigenvalues below the numerical-rank cutoff are roundoff; sqrt would inflate them
    cutoff = vals.size * np.finfo(float).eps * max(abs(vals).max(), 1.0)
    root = np.sqrt(np.where(vals > cutoff, vals, 0.0))
    return (vecs * root) @ vecs.conj().T


def fidelity(rho1, rho2) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))**2, clipped to [0, 1].

    Evaluated as the squared nuclear norm of sqrt(rho1) sqrt(rho2), which
    avoids square roots of roundoff-sized eigenvalues for low-rank inputs.
    """
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise StateError(f"dimension mismatch: {rho1.shape} vs {rho2.shape}")
    sv = np.linalg.svd(hermitian_sqrt(rho1) @ hermitian_sqrt(rho2), compute_uv=False)
    return float(min(1.0, np.sum(sv) ** 2))


def state_fidelity(psi, rho) -> float:
    """<psi|rho|psi> for a pure reference; accepts a ket or density matrix as ``rho``."""
    psi = np.asarray(psi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        return float(abs(np.vdot(psi, rho)) ** 2)
    return float(np.vdot(psi, rho @ psi).real)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return psi / np.linalg.norm(psi)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    dim = 2**n
    g = rng.standard_normal((dim, rank or dim)) + 1j * rng.standard_normal((dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)


# left/right follow the counter-clockwise/clockwise glyphs: left = (|0> - i|1>)/sqrt2
LABELED_STATES: dict[str, np.ndarray] = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "plus": np.array([SQRT1_2, SQRT1_2], dtype=complex),
    "minus": np.array([SQRT1_2, -SQRT1_2], dtype=complex),
    "left": np.array([SQRT1_2, -1j * SQRT1_2], dtype=complex),
    "right": np.array([SQRT1_2, 1j * SQRT1_2], dtype=complex),
}
STATE_LABELS: tuple[str, ...] = tuple(LABELED_STATES)


def labeled_state(label: str) -> np.ndarray:
    try:
        return LABELED_STATES[label].copy()
    except KeyError:
        raise StateError(f"unknown state label {label!r}; expected one of {', '.join(STATE_LABELS)}") from None


def six_states() -> list[np.ndarray]:
    return [labeled_state(k) for k in STATE_LABELS]
