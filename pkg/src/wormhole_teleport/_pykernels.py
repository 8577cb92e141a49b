"""Pure numpy implementations of the hot kernels.

Every function here has a twin of the same name and signature in the
compiled ``_ckernels`` extension. Wire 0 is the most significant bit of a
basis index.
"""
from __future__ import annotations

import numpy as np


def apply_unitary(states: np.ndarray, u: np.ndarray, targets: np.ndarray, n: int) -> np.ndarray:
    """Apply ``u`` to wires ``targets`` of every row of ``states`` (shape (B, 2**n))."""
    k = len(targets)
    batch = states.shape[0]
    axes = [int(t) + 1 for t in targets]
    psi = states.reshape((batch,) + (2,) * n)
    psi = np.moveaxis(psi, axes, range(1, k + 1))
    shape = psi.shape
    psi = np.matmul(u, psi.reshape(batch, 2**k, -1)).reshape(shape)
    psi = np.moveaxis(psi, range(1, k + 1), axes)
    return np.ascontiguousarray(psi.reshape(batch, 2**n))


def reduced_density(states: np.ndarray, keep: np.ndarray, n: int) -> np.ndarray:
    """Reduced density matrices of pure states on the ``keep`` wires, in the given order."""
    keep = [int(w) for w in keep]
    m = len(keep)
    batch = states.shape[0]
    rest = [w for w in range(n) if w not in keep]
    psi = states.reshape((batch,) + (2,) * n)
    psi = np.transpose(psi, [0] + [w + 1 for w in keep] + [w + 1 for w in rest])
    psi = psi.reshape(batch, 2**m, -1)
    return np.matmul(psi, psi.conj().transpose(0, 2, 1))


def ry_ansatz_matrix(thetas: np.ndarray, q: int, reps: int) -> np.ndarray:
    """Real orthogonal matrix of the RY layers interleaved with CNOT staircases."""
    dim = 2**q
    # rows of m are transformed in place: m <- gate @ m
    m = np.eye(dim).reshape((2,) * q + (dim,))
    for layer in range(reps + 1):
        if layer:
            for w in range(q - 1):
                sl = [slice(None)] * (q + 1)
                sl[w] = 1
                sub = m[tuple(sl)]
                # target axis index drops by one after fixing the control axis
                sub[...] = np.flip(sub, axis=w)
        for w in range(q):
            t = thetas[layer * q + w]
            c, s = np.cos(t / 2), np.sin(t / 2)
            a = np.take(m, 0, axis=w)
            b = np.take(m, 1, axis=w)
            m = np.stack((c * a - s * b, s * a + c * b), axis=w)
    return m.reshape(dim, dim)
