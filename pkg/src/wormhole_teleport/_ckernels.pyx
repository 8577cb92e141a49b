# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same API as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def apply_unitary(complex[:, ::1] states, complex[:, ::1] u, targets, int n):
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef int k = len(targets)
    cdef Py_ssize_t sub = 1 << k
    cdef Py_ssize_t nbase = dim >> k
    cdef Py_ssize_t[::1] offs = np.zeros(sub, dtype=np.intp)
    cdef Py_ssize_t[::1] bases = np.empty(nbase, dtype=np.intp)
    cdef Py_ssize_t mask = 0
    cdef Py_ssize_t j, t, b, i, r, c, base, src, bit
    cdef complex acc
    cdef int[::1] tg = np.asarray(targets, dtype=np.intc)
    out_arr = np.empty((batch, dim), dtype=np.complex128)
    cdef complex[:, ::1] out = out_arr
    cdef complex[::1] buf = np.empty(sub, dtype=np.complex128)

    for t in range(k):
        mask |= (<Py_ssize_t>1) << (n - 1 - tg[t])
    # the first target is the most significant bit of u's index
    for j in range(sub):
        for t in range(k):
            if (j >> (k - 1 - t)) & 1:
                offs[j] |= (<Py_ssize_t>1) << (n - 1 - tg[t])
    # spread the bits of i over the non-target positions
    for i in range(nbase):
        base = 0
        src = i
        bit = 0
        while src:
            if not (mask >> bit) & 1:
                base |= (src & 1) << bit
                src >>= 1
            bit += 1
        bases[i] = base

    with nogil:
        for b in range(batch):
            for i in range(nbase):
                base = bases[i]
                for c in range(sub):
                    buf[c] = states[b, base + offs[c]]
                for r in range(sub):
                    acc = 0
                    for c in range(sub):
                        acc = acc + u[r, c] * buf[c]
                    out[b, base + offs[r]] = acc
    return out_arr


def reduced_density(complex[:, ::1] states, keep, int n):
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef int m = len(keep)
    cdef Py_ssize_t dk = 1 << m
    cdef Py_ssize_t dr = dim >> m
    cdef int[::1] kp = np.asarray(keep, dtype=np.intc)
    cdef Py_ssize_t i, a, r, b, a2, t, bit, rbit
    cdef complex acc
    cdef Py_ssize_t[::1] a_of = np.empty(dim, dtype=np.intp)
    cdef Py_ssize_t[::1] r_of = np.empty(dim, dtype=np.intp)
    cdef char[::1] is_kept = np.zeros(n, dtype=np.int8)
    for t in range(m):
        is_kept[kp[t]] = 1
    # split every basis index into (kept index, rest index)
    for i in range(dim):
        a = 0
        for t in range(m):
            a = (a << 1) | ((i >> (n - 1 - kp[t])) & 1)
        r = 0
        for t in range(n):
            if not is_kept[t]:
                r = (r << 1) | ((i >> (n - 1 - t)) & 1)
        a_of[i] = a
        r_of[i] = r

    mat_arr = np.empty((dk, dr), dtype=np.complex128)
    cdef complex[:, ::1] mat = mat_arr
    out_arr = np.zeros((batch, dk, dk), dtype=np.complex128)
    cdef complex[:, :, ::1] out = out_arr
    with nogil:
        for b in range(batch):
            for i in range(dim):
                mat[a_of[i], r_of[i]] = states[b, i]
            for a in range(dk):
                for a2 in range(a, dk):
                    acc = 0
                    for r in range(dr):
                        acc = acc + mat[a, r] * mat[a2, r].conjugate()
                    out[b, a, a2] = acc
                    out[b, a2, a] = acc.conjugate()
    return out_arr


def ry_ansatz_matrix(double[::1] thetas, int q, int reps):
    cdef Py_ssize_t dim = 1 << q
    cdef Py_ssize_t i, col, lo, hi
    cdef int layer, w
    cdef double c, s, x, y, tmp
    cdef Py_ssize_t cbit, tbit, wbit
    out_arr = np.eye(dim, dtype=np.float64)
    cdef double[:, ::1] m = out_arr
    with nogil:
        for layer in range(reps + 1):
            if layer:
                for w in range(q - 1):
                    cbit = (<Py_ssize_t>1) << (q - 1 - w)
                    tbit = (<Py_ssize_t>1) << (q - 2 - w)
                    for i in range(dim):
                        if (i & cbit) and not (i & tbit):
                            for col in range(dim):
                                tmp = m[i, col]
                                m[i, col] = m[i | tbit, col]
                                m[i | tbit, col] = tmp
            for w in range(q):
                c = cos(thetas[layer * q + w] / 2)
                s = sin(thetas[layer * q + w] / 2)
                wbit = (<Py_ssize_t>1) << (q - 1 - w)
                for lo in range(dim):
                    if lo & wbit:
                        continue
                    hi = lo | wbit
                    for col in range(dim):
                        x = m[lo, col]
                        y = m[hi, col]
                        m[lo, col] = c * x - s * y
                        m[hi, col] = s * x + c * y
    return out_arr
