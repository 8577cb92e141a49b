"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 200]

Covers the three kernels on the register sizes the protocols use, plus one
full cost evaluation of the variational search (N=3, six probe states).
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from wormhole_teleport import kernels
from wormhole_teleport.protocols import prepared_register
from wormhole_teleport.qstate import random_unitary, six_states


def _cases(rng):
    for n, targets in [(5, [0, 1, 2]), (7, [3, 4, 5, 6]), (9, [0, 4, 8])]:
        states = np.ascontiguousarray(rng.standard_normal((6, 2**n)) + 1j * rng.standard_normal((6, 2**n)))
        u = random_unitary(2 ** len(targets), rng)
        t = np.asarray(targets, dtype=np.intp)
        yield f"apply_unitary n={n} k={len(targets)} batch=6", lambda b, s=states, u=u, t=t, n=n: b.apply_unitary(s, u, t, n)
        keep = np.array([n // 2], dtype=np.intp)
        yield f"reduced_density n={n} keep=1 batch=6", lambda b, s=states, k=keep, n=n: b.reduced_density(s, k, n)
    th = rng.uniform(0, 2 * np.pi, 12)
    yield "ry_ansatz_matrix q=4 reps=2", lambda b, th=th: b.ry_ansatz_matrix(th, 4, 2)

    start = prepared_register(np.array(six_states()), 3)

    def cost_eval(b, th=th):
        v = b.ry_ansatz_matrix(th, 4, 2).astype(complex)
        n = 7
        mid = b.apply_unitary(start, v, np.arange(4, dtype=np.intp), n)
        b.reduced_density(mid, np.array([3], dtype=np.intp), n)
        b.apply_unitary(mid, v, np.arange(3, 7, dtype=np.intp), n)

    yield "cost-function kernels N=3", cost_eval


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    if "cython" not in kernels.BACKENDS:
        print("compiled kernels are not built; only the numpy fallback is available")
    rng = np.random.default_rng(0)
    names = list(kernels.BACKENDS)
    print(f"{'kernel':<42}" + "".join(f"{n + ' [us]':>14}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, fn in _cases(rng):
        times = []
        for name in names:
            b = kernels.BACKENDS[name]
            fn(b)
            times.append(min(timeit.repeat(lambda: fn(b), number=args.repeat, repeat=3)) / args.repeat * 1e6)
        line = f"{label:<42}" + "".join(f"{t:14.1f}" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
