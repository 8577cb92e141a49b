import numpy as np
import pytest

from wormhole_teleport import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20211)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return kernels.BACKENDS[request.param]


def embed(u, targets, n):
    """Brute-force full 2**n operator of ``u`` on ``targets``, element by element."""
    k = len(targets)
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    for row in range(dim):
        for col in range(dim):
            rb = [(row >> (n - 1 - w)) & 1 for w in range(n)]
            cb = [(col >> (n - 1 - w)) & 1 for w in range(n)]
            if any(rb[w] != cb[w] for w in range(n) if w not in targets):
                continue
            r = sum(rb[t] << (k - 1 - i) for i, t in enumerate(targets))
            c = sum(cb[t] << (k - 1 - i) for i, t in enumerate(targets))
            full[row, col] = u[r, c]
    return full


def brute_partial_trace(rho, keep, n):
    """Sum over the traced indices with explicit loops."""
    rest = [w for w in range(n) if w not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)

    def index(kbits, rbits):
        bits = [0] * n
        for w, b in zip(keep, kbits):
            bits[w] = b
        for w, b in zip(rest, rbits):
            bits[w] = b
        return int("".join(map(str, bits)), 2)

    for a in range(dk):
        for b in range(dk):
            ab = [(a >> (len(keep) - 1 - i)) & 1 for i in range(len(keep))]
            bb = [(b >> (len(keep) - 1 - i)) & 1 for i in range(len(keep))]
            for r in range(2 ** len(rest)):
                rr = [(r >> (len(rest) - 1 - i)) & 1 for i in range(len(rest))]
                out[a, b] += rho[index(ab, rr), index(bb, rr)]
    return out


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
