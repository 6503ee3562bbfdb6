import numpy as np
import pytest

from superrad.couplings import build_couplings
from superrad.geometry import realization_seed, sample_configuration

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


# ---------------------------------------------------------------------------
# brute-force oracle in the full 2^N product space, written independently of
# the block machinery (basis label bit for atom i is 2^(N-1-i))
# ---------------------------------------------------------------------------


def lowering_ops(n):
    dim = 2**n
    ops = []
    for i in range(n):
        bit = 1 << (n - 1 - i)
        m = np.zeros((dim, dim))
        for s in range(dim):
            if s & bit:
                m[s ^ bit, s] = 1.0
        ops.append(m)
    return ops


def dense_rhs(rho, gamma, f):
    """-i[H, rho] + D(rho) with H = sum_{i!=j} f_ij s+_i s-_j."""
    n = gamma.shape[0]
    sm = lowering_ops(n)
    sp = [m.T for m in sm]
    H = sum(f[i, j] * sp[i] @ sm[j] for i in range(n) for j in range(n) if i != j)
    out = -1j * (H @ rho - rho @ H) if n > 1 else np.zeros_like(rho, dtype=complex)
    for i in range(n):
        for j in range(n):
            pm = sp[i] @ sm[j]
            out = out + gamma[i, j] * (sm[j] @ rho @ sp[i] - 0.5 * (pm @ rho + rho @ pm))
    return out


def dense_superoperator(gamma, f):
    """Full 4^N x 4^N matrix of :func:`dense_rhs` in row-major vectorization."""
    dim = 2 ** gamma.shape[0]
    cols = []
    for k in range(dim * dim):
        e = np.zeros(dim * dim, complex)
        e[k] = 1.0
        cols.append(dense_rhs(e.reshape(dim, dim), gamma, f).ravel())
    return np.array(cols).T


def random_block_state(n, rng):
    """Random positive, unit-trace density matrix supported on the blocks."""
    from superrad.state import BlockDensityMatrix, layout

    lay = layout(n)
    blocks = []
    for d in lay.dims:
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        blocks.append(x @ x.conj().T)
    total = sum(np.trace(b).real for b in blocks)
    return BlockDensityMatrix([b / total for b in blocks])


def random_hermitian_blocks(n, rng):
    from superrad.state import BlockDensityMatrix, layout

    blocks = []
    for d in layout(n).dims:
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        blocks.append(x + x.conj().T)
    return BlockDensityMatrix(blocks)


def random_couplings(n, k0R, seed, regime="exact"):
    cfg = sample_configuration(n, k0R, 6.6e-4, realization_seed(seed, 0))
    return build_couplings(cfg, regime)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
