"""Hot loops, each with a compiled (numba) and a pure-numpy implementation.

The public functions dispatch on :data:`superrad._jit.USE_JIT`. Both paths are
always importable so tests and the benchmark can compare them directly.
"""

import numpy as np

from . import _jit
from ._jit import njit
from .state import layout

# ---------------------------------------------------------------------------
# per-block matrices of  sum_{i!=j} f_ij s+_i s-_j  and  sum_ij g_ij s+_i s-_j
# ---------------------------------------------------------------------------


@njit(cache=True)
def _block_operators_jit(n_atoms, gamma, f, states_flat, block_start, pos_in_block, dmax):
    nb = n_atoms + 1
    H = np.zeros((nb, dmax, dmax))
    G = np.zeros((nb, dmax, dmax))
    for k in range(1, nb):
        lo = block_start[k]
        hi = block_start[k + 1]
        for c in range(hi - lo):
            s = states_flat[lo + c]
            for j in range(n_atoms):
                bj = 1 << (n_atoms - 1 - j)
                if not s & bj:
                    continue
                t = s ^ bj
                for i in range(n_atoms):
                    if i == j:
                        G[k, c, c] += gamma[j, j]
                        continue
                    bi = 1 << (n_atoms - 1 - i)
                    if t & bi:
                        continue
                    r = pos_in_block[t | bi]
                    G[k, r, c] += gamma[i, j]
                    H[k, r, c] += f[i, j]
    return H, G


def _block_operators_numpy(n_atoms, gamma, f):
    lay = layout(n_atoms)
    f_off = f - np.diag(np.diag(f))
    H = [np.zeros((1, 1))]
    G = [np.zeros((1, 1))]
    for k in range(1, n_atoms + 1):
        low = lay.lowering[k - 1]  # block k -> k-1
        # <r| s+_i s-_j |c> = sum_m low[i, m, r] low[j, m, c]
        G.append(np.einsum("ij,imr,jmc->rc", gamma, low, low))
        H.append(np.einsum("ij,imr,jmc->rc", f_off, low, low))
    return H, G


def block_operators(n_atoms, gamma, f, use_jit=None):
    """Return lists ``(H, G)`` of real block matrices, one per excitation sector.

    ``H[k]`` is the dipole-dipole Hamiltonian and ``G[k]`` the decay matrix
    ``sum_ij gamma_ij s+_i s-_j`` restricted to sector ``k``.
    """
    use_jit = _jit.USE_JIT if use_jit is None else use_jit
    gamma = np.ascontiguousarray(gamma, dtype=float)
    f = np.ascontiguousarray(f, dtype=float)
    if not use_jit:
        return _block_operators_numpy(n_atoms, gamma, f)
    lay = layout(n_atoms)
    Hs, Gs = _block_operators_jit(
        n_atoms, gamma, f, lay.states_flat, lay.block_start, lay.pos_in_block, int(lay.dims.max())
    )
    H = [Hs[k, :d, :d].copy() for k, d in enumerate(lay.dims)]
    G = [Gs[k, :d, :d].copy() for k, d in enumerate(lay.dims)]
    return H, G


# ---------------------------------------------------------------------------
# dense generator on the stored slots
# ---------------------------------------------------------------------------


@njit(cache=True)
def _dense_generator_jit(n_atoms, gamma, K, states_flat, block_start, pos_in_block, dims, offsets):
    D = offsets[-1]
    A = np.zeros((D, D), dtype=np.complex128)
    for k in range(n_atoms + 1):
        d = dims[k]
        off = offsets[k]
        for a in range(d):
            for b in range(d):
                row = off + a * d + b
                for c in range(d):
                    A[row, off + c * d + b] += -1j * K[k, a, c]
                    A[row, off + a * d + c] += 1j * np.conj(K[k, b, c])
        if k == n_atoms:
            continue
        # feeding from sector k+1
        lo = block_start[k + 1]
        d1 = dims[k + 1]
        off1 = offsets[k + 1]
        for c in range(d1):
            sc = states_flat[lo + c]
            for dd in range(d1):
                sd = states_flat[lo + dd]
                col = off1 + c * d1 + dd
                for j in range(n_atoms):
                    bj = 1 << (n_atoms - 1 - j)
                    if not sc & bj:
                        continue
                    a = pos_in_block[sc ^ bj]
                    for i in range(n_atoms):
                        bi = 1 << (n_atoms - 1 - i)
                        if not sd & bi:
                            continue
                        b = pos_in_block[sd ^ bi]
                        A[off + a * d + b, col] += gamma[i, j]
    return A


def _dense_generator_numpy(n_atoms, gamma, K):
    lay = layout(n_atoms)
    A = np.zeros((lay.size, lay.size), complex)
    off = lay.offsets
    for k in range(n_atoms + 1):
        eye = np.eye(lay.dims[k])
        # vec(K X - X K^dag) = (K (x) 1 - 1 (x) K^*) vec(X), row-major
        A[off[k] : off[k + 1], off[k] : off[k + 1]] = -1j * np.kron(K[k], eye) + 1j * np.kron(eye, K[k].conj())
        if k < n_atoms:
            low = lay.lowering[k]
            feed = np.einsum("ij,jac,ibd->abcd", gamma, low, low)
            A[off[k] : off[k + 1], off[k + 1] : off[k + 2]] = feed.reshape(lay.dims[k] ** 2, lay.dims[k + 1] ** 2)
    return A


def dense_generator(n_atoms, gamma, K, use_jit=None):
    """Dense ``D x D`` generator from sector matrices ``K = H - i G / 2``."""
    use_jit = _jit.USE_JIT if use_jit is None else use_jit
    gamma = np.ascontiguousarray(gamma, dtype=float)
    if not use_jit:
        return _dense_generator_numpy(n_atoms, gamma, K)
    lay = layout(n_atoms)
    dmax = int(lay.dims.max())
    Kp = np.zeros((n_atoms + 1, dmax, dmax), complex)
    for k, d in enumerate(lay.dims):
        Kp[k, :d, :d] = K[k]
    return _dense_generator_jit(
        n_atoms, gamma, Kp, lay.states_flat, lay.block_start, lay.pos_in_block, lay.dims, lay.offsets
    )


# ---------------------------------------------------------------------------
# intensity and l1 coherence along a trajectory
# ---------------------------------------------------------------------------


@njit(cache=True)
def _trajectory_observables_jit(states, weights, offdiag):
    T, S = states.shape
    intensity = np.empty(T)
    coherence = np.empty(T)
    for t in range(T):
        acc = 0.0
        for s in range(S):
            z = states[t, s]
            w = weights[s]
            acc += z.real * w.real - z.imag * w.imag
        intensity[t] = acc
        c = 0.0
        for m in range(offdiag.shape[0]):
            z = states[t, offdiag[m]]
            c += np.sqrt(z.real * z.real + z.imag * z.imag)
        coherence[t] = c
    return intensity, coherence


def _trajectory_observables_numpy(states, weights, offdiag):
    intensity = (states @ weights).real
    coherence = np.abs(states[:, offdiag]).sum(axis=1)
    return intensity, coherence


def trajectory_observables(states, weights, offdiag, use_jit=None):
    """Intensity ``Re(states @ weights)`` and the l1 sum over ``offdiag`` slots.

    ``states`` is a ``(T, S)`` complex array of vectorized block states.
    """
    use_jit = _jit.USE_JIT if use_jit is None else use_jit
    states = np.ascontiguousarray(states, dtype=complex)
    if states.ndim == 1:
        states = states[None, :]
    weights = np.ascontiguousarray(weights, dtype=complex)
    offdiag = np.ascontiguousarray(offdiag, dtype=np.int64)
    if use_jit:
        return _trajectory_observables_jit(states, weights, offdiag)
    return _trajectory_observables_numpy(states, weights, offdiag)
