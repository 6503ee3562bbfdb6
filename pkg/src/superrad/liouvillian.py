"""Generator of the master equation on the block-structured density matrix.

Inside sector n the dynamics is ``-i (K_n rho_n - rho_n K_n^dag)`` with the
non-Hermitian ``K_n = H_n - (i/2) G_n``; sector n+1 feeds sector n through
``sum_ij gamma_ij s-_j rho s+_i``. No coherence between sectors is created.
"""

from __future__ import annotations

import functools

import numpy as np

from . import kernels
from .couplings import CouplingSet
from .state import BlockDensityMatrix, BlockLayout, layout


class LiouvillianMatrix:
    """Time-independent generator for one coupling configuration.

    The dense matrix ``a_matrix`` acts on vectorized states (slots ordered by
    :class:`~superrad.state.BlockLayout`) and is built on first access; the
    per-sector matrices are what the propagator actually uses.
    """

    def __init__(self, couplings: CouplingSet):
        self.couplings = couplings
        self.n_atoms = couplings.n_atoms
        self.layout: BlockLayout = layout(self.n_atoms)
        self.hamiltonian_blocks, self.decay_blocks = kernels.block_operators(
            self.n_atoms, couplings.gamma, couplings.f
        )
        self.effective_blocks = [h - 0.5j * g for h, g in zip(self.hamiltonian_blocks, self.decay_blocks)]

    def __repr__(self):
        return f"LiouvillianMatrix(n_atoms={self.n_atoms}, regime={self.couplings.regime!r})"

    @functools.cached_property
    def a_matrix(self) -> np.ndarray:
        return kernels.dense_generator(self.n_atoms, self.couplings.gamma, self.effective_blocks)

    @property
    def index_map(self):
        """Mapping ``(block, row, col) -> slot``."""
        lay = self.layout
        return {
            (k, r, c): lay.slot(k, r, c)
            for k in range(self.n_atoms + 1)
            for r in range(lay.dims[k])
            for c in range(lay.dims[k])
        }

    @functools.cached_property
    def intensity_weights(self) -> np.ndarray:
        """Vector ``w`` with ``I = Re(w . vec(rho))``."""
        return np.concatenate([g.T.ravel() for g in self.decay_blocks]).astype(complex)

    def truncated(self, top: int) -> np.ndarray:
        """Dense generator restricted to sectors ``0..top`` (closed under the flow)."""
        m = self.layout.truncated_size(top)
        return self.a_matrix[:m, :m]

    def transfer(self, k: int, left=None, right=None) -> np.ndarray:
        """Matrix of the feeding map sector k+1 -> sector k on row-major vectors.

        ``left`` (d_k x d_k) and ``right`` (d_{k+1} x d_{k+1}) optionally
        change basis: the map becomes ``X -> left . J(right X right^dag) . left^dag``.
        """
        low = self.layout.lowering[k]
        if left is not None or right is not None:
            left = np.eye(low.shape[1]) if left is None else left
            right = np.eye(low.shape[2]) if right is None else right
            low = np.einsum("ab,jbc,cd->jad", left, low, right)
        out = np.einsum("ij,jac,ibd->abcd", self.couplings.gamma, low, low.conj())
        d0, d1 = low.shape[1], low.shape[2]
        return out.reshape(d0 * d0, d1 * d1)


def assemble(couplings: CouplingSet, n_atoms: int | None = None) -> LiouvillianMatrix:
    if n_atoms is not None and n_atoms != couplings.n_atoms:
        raise ValueError(f"couplings describe {couplings.n_atoms} atoms, not {n_atoms}")
    return LiouvillianMatrix(couplings)


def _feed(gamma, low, rho_above):
    # sum_ij gamma_ij s-_j rho s+_i
    return np.einsum("ij,jac,cd,ibd->ab", gamma, low, rho_above, low)


def apply(generator: LiouvillianMatrix, rho: BlockDensityMatrix) -> BlockDensityMatrix:
    """Time derivative ``L(rho)``."""
    if rho.n_atoms != generator.n_atoms:
        raise ValueError(f"state has {rho.n_atoms} atoms, generator {generator.n_atoms}")
    lay = generator.layout
    gamma = generator.couplings.gamma
    out = []
    for k, (K, r) in enumerate(zip(generator.effective_blocks, rho.blocks)):
        d = -1j * (K @ r - r @ K.conj().T)
        if k < rho.n_atoms:
            d = d + _feed(gamma, lay.lowering[k], rho.blocks[k + 1])
        out.append(d)
    return BlockDensityMatrix(out)


def dissipator(rho: BlockDensityMatrix, couplings: CouplingSet) -> BlockDensityMatrix:
    """Dissipative part of the generator alone."""
    if rho.n_atoms != couplings.n_atoms:
        raise ValueError(f"state has {rho.n_atoms} atoms, couplings {couplings.n_atoms}")
    lay = layout(rho.n_atoms)
    _, decay = kernels.block_operators(rho.n_atoms, couplings.gamma, np.zeros_like(couplings.f))
    out = []
    for k, (g, r) in enumerate(zip(decay, rho.blocks)):
        d = -0.5 * (g @ r + r @ g)
        if k < rho.n_atoms:
            d = d + _feed(couplings.gamma, lay.lowering[k], rho.blocks[k + 1])
        out.append(d)
    return BlockDensityMatrix(out)


def darkness_residual(rho: BlockDensityMatrix, couplings: CouplingSet) -> float:
    """Frobenius norm of the dissipator applied to ``rho``; zero for dark states."""
    d = dissipator(rho, couplings)
    return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in d.blocks)))
