"""Excitation-number block representation of the atomic density matrix.

Product basis convention: a basis state is an N-bit integer whose most
significant bit is atom 1 (bit set = atom excited). Inside each excitation
sector states are ordered by increasing integer value, which is the
lexicographic order of the bit strings. Stored slots (the vectorization used
by the Liouvillian) run over blocks in ascending excitation number, row-major
inside each block.
"""

from __future__ import annotations

import functools
import io
from dataclasses import dataclass
from math import comb

import numpy as np


def atom_bit(n_atoms: int, atom: int) -> int:
    """Bit mask of ``atom`` (0-based) in an ``n_atoms``-bit basis label."""
    return 1 << (n_atoms - 1 - atom)


class BlockLayout:
    """Index bookkeeping for the block structure of ``n_atoms`` atoms.

    Instances are cached per atom number; obtain them via :func:`layout`.
    """

    def __init__(self, n_atoms: int):
        if n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        self.n_atoms = n_atoms
        n = n_atoms
        labels = np.arange(2**n)
        popcount = np.array([bin(int(s)).count("1") for s in labels])
        self.block_states = [labels[popcount == k] for k in range(n + 1)]
        self.dims = np.array([comb(n, k) for k in range(n + 1)], dtype=np.int64)
        sizes = self.dims**2
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.size = int(self.offsets[-1])

        # flat tables consumed by the compiled kernels
        self.states_flat = np.concatenate(self.block_states).astype(np.int64)
        self.block_start = np.concatenate([[0], np.cumsum(self.dims)]).astype(np.int64)
        self.pos_in_block = np.empty(2**n, dtype=np.int64)
        for states in self.block_states:
            self.pos_in_block[states] = np.arange(len(states))

        # lowering[k][j] : matrix of sigma_-^(j) from block k+1 to block k
        self.lowering = []
        for k in range(n):
            mats = np.zeros((n, self.dims[k], self.dims[k + 1]))
            for col, s in enumerate(self.block_states[k + 1]):
                for j in range(n):
                    b = atom_bit(n, j)
                    if s & b:
                        mats[j, self.pos_in_block[s ^ b], col] = 1.0
            self.lowering.append(mats)

        diag, upper_rows, upper_cols = [], [], []
        for k in range(n + 1):
            d = int(self.dims[k])
            base = int(self.offsets[k])
            rr, cc = np.triu_indices(d, 1)
            diag.append(base + np.arange(d) * (d + 1))
            upper_rows.append(base + rr * d + cc)
            upper_cols.append(base + cc * d + rr)
        self.diagonal_slots = np.concatenate(diag).astype(np.int64)
        self.upper_slots = np.concatenate(upper_rows).astype(np.int64)
        self.lower_slots = np.concatenate(upper_cols).astype(np.int64)

    def __repr__(self):
        return f"BlockLayout(n_atoms={self.n_atoms}, size={self.size})"

    def slot(self, block: int, row: int, col: int) -> int:
        d = int(self.dims[block])
        if not (0 <= row < d and 0 <= col < d):
            raise IndexError(f"({row}, {col}) outside block {block} of dimension {d}")
        return int(self.offsets[block]) + row * d + col

    def coords(self, slot: int) -> tuple[int, int, int]:
        if not 0 <= slot < self.size:
            raise IndexError(slot)
        block = int(np.searchsorted(self.offsets, slot, side="right") - 1)
        rel = slot - int(self.offsets[block])
        d = int(self.dims[block])
        return block, rel // d, rel % d

    def truncated_size(self, top: int) -> int:
        """Number of slots in blocks ``0..top``."""
        return int(self.offsets[top + 1])


@functools.lru_cache(maxsize=None)
def layout(n_atoms: int) -> BlockLayout:
    return BlockLayout(n_atoms)


@dataclass(frozen=True)
class BasisIndex:
    n_atoms: int
    excitation_count: int
    within_block: int

    def __post_init__(self):
        if not 0 <= self.excitation_count <= self.n_atoms:
            raise ValueError("excitation_count out of range")
        if not 0 <= self.within_block < comb(self.n_atoms, self.excitation_count):
            raise ValueError("within_block out of range")

    @property
    def label(self) -> int:
        return int(layout(self.n_atoms).block_states[self.excitation_count][self.within_block])

    @property
    def bits(self) -> str:
        return format(self.label, f"0{self.n_atoms}b")

    @classmethod
    def from_label(cls, n_atoms: int, label: int) -> BasisIndex:
        k = bin(label).count("1")
        return cls(n_atoms, k, int(layout(n_atoms).pos_in_block[label]))


class BlockDensityMatrix:
    """Density operator stored as its excitation-number diagonal blocks."""

    __slots__ = ("n_atoms", "blocks")

    def __init__(self, blocks):
        blocks = [np.array(b, dtype=complex) for b in blocks]
        n_atoms = len(blocks) - 1
        if n_atoms < 1:
            raise ValueError("need at least two blocks")
        lay = layout(n_atoms)
        for k, b in enumerate(blocks):
            if b.shape != (lay.dims[k], lay.dims[k]):
                raise ValueError(f"block {k} has shape {b.shape}, expected {(lay.dims[k],) * 2}")
        self.n_atoms = n_atoms
        self.blocks = blocks

    def __repr__(self):
        return f"BlockDensityMatrix(n_atoms={self.n_atoms}, trace={self.trace().real:.12g})"

    @property
    def layout(self) -> BlockLayout:
        return layout(self.n_atoms)

    @classmethod
    def zeros(cls, n_atoms: int) -> BlockDensityMatrix:
        lay = layout(n_atoms)
        return cls([np.zeros((d, d), complex) for d in lay.dims])

    def copy(self) -> BlockDensityMatrix:
        return BlockDensityMatrix([b.copy() for b in self.blocks])

    # -- vector / dense conversions -------------------------------------------------
    def to_vector(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    @classmethod
    def from_vector(cls, vec, n_atoms: int) -> BlockDensityMatrix:
        lay = layout(n_atoms)
        vec = np.asarray(vec, dtype=complex)
        if vec.shape[0] > lay.size:
            raise ValueError(f"vector of length {vec.shape[0]} exceeds {lay.size} slots")
        if vec.shape[0] < lay.size:
            # truncated to the lowest blocks
            vec = np.concatenate([vec, np.zeros(lay.size - vec.shape[0], complex)])
        blocks = [
            vec[lay.offsets[k] : lay.offsets[k + 1]].reshape(lay.dims[k], lay.dims[k]).copy()
            for k in range(n_atoms + 1)
        ]
        return cls(blocks)

    def to_dense(self) -> np.ndarray:
        """Embed into the full ``2^N x 2^N`` product basis (index = basis label)."""
        lay = self.layout
        out = np.zeros((2**self.n_atoms, 2**self.n_atoms), complex)
        for states, b in zip(lay.block_states, self.blocks):
            out[np.ix_(states, states)] = b
        return out

    @classmethod
    def from_dense(cls, rho, atol: float = 0.0) -> BlockDensityMatrix:
        rho = np.asarray(rho, dtype=complex)
        n_atoms = int(round(np.log2(rho.shape[0])))
        if rho.shape != (2**n_atoms, 2**n_atoms):
            raise ValueError("dense matrix must be 2^N x 2^N")
        lay = layout(n_atoms)
        mask = np.zeros(rho.shape, bool)
        blocks = []
        for states in lay.block_states:
            mask[np.ix_(states, states)] = True
            blocks.append(rho[np.ix_(states, states)].copy())
        leak = np.abs(rho[~mask]).max(initial=0.0)
        if leak > atol:
            raise ValueError(f"inter-block coherence of magnitude {leak:.3g} cannot be stored")
        return cls(blocks)

    # -- physical checks ------------------------------------------------------------
    def trace(self) -> complex:
        return sum(np.trace(b) for b in self.blocks)

    def hermiticity_error(self) -> float:
        return max(np.abs(b - b.conj().T).max() for b in self.blocks)

    def min_eigenvalue(self) -> float:
        return min(np.linalg.eigvalsh(0.5 * (b + b.conj().T)).min() for b in self.blocks)

    def excitation_number(self) -> float:
        return float(sum(k * np.trace(b).real for k, b in enumerate(self.blocks)))

    def populations(self) -> np.ndarray:
        """Total population of each excitation sector."""
        return np.array([np.trace(b).real for b in self.blocks])

    def stored_entries(self) -> int:
        return sum(b.size for b in self.blocks)

    def check(self, trace_tol=1e-9, herm_tol=1e-10, pos_tol=1e-9):
        """Raise ``ValueError`` if trace, Hermiticity or positivity is violated."""
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} differs from 1")
        herr = self.hermiticity_error()
        if herr > herm_tol:
            raise ValueError(f"Hermiticity violated by {herr:.3g}")
        lmin = self.min_eigenvalue()
        if lmin < -pos_tol:
            raise ValueError(f"negative eigenvalue {lmin:.3g}")

    def dumps(self) -> str:
        """Text dump: ``n=<k>`` header per block, entries as ``re+imj``."""
        buf = io.StringIO()
        for k, b in enumerate(self.blocks):
            buf.write(f"n={k}\n")
            for row in b:
                buf.write(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
                buf.write("\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> BlockDensityMatrix:
        blocks, rows = [], None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("n="):
                if rows is not None:
                    blocks.append(rows)
                rows = []
            else:
                rows.append([complex(tok) for tok in line.split()])
        if rows is not None:
            blocks.append(rows)
        return cls(blocks)


def ground_state(n_atoms: int) -> BlockDensityMatrix:
    rho = BlockDensityMatrix.zeros(n_atoms)
    rho.blocks[0][0, 0] = 1.0
    return rho


def fully_excited_state(n_atoms: int) -> BlockDensityMatrix:
    """|e...e><e...e|."""
    rho = BlockDensityMatrix.zeros(n_atoms)
    rho.blocks[n_atoms][0, 0] = 1.0
    return rho


def subradiant_state(n_atoms: int = 3) -> BlockDensityMatrix:
    """Projector on (|g e g> - |g g e>)/sqrt(2) for three atoms.

    Atom 1 stays in its ground state; the state is antisymmetric under
    exchange of atoms 2 and 3.
    """
    if n_atoms != 3:
        raise ValueError("the subradiant initial state is defined for 3 atoms only")
    lay = layout(3)
    psi = np.zeros(lay.dims[1])
    psi[lay.pos_in_block[atom_bit(3, 1)]] = 1 / np.sqrt(2)
    psi[lay.pos_in_block[atom_bit(3, 2)]] = -1 / np.sqrt(2)
    rho = BlockDensityMatrix.zeros(3)
    rho.blocks[1] = np.outer(psi, psi).astype(complex)
    return rho


INITIAL_STATES = {
    "fully_excited": fully_excited_state,
    "subradiant": subradiant_state,
}


def initial_state(name: str, n_atoms: int) -> BlockDensityMatrix:
    try:
        factory = INITIAL_STATES[name]
    except KeyError:
        raise ValueError(f"unknown initial state {name!r}; choose from {sorted(INITIAL_STATES)}") from None
    return factory(n_atoms)


def top_block(rho: BlockDensityMatrix) -> int:
    """Highest excitation sector carrying any weight."""
    for k in range(rho.n_atoms, -1, -1):
        if np.any(rho.blocks[k] != 0):
            return k
    return 0


def darkness_residual(rho: BlockDensityMatrix, couplings) -> float:
    """Frobenius norm of the dissipator on ``rho`` (zero iff ``rho`` is dark)."""
    from .liouvillian import darkness_residual as _residual

    return _residual(rho, couplings)
