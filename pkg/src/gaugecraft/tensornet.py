"""Dense MPS/MPO engine for periodic chains at desk scale.

Index conventions, fixed once for the whole package:

* MPS tensor ``A[l, p, r]``: (left virtual, physical, right virtual).
* MPO tensor ``T[l, o, r, i]``: (left virtual, physical out, right virtual,
  physical in).
* Transfer operator of (A, B): the matrix ``sum_p kron(B^p, conj(A^p))``
  acting on row-major vec(Y), i.e. the superoperator Y -> sum_p B^p Y A^p+.
  Overlaps obey <Psi(A)|Psi(B)>_n = tr T(A,B)^n.
* States are traces of matrix products: |Psi>_n has amplitude
  tr(A^{i_1} ... A^{i_k}) for the cell tensors repeated n times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SVD_RCUT = 1e-10
MAX_DENSE_DIM = 1 << 24


@dataclass
class MpsTensor:
    data: np.ndarray  # (left, phys, right)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 3:
            raise ValueError(f"MPS tensor must be rank 3, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("MPS tensor has non-finite entries")

    @property
    def shape(self):
        return self.data.shape

    def scaled(self, factor: complex) -> "MpsTensor":
        return MpsTensor(self.data * factor)


@dataclass
class MpoTensor:
    data: np.ndarray  # (left, out, right, in)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 4:
            raise ValueError(f"MPO tensor must be rank 4, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("MPO tensor has non-finite entries")

    @property
    def shape(self):
        return self.data.shape


@dataclass
class UnitCellMps:
    tensors: list[MpsTensor]

    def __post_init__(self):
        self.tensors = [
            t if isinstance(t, MpsTensor) else MpsTensor(t) for t in self.tensors
        ]
        for a, b in zip(self.tensors, self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError("adjacent bond dimensions do not match")
        if self.tensors[-1].shape[2] != self.tensors[0].shape[0]:
            raise ValueError("unit cell does not close periodically")

    @property
    def site_dims(self) -> list[int]:
        return [t.shape[1] for t in self.tensors]

    def effective_tensor(self) -> MpsTensor:
        """Merge the cell into a single site with product physical dim."""
        cur = self.tensors[0].data
        for t in self.tensors[1:]:
            cur = np.einsum("apb,bqc->apqc", cur, t.data)
            cur = cur.reshape(cur.shape[0], -1, cur.shape[-1])
        return MpsTensor(cur)


@dataclass
class TransferOp:
    matrix: np.ndarray
    bra_shape: tuple[int, int]
    ket_shape: tuple[int, int]


def transfer_operator(a: MpsTensor, b: MpsTensor | None = None) -> TransferOp:
    """Mixed transfer operator T(a, b); a is the bra (conjugated) tensor."""
    b = a if b is None else b
    if a.shape[1] != b.shape[1]:
        raise ValueError("physical dimensions differ")
    da, db = a.shape[0], b.shape[0]
    if (da * db) ** 2 > 4096**2:
        raise MemoryError("transfer operator too large for dense spectral analysis")
    mat = np.zeros((db * da, db * da), dtype=complex)
    for p in range(a.shape[1]):
        mat += np.kron(b.data[:, p, :], a.data[:, p, :].conj())
    return TransferOp(mat, (da, da), (db, db))


def leading_spectrum(top: TransferOp, k: int = 6) -> np.ndarray:
    """Eigenvalues sorted by decreasing modulus (dense solve)."""
    vals = np.linalg.eigvals(top.matrix)
    order = np.argsort(-np.abs(vals))
    return vals[order][:k]


def spectral_radius(top: TransferOp) -> float:
    return float(np.abs(np.linalg.eigvals(top.matrix)).max())


def overlap(a_cell: UnitCellMps, b_cell: UnitCellMps, n_cells: int) -> complex:
    """<Psi(a)|Psi(b)> for n_cells repetitions, via the transfer operator."""
    ta = a_cell.effective_tensor()
    tb = b_cell.effective_tensor()
    top = transfer_operator(ta, tb)
    return complex(np.trace(np.linalg.matrix_power(top.matrix, n_cells)))


def contract_to_vector(cell: UnitCellMps, n_cells: int) -> np.ndarray:
    """Dense amplitudes of the periodic state, tr(A^{i_1} ... A^{i_k})."""
    total = int(np.prod([d for d in cell.site_dims])) ** n_cells
    if total > MAX_DENSE_DIM:
        raise MemoryError(f"state dimension {total} exceeds the dense limit")
    tensors = cell.tensors * n_cells
    d0 = tensors[0].shape[0]
    cur = np.eye(d0, dtype=complex).reshape(d0, 1, d0)
    for t in tensors:
        cur = np.einsum("apb,bqc->apqc", cur, t.data)
        cur = cur.reshape(d0, -1, t.shape[2])
    return np.einsum("apa->p", cur)


def blocked_tensor(a: MpsTensor, k: int) -> MpsTensor:
    """Merge k copies of ``a`` into one site."""
    return UnitCellMps([a] * k).effective_tensor() if k > 1 else a


def is_injective(a: MpsTensor, rcut: float = SVD_RCUT) -> bool:
    """Do the physical matrices span the full virtual matrix space?"""
    dl, d, dr = a.shape
    realization = a.data.transpose(1, 0, 2).reshape(d, dl * dr)
    svals = np.linalg.svd(realization, compute_uv=False)
    rank = int(np.sum(svals > rcut * max(svals[0], 1e-300)))
    return rank == dl * dr


def normality_index(a: MpsTensor, k_max: int = 8) -> int | None:
    """Smallest k with the k-site blocked tensor injective, or None."""
    for k in range(1, k_max + 1):
        if is_injective(blocked_tensor(a, k)):
            return k
    return None


def gauge_transform(a: MpsTensor, x: np.ndarray) -> MpsTensor:
    """A^i -> X^{-1} A^i X; rejects (numerically) singular X."""
    x = np.asarray(x, dtype=complex)
    if np.linalg.cond(x) > 1e8:
        raise ValueError("gauge matrix is singular or too ill-conditioned")
    xinv = np.linalg.inv(x)
    return MpsTensor(np.einsum("ab,bpc,cd->apd", xinv, a.data, x))


# ---------------------------------------------------------------------------
# Canonical (normal block) decomposition
# ---------------------------------------------------------------------------


@dataclass
class BlockDecomposition:
    blocks: list[MpsTensor]
    change_of_basis: np.ndarray = field(repr=False)
    slices: list[slice]

    def reassembled(self) -> MpsTensor:
        """Direct-sum tensor in the decomposition basis (zero off-blocks)."""
        dim = sum(b.shape[0] for b in self.blocks)
        d = self.blocks[0].shape[1]
        out = np.zeros((dim, d, dim), dtype=complex)
        for b, sl in zip(self.blocks, self.slices):
            out[sl, :, sl] = b.data
        return MpsTensor(out)


def commutant_basis(a: MpsTensor, rcut: float = SVD_RCUT) -> list[np.ndarray]:
    """Basis of {X : X A^i = A^i X for all i} via an SVD null space.

    Two stages keep the SVD small: the centralizer of a few random
    combinations of the A^i (always a superset of the commutant) is computed
    first, then the full constraint set is imposed inside that span.
    """
    dl, d, dr = a.shape
    if dl != dr:
        raise ValueError("commutant needs equal left/right bond dimensions")
    dim = dl
    eye = np.eye(dim)
    mats = [a.data[:, p, :] for p in range(d)]
    scale = max(np.abs(a.data).max(), 1e-300)

    rng = np.random.default_rng(0x5EED)
    combos = []
    for _ in range(min(3, d)):
        c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        combos.append(sum(ci * m for ci, m in zip(c, mats)))
    rows = [np.kron(eye, m.T) - np.kron(m, eye) for m in combos]
    u, s, vh = np.linalg.svd(np.vstack(rows), full_matrices=False)
    smax = max(s[0], 1e-300)
    # right singular vectors are columns of vh^H, i.e. conjugated rows of vh
    keep = s <= max(rcut * smax, 1e-13 * scale)
    basis0 = vh[keep].conj().T  # (dim^2, k0)
    if basis0.shape[1] == 0:
        return []

    rows2 = []
    for m in mats:
        big = np.kron(eye, m.T) - np.kron(m, eye)
        rows2.append(big @ basis0)
    u2, s2, vh2 = np.linalg.svd(np.vstack(rows2), full_matrices=False)
    keep2 = s2 <= max(rcut * max(s2[0], 1e-300), 1e-12 * scale)
    coeff = vh2[keep2].conj().T  # (k0, k)
    sol = basis0 @ coeff
    return [sol[:, j].reshape(dim, dim) for j in range(sol.shape[1])]


def normal_block_decomposition(
    state: UnitCellMps | MpsTensor, seed: int = 0, tol: float = 1e-9
) -> BlockDecomposition:
    """Split a (blocked) cell tensor into its normal blocks.

    The invariant splitting comes from the eigen-decomposition of a seeded
    random element of the commutant algebra; blocks are returned in
    eigenvalue-sorted order and zero blocks are discarded.
    """
    a = state.effective_tensor() if isinstance(state, UnitCellMps) else state
    basis = commutant_basis(a)
    if len(basis) == 1:
        return BlockDecomposition([a], np.eye(a.shape[0], dtype=complex), [slice(0, a.shape[0])])
    dim = a.shape[0]
    for attempt in range(8):
        rng = np.random.default_rng(seed + attempt)
        coeff = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        m = sum(c * b for c, b in zip(coeff, basis))
        evals = np.linalg.eigvals(m)
        order = np.lexsort((evals.imag, evals.real))
        evals = evals[order]
        clusters = _cluster_complex(evals, gap=1e-6 * max(1.0, np.abs(evals).max()))
        cols = []
        slices = []
        off = 0
        degenerate = False
        for idx in clusters:
            space = _eigenspace(m, evals[idx].mean(), len(idx))
            if space is None:
                degenerate = True
                break
            cols.append(space)
            slices.append(slice(off, off + len(idx)))
            off += len(idx)
        if degenerate:
            continue
        q_full = np.hstack(cols)
        if np.linalg.cond(q_full) > 1e10:
            continue
        rotated = np.einsum("ab,bpc,cd->apd", np.linalg.inv(q_full), a.data, q_full)
        resid = _offblock_residual(rotated, slices)
        if resid > tol * max(1.0, np.abs(a.data).max()):
            continue
        blocks = []
        kept_slices = []
        for sl in slices:
            block = rotated[sl, :, sl]
            if np.abs(block).max() > tol:
                blocks.append(MpsTensor(block))
                kept_slices.append(sl)
        # commutant dimension must be consistent with a semisimple split
        if not blocks:
            raise RuntimeError("decomposition produced only zero blocks")
        return BlockDecomposition(blocks, q_full, kept_slices)
    raise RuntimeError(
        "no block-diagonalizing basis found: unit cell is not in the "
        "semisimple (closed) class"
    )


def _eigenspace(m: np.ndarray, lam: complex, k: int) -> np.ndarray | None:
    """Orthonormal basis of the k-dim eigenspace of lam (SVD null space)."""
    u, s, vh = np.linalg.svd(m - lam * np.eye(m.shape[0]))
    scale = max(s[0], 1e-300)
    if s[-k] > 1e-6 * scale:
        return None
    if len(s) > k and s[-k - 1] <= 1e-6 * scale:
        return None
    return vh[-k:].conj().T


def _cluster_complex(values: np.ndarray, gap: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i, v in enumerate(values):
        if clusters and abs(v - values[clusters[-1][-1]]) < gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _offblock_residual(rotated: np.ndarray, slices: list[slice]) -> float:
    mask = np.ones(rotated.shape, dtype=bool)
    for sl in slices:
        mask[sl, :, sl] = False
    return float(np.abs(rotated[mask]).max()) if mask.any() else 0.0


# ---------------------------------------------------------------------------
# MPO application
# ---------------------------------------------------------------------------


def apply_mpo(mpo: list[MpoTensor], mps: UnitCellMps) -> UnitCellMps:
    """Apply one MPO tensor per MPS site; bond dimensions multiply.

    The new virtual index is ordered (MPO, MPS).
    """
    if len(mpo) != len(mps.tensors):
        raise ValueError("need exactly one MPO tensor per MPS site")
    out = []
    for t, a in zip(mpo, mps.tensors):
        t = t if isinstance(t, MpoTensor) else MpoTensor(t)
        if t.shape[3] != a.shape[1]:
            raise ValueError(
                f"MPO input dim {t.shape[3]} does not match site dim {a.shape[1]}"
            )
        new = np.einsum("woru,aub->waorb", t.data, a.data)
        wl, dl, o, wr, dr = new.shape
        out.append(MpsTensor(new.reshape(wl * dl, o, wr * dr)))
    return UnitCellMps(out)


def dummy_site(bond_dim: int) -> MpsTensor:
    """Physical-dimension-1 identity site, for aligning MPO and MPS cells."""
    return MpsTensor(np.eye(bond_dim, dtype=complex).reshape(bond_dim, 1, bond_dim))


def mpo_apply_dense(mpo: list[MpoTensor], vec: np.ndarray) -> np.ndarray:
    """Apply a periodic MPO ring to a dense vector.

    The input legs (sizes given by the MPO in-dims; 1-dimensional legs are
    created rather than consumed) are contracted in ring order.
    """
    in_dims = [t.shape[3] for t in mpo]
    vec = np.asarray(vec, dtype=complex).reshape([d for d in in_dims if d > 1] or [1])
    # cur carries (w_first, w_current, outs..., remaining inputs...)
    w0 = mpo[0].shape[0]
    n_in_left = sum(1 for d in in_dims if d > 1)
    cur = np.tensordot(np.eye(w0, dtype=complex), vec, axes=0)
    # cur shape: (w_first, w_current, in_1, ..., in_k)
    outs = 0
    for t in mpo:
        data = t.data  # (wl, o, wr, i)
        if t.shape[3] == 1:
            cur = np.tensordot(cur, data[:, :, :, 0], axes=([1], [0]))
            # appends (o, wr) at the end; bring w_current back to axis 1
            cur = np.moveaxis(cur, -1, 1)
            cur = np.moveaxis(cur, -1, 2 + outs)
        else:
            cur = np.tensordot(cur, data, axes=([1, 2 + outs], [0, 3]))
            cur = np.moveaxis(cur, -1, 1)
            cur = np.moveaxis(cur, -1, 2 + outs)
            n_in_left -= 1
        outs += 1
    # trace the ring: w_first == w_current
    result = np.trace(cur, axis1=0, axis2=1)
    return result.reshape(-1)


def mpo_dense_operator(mpo: list[MpoTensor]) -> np.ndarray:
    """Materialize the MPO ring as a dense (prod out, prod in) matrix."""
    out_dim = int(np.prod([t.shape[1] for t in mpo]))
    in_dim = int(np.prod([t.shape[3] for t in mpo]))
    if out_dim * in_dim > MAX_DENSE_DIM:
        raise MemoryError("MPO too large to materialize densely")
    cols = []
    for j in range(in_dim):
        e = np.zeros(in_dim, dtype=complex)
        e[j] = 1.0
        cols.append(mpo_apply_dense(mpo, e))
    return np.stack(cols, axis=1)
