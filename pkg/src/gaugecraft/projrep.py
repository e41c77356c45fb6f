"""Projective representations of finite abelian groups.

Irreducibles are extracted numerically from the regular representation by
eigen-decomposing a seeded random Hermitian element of its commutant; block
identity is established through restriction characters on the degeneracy
subgroup, which label the linear-equivalence classes completely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cohomology import Cocycle, degeneracy_subgroup, _phase_key
from .groups import Element, Subgroup

REP_TOL = 1e-8
INT_TOL = 1e-6


@dataclass
class Representation:
    """Unitary alpha-projective representation as a stacked matrix table."""

    group: object
    cocycle: Cocycle
    matrices: np.ndarray  # shape (|G|, dim, dim)

    def __post_init__(self):
        self.matrices = np.asarray(self.matrices, dtype=complex)
        n = len(self.group.elements)
        if self.matrices.ndim != 3 or self.matrices.shape[0] != n:
            raise ValueError("expected one matrix per group element")
        if self.matrices.shape[1] != self.matrices.shape[2]:
            raise ValueError("representation matrices must be square")

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def matrix(self, g: Element) -> np.ndarray:
        return self.matrices[self.group.index(g)]

    def __call__(self, g: Element) -> np.ndarray:
        return self.matrix(g)

    def validate(self, tol: float = REP_TOL) -> float:
        """Max residual over the defining relations; raises above ``tol``."""
        G = self.group
        d = self.dim
        eye = np.eye(d)
        worst = np.abs(self.matrix(G.identity) - eye).max()
        for g in G.elements:
            m = self.matrix(g)
            worst = max(worst, np.abs(m @ m.conj().T - eye).max())
        for g in G.elements:
            for h in G.elements:
                lhs = self.matrix(g) @ self.matrix(h)
                rhs = self.cocycle(g, h) * self.matrix(G.mul(g, h))
                worst = max(worst, np.abs(lhs - rhs).max())
        if worst > tol:
            raise ValueError(f"representation relations violated (residual {worst:.2e})")
        return worst

    def character(self) -> np.ndarray:
        return np.einsum("gii->g", self.matrices)

    def conj(self) -> "Representation":
        return Representation(self.group, self.cocycle.conj(), self.matrices.conj())

    def tensor(self, other: "Representation") -> "Representation":
        mats = np.stack(
            [np.kron(a, b) for a, b in zip(self.matrices, other.matrices)]
        )
        return Representation(self.group, self.cocycle.mul(other.cocycle), mats)

    def direct_sum(self, other: "Representation") -> "Representation":
        d1, d2 = self.dim, other.dim
        mats = np.zeros((len(self.group.elements), d1 + d2, d1 + d2), dtype=complex)
        mats[:, :d1, :d1] = self.matrices
        mats[:, d1:, d1:] = other.matrices
        return Representation(self.group, self.cocycle, mats)

    def mul_phases(self, phases: np.ndarray) -> "Representation":
        """Multiply by a linear character given as unit phases per element."""
        return Representation(
            self.group, self.cocycle, self.matrices * phases[:, None, None]
        )

    def restrict(self, sub) -> "Representation":
        idx = [self.group.index(g) for g in sub.elements]
        return Representation(sub, self.cocycle.restrict(sub), self.matrices[idx])


def regular_left(group, alpha: Cocycle) -> Representation:
    """L(g) = sum_h alpha(g,h) |gh><h| on the group algebra."""
    n = len(group.elements)
    mats = np.zeros((n, n, n), dtype=complex)
    for a, g in enumerate(group.elements):
        for b, h in enumerate(group.elements):
            mats[a, group.index(group.mul(g, h)), b] = alpha(g, h)
    return Representation(group, alpha, mats)


def regular_right(group, alpha: Cocycle) -> Representation:
    """R(g) = sum_h alpha(h,g) |h><hg| on the group algebra."""
    n = len(group.elements)
    mats = np.zeros((n, n, n), dtype=complex)
    for a, g in enumerate(group.elements):
        for b, h in enumerate(group.elements):
            mats[a, b, group.index(group.mul(h, g))] = alpha(h, g)
    return Representation(group, alpha, mats)


def commutes_check(left: Representation, right: Representation, tol: float = REP_TOL) -> bool:
    if left.dim != right.dim:
        raise ValueError("representations act on different spaces")
    for a in left.matrices:
        for b in right.matrices:
            if np.abs(a @ b - b @ a).max() > tol:
                return False
    return True


def character_inner(chi1: np.ndarray, chi2: np.ndarray) -> complex:
    """< chi1, chi2 > = (1/|G|) sum_g conj(chi1(g)) chi2(g)."""
    chi1 = np.asarray(chi1)
    chi2 = np.asarray(chi2)
    return complex(np.vdot(chi1, chi2) / len(chi1))


def multiplicity(rep: Representation, irrep: Representation, tol: float = INT_TOL) -> int:
    """Number of copies of ``irrep`` inside ``rep`` (character pairing)."""
    val = character_inner(irrep.character(), rep.character())
    m = round(val.real)
    if abs(val - m) > tol:
        raise ValueError(f"non-integer multiplicity {val}")
    return m


def linearly_equivalent(
    rho: Representation, sigma: Representation, tol: float = REP_TOL, seed: int = 0
):
    """Character test plus an intertwiner witness via averaging.

    Returns (equivalent, witness) with sigma(g) = W^{-1} rho(g) W when true.
    """
    if rho.dim != sigma.dim:
        return False, None
    if np.abs(rho.character() - sigma.character()).max() > 100 * tol:
        return False, None
    rng = np.random.default_rng(seed)
    d = rho.dim
    for _ in range(8):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        w = sum(
            r @ x @ s.conj().T for r, s in zip(rho.matrices, sigma.matrices)
        ) / len(rho.matrices)
        if np.linalg.cond(w) < 1e8:
            resid = max(
                np.abs(np.linalg.solve(w, r @ w) - s).max()
                for r, s in zip(rho.matrices, sigma.matrices)
            )
            if resid < 1e-6:
                return True, w
    raise RuntimeError("equal characters but no invertible intertwiner found")


def sylvester_rep(n: int, k: int) -> Representation:
    """sigma(b,u) = X^b Z^u on Z_n x Z_n, with shift X and clock Z.

    The slant product of its cocycle is zeta^(u1 b2 - u2 b1), zeta = e^{2 pi i k/n}.
    """
    from .groups import make_group

    if n < 1 or not (0 <= k < n):
        raise ValueError("need n >= 1 and k in [0, n)")
    G = make_group([n, n])
    zeta = np.exp(2j * np.pi * k / n)
    x = np.zeros((n, n), dtype=complex)
    for j in range(n):
        x[(j + 1) % n, j] = 1.0
    z = np.diag(zeta ** np.arange(n))
    mats = np.stack(
        [np.linalg.matrix_power(x, b) @ np.linalg.matrix_power(z, u) for b, u in G.elements]
    )
    table = np.empty((G.order, G.order), dtype=complex)
    for i, (b1, u1) in enumerate(G.elements):
        for j, (b2, u2) in enumerate(G.elements):
            table[i, j] = zeta ** ((u1 * b2) % n)
    return Representation(G, Cocycle(G, table), mats)


@dataclass
class IrrepFamily:
    """All linearly inequivalent alpha-irreps, labeled on the degeneracy
    subgroup, plus the unitary aligning the regular rep with its isotypic
    block form."""

    group: object
    cocycle: Cocycle
    irreps: list[Representation]
    labels: list[tuple[int, ...]]  # exact phase tuples of rho|_K over K.elements
    degeneracy: Subgroup
    block_change_of_basis: np.ndarray = field(repr=False)

    @property
    def common_dim(self) -> int:
        return self.irreps[0].dim

    def block_form(self) -> np.ndarray:
        """The target oplus_j 1_{d_j} (x) rho_j(g), ordered as extracted."""
        n = len(self.group.elements)
        dim = sum(r.dim * r.dim for r in self.irreps)
        out = np.zeros((n, dim, dim), dtype=complex)
        off = 0
        for rho in self.irreps:
            d = rho.dim
            for g in range(n):
                out[g, off : off + d * d, off : off + d * d] = np.kron(
                    np.eye(d), rho.matrices[g]
                )
            off += d * d
        return out


def irreps(group, alpha: Cocycle, seed: int = 0) -> IrrepFamily:
    """Decompose the left regular alpha-representation into irreducibles.

    A random Hermitian commutant element is eigen-decomposed; each eigenspace
    carries one irrep copy.  Copies are deduplicated by their restriction
    character on the degeneracy subgroup and aligned onto the first copy with
    an averaged intertwiner, so the returned change of basis conjugates the
    regular rep into exact isotypic block form.
    """
    L = regular_left(group, alpha)
    K = degeneracy_subgroup(alpha)
    n = len(group.elements)
    r_expected = K.order
    d_expected = _integer_sqrt(n // r_expected)

    for attempt in range(8):
        rng = np.random.default_rng(seed + attempt)
        m0 = np.zeros((n, n), dtype=complex)
        R = regular_right(group, alpha.conj())
        coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for c, mat in zip(coeffs, R.matrices):
            m0 += c * mat
        herm = m0 + m0.conj().T
        evals, evecs = np.linalg.eigh(herm)
        clusters = _cluster(evals, gap=1e-8)
        if any(len(c) != d_expected for c in clusters):
            continue
        blocks = []
        for idx in clusters:
            basis = _canonical_basis(evecs[:, idx])
            mats = np.einsum("pi,gpq,qj->gij", basis.conj(), L.matrices, basis)
            blocks.append(Representation(group, alpha, mats))
        # invariance check: commutant eigenspaces must close under L
        try:
            for b in blocks:
                b.validate(1e-7)
        except ValueError:
            continue
        return _assemble_family(group, alpha, K, blocks, clusters, evecs)
    raise RuntimeError("degenerate commutant spectrum after 8 seeds")


def _assemble_family(group, alpha, K, blocks, clusters, evecs):
    k_idx = [group.index(k) for k in K.elements]
    L_exp = group.exponent
    labeled = []
    for rho, idx in zip(blocks, clusters):
        scal = rho.matrices[k_idx].trace(axis1=1, axis2=2) / rho.dim
        key = tuple(_phase_key(scal, L_exp, tol=1e-6).tolist())
        labeled.append((key, rho, idx))
    labeled.sort(key=lambda t: t[0])

    reps: list[Representation] = []
    labels: list[tuple[int, ...]] = []
    order: list[np.ndarray] = []
    for key, rho, idx in labeled:
        if labels and key == labels[-1]:
            ref = reps[-1]
            _, w = linearly_equivalent(ref, rho)
            # re-gauge the copy's basis so its restricted matrices equal ref's
            u, _, vh = np.linalg.svd(w)
            basis = _canonical_basis(evecs[:, idx]) @ (u @ vh).conj().T
            order.append(basis)
        else:
            reps.append(rho)
            labels.append(key)
            order.append(_canonical_basis(evecs[:, idx]))
    q = np.hstack(order)
    return IrrepFamily(group, alpha, reps, labels, K, q)


def _canonical_basis(vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of a column span (QR, positive diag)."""
    q, r = np.linalg.qr(vectors)
    signs = np.diag(r).copy()
    signs[np.abs(signs) < 1e-12] = 1.0
    return q * (signs / np.abs(signs)).conj()


def _cluster(values: np.ndarray, gap: float) -> list[list[int]]:
    clusters = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[clusters[-1][-1]] < gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _integer_sqrt(m: int) -> int:
    r = int(round(m**0.5))
    if r * r != m:
        raise RuntimeError(f"|G|/|K| = {m} is not a perfect square")
    return r
