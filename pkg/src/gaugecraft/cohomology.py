"""U(1) 2-cocycles on finite abelian groups and their class invariants.

A cohomology class is identified with its slant product, the antisymmetric
bicharacter c(g,h) = alpha(g,h)/alpha(h,g); for finite abelian groups this is
a complete invariant, so classes are compared exclusively through slant
tables and representative cocycles are never compared directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .groups import (
    AbelianGroup,
    Element,
    GroupHom,
    Quotient,
    Subgroup,
    internal_factorization,
)

UNIT_TOL = 1e-9


def _phase_key(values: np.ndarray, modulus: int, tol: float = UNIT_TOL):
    """Round a table of roots of unity to exact integer phases mod ``modulus``."""
    angles = np.angle(values) * modulus / (2.0 * np.pi)
    keys = np.rint(angles).astype(int) % modulus
    exact = np.exp(2j * np.pi * keys / modulus)
    err = np.abs(values - exact).max()
    if err > tol:
        raise ValueError(f"table entries are not {modulus}-th roots of unity (err={err:.2e})")
    return keys


@dataclass
class Cocycle:
    """Table of unit-modulus values alpha(g,h) over a group-like."""

    group: object
    values: np.ndarray

    def __post_init__(self):
        n = len(self.group.elements)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} table, got {self.values.shape}")
        if np.abs(np.abs(self.values) - 1.0).max() > UNIT_TOL:
            raise ValueError("cocycle values must have unit modulus")
        e = self.group.index(self.group.identity)
        if np.abs(self.values[e, :] - 1.0).max() > UNIT_TOL:
            raise ValueError("cocycle is not normalized: alpha(e, g) != 1")
        if np.abs(self.values[:, e] - 1.0).max() > UNIT_TOL:
            raise ValueError("cocycle is not normalized: alpha(g, e) != 1")

    @classmethod
    def trivial(cls, group) -> "Cocycle":
        n = len(group.elements)
        return cls(group, np.ones((n, n), dtype=complex))

    def __call__(self, g: Element, h: Element) -> complex:
        return self.values[self.group.index(g), self.group.index(h)]

    def is_trivial_table(self, tol: float = UNIT_TOL) -> bool:
        return np.abs(self.values - 1.0).max() <= tol

    def conj(self) -> "Cocycle":
        return Cocycle(self.group, self.values.conj())

    def mul(self, other: "Cocycle") -> "Cocycle":
        if other.group.elements != self.group.elements:
            raise ValueError("cocycles live on different groups")
        return Cocycle(self.group, self.values * other.values)

    def restrict(self, sub) -> "Cocycle":
        idx = [self.group.index(g) for g in sub.elements]
        return Cocycle(sub, self.values[np.ix_(idx, idx)])

    def check_condition(self, rng=None, samples: int = 10_000, tol: float = UNIT_TOL) -> float:
        """Max residual of alpha(g,h) alpha(gh,k) - alpha(g,hk) alpha(h,k).

        Exhaustive for |G| <= 16, sampled otherwise.
        """
        G = self.group
        els = G.elements
        if len(els) <= 16:
            triples = itertools.product(els, repeat=3)
        else:
            rng = rng or np.random.default_rng(0)
            triples = (
                tuple(els[i] for i in rng.integers(0, len(els), size=3))
                for _ in range(samples)
            )
        worst = 0.0
        for g, h, k in triples:
            lhs = self(g, h) * self(G.mul(g, h), k)
            rhs = self(g, G.mul(h, k)) * self(h, k)
            worst = max(worst, abs(lhs - rhs))
        if worst > tol:
            raise ValueError(f"2-cocycle condition violated (residual {worst:.2e})")
        return worst


@dataclass
class Bicharacter:
    """Unit table c(g,h), multiplicative in each argument."""

    group: object
    values: np.ndarray

    def __post_init__(self):
        n = len(self.group.elements)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} table, got {self.values.shape}")

    @classmethod
    def trivial(cls, group) -> "Bicharacter":
        n = len(group.elements)
        return cls(group, np.ones((n, n), dtype=complex))

    def __call__(self, g: Element, h: Element) -> complex:
        return self.values[self.group.index(g), self.group.index(h)]

    def is_bimultiplicative(self, tol: float = UNIT_TOL) -> bool:
        G = self.group
        for a, b in itertools.product(G.elements, repeat=2):
            ab = G.mul(a, b)
            for h in G.elements:
                if abs(self(ab, h) - self(a, h) * self(b, h)) > tol:
                    return False
                if abs(self(h, ab) - self(h, a) * self(h, b)) > tol:
                    return False
        return True

    def is_antisymmetric(self, tol: float = UNIT_TOL) -> bool:
        return np.abs(self.values * self.values.T - 1.0).max() <= tol

    def kernel_elements(self, tol: float = UNIT_TOL) -> tuple[Element, ...]:
        """{g : c(g,h) = 1 for all h}."""
        mask = np.abs(self.values - 1.0).max(axis=1) <= tol
        return tuple(g for g, keep in zip(self.group.elements, mask) if keep)

    def is_nondegenerate(self, tol: float = UNIT_TOL) -> bool:
        return len(self.kernel_elements(tol)) == 1

    def mul(self, other: "Bicharacter") -> "Bicharacter":
        return Bicharacter(self.group, self.values * other.values)

    def conj(self) -> "Bicharacter":
        return Bicharacter(self.group, self.values.conj())

    def key(self) -> tuple:
        """Exact integer phase table, for deterministic comparisons."""
        keys = _phase_key(self.values, self.group.exponent)
        return tuple(map(tuple, keys.tolist()))


@dataclass
class CocycleClass:
    """Cohomology class of a 2-cocycle, stored as its slant bicharacter."""

    group: object
    slant: Bicharacter
    representative: Cocycle | None = field(default=None, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CocycleClass):
            return NotImplemented
        if self.group.elements != other.group.elements:
            return False
        return np.abs(self.slant.values - other.slant.values).max() <= 10 * UNIT_TOL

    def is_trivial(self) -> bool:
        return np.abs(self.slant.values - 1.0).max() <= 10 * UNIT_TOL

    def conj(self) -> "CocycleClass":
        rep = self.representative.conj() if self.representative is not None else None
        return CocycleClass(self.group, self.slant.conj(), rep)

    def key(self) -> tuple:
        return self.slant.key()

    def degeneracy(self) -> Subgroup:
        return Subgroup(self.group, self.slant.kernel_elements())

    def is_mnc(self) -> bool:
        return self.slant.is_nondegenerate()


@dataclass(frozen=True)
class CocycleMatrix:
    """Strictly upper-triangular integer matrix generating a bilinear-phase
    cocycle alpha(g,h) = prod_{i<j} exp(2 pi i M_ij g_i h_j / gcd(n_i, n_j)).

    One such matrix per class: H^2 of a product of cyclics has order
    prod_{i<j} gcd(n_i, n_j).
    """

    group: AbelianGroup
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.group.moduli)
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if len(rows) != k or any(len(r) != k for r in rows):
            raise ValueError(f"expected a {k}x{k} matrix")
        fixed = []
        for i in range(k):
            row = []
            for j in range(k):
                if j <= i:
                    if rows[i][j]:
                        raise ValueError("matrix must be strictly upper triangular")
                    row.append(0)
                else:
                    d = math.gcd(self.group.moduli[i], self.group.moduli[j])
                    row.append(rows[i][j] % d)
            fixed.append(tuple(row))
        object.__setattr__(self, "entries", tuple(fixed))

    @classmethod
    def from_upper_entries(cls, group: AbelianGroup, upper: dict[tuple[int, int], int]):
        k = len(group.moduli)
        rows = [[0] * k for _ in range(k)]
        for (i, j), v in upper.items():
            rows[i][j] = v
        return cls(group, tuple(tuple(r) for r in rows))


def cocycle_from_matrix(mat: CocycleMatrix) -> Cocycle:
    """Evaluate the bilinear-phase representative cocycle of ``mat``."""
    G = mat.group
    moduli = G.moduli
    k = len(moduli)
    n = G.order
    table = np.ones((n, n), dtype=complex)
    for i in range(k):
        for j in range(i + 1, k):
            m = mat.entries[i][j]
            if m == 0:
                continue
            d = math.gcd(moduli[i], moduli[j])
            gi = np.array([g[i] for g in G.elements])
            hj = np.array([h[j] for h in G.elements])
            table *= np.exp(2j * np.pi * m * np.outer(gi, hj) / d)
    return Cocycle(G, table)


def slant_product(alpha: Cocycle) -> Bicharacter:
    """c(g,h) = alpha(g,h) / alpha(h,g); depends only on the class."""
    return Bicharacter(alpha.group, alpha.values / alpha.values.T)


def class_of(alpha: Cocycle) -> CocycleClass:
    return CocycleClass(alpha.group, slant_product(alpha), representative=alpha)


def trivial_class(group) -> CocycleClass:
    return class_of(Cocycle.trivial(group))


def degeneracy_subgroup(alpha: Cocycle) -> Subgroup:
    """K_alpha = {g : alpha(g,h) = alpha(h,g) for all h}, the slant kernel."""
    return Subgroup(alpha.group, slant_product(alpha).kernel_elements())


def is_mnc(alpha: Cocycle) -> bool:
    return degeneracy_subgroup(alpha).order == 1


def multiply(alpha: Cocycle, beta: Cocycle) -> Cocycle:
    return alpha.mul(beta)


def conjugate(alpha: Cocycle) -> Cocycle:
    return alpha.conj()


def restrict(alpha: Cocycle, sub) -> Cocycle:
    return alpha.restrict(sub)


def extend_trivially(alpha: Cocycle, group, gb: Subgroup, gu: Subgroup) -> Cocycle:
    """alpha^G((b1,u1),(b2,u2)) = alpha(u1,u2) for G = G_b + G_u.

    ``alpha`` must live on ``gu``; the factorization is validated.
    """
    if alpha.group.elements != gu.elements:
        raise ValueError("alpha must be a cocycle on the unbroken factor")
    split = internal_factorization(group, gb, gu)
    n = len(group.elements)
    table = np.empty((n, n), dtype=complex)
    for a, g in enumerate(group.elements):
        _, u1 = split[g]
        for b, h in enumerate(group.elements):
            _, u2 = split[h]
            table[a, b] = alpha(u1, u2)
    return Cocycle(group, table)


def combine_factorized(group, gb: Subgroup, gu: Subgroup, tau_b: Cocycle, tau_u: Cocycle) -> Cocycle:
    """tau((b1,u1),(b2,u2)) = tau_b(b1,b2) tau_u(u1,u2) on G = G_b + G_u."""
    if tau_b.group.elements != gb.elements or tau_u.group.elements != gu.elements:
        raise ValueError("factor cocycles must live on the corresponding factors")
    split = internal_factorization(group, gb, gu)
    n = len(group.elements)
    table = np.empty((n, n), dtype=complex)
    for a, g in enumerate(group.elements):
        b1, u1 = split[g]
        for b, h in enumerate(group.elements):
            b2, u2 = split[h]
            table[a, b] = tau_b(b1, b2) * tau_u(u1, u2)
    return Cocycle(group, table)


def pullback(alpha: Cocycle, f: GroupHom) -> Cocycle:
    """(f* alpha)(x, y) = alpha(f(x), f(y))."""
    if not isinstance(f, GroupHom):
        raise ValueError("pullback requires a GroupHom")
    if f.codomain.elements != tuple(alpha.group.elements):
        raise ValueError("hom codomain does not match the cocycle group")
    dom = f.domain
    n = len(dom.elements)
    table = np.empty((n, n), dtype=complex)
    for a, x in enumerate(dom.elements):
        fx = f(x)
        for b, y in enumerate(dom.elements):
            table[a, b] = alpha(fx, f(y))
    return Cocycle(dom, table)


def pullback_bicharacter(c: Bicharacter, domain, func) -> Bicharacter:
    """Slant-level pullback along an arbitrary verified map of group-likes."""
    n = len(domain.elements)
    table = np.empty((n, n), dtype=complex)
    for a, x in enumerate(domain.elements):
        fx = func(x)
        for b, y in enumerate(domain.elements):
            table[a, b] = c(fx, func(y))
    return Bicharacter(domain, table)


@dataclass
class CharacterSubgroup:
    """Characters of a group-like, as exact phase tuples over its elements.

    Values are stored as integers k meaning exp(2 pi i k / L) with L the
    exponent of the base group; multiplication is componentwise addition, so
    the set behaves like any other group-like in this package.
    """

    base: object
    elements: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        self.order = len(self.elements)
        self.identity = (0,) * len(self.base.elements)
        self._index = {c: i for i, c in enumerate(self.elements)}
        self.exponent = self.base.exponent

    def mul(self, a, b):
        L = self.base.exponent
        return tuple((x + y) % L for x, y in zip(a, b))

    def inv(self, a):
        L = self.base.exponent
        return tuple((-x) % L for x in a)

    def index(self, a) -> int:
        return self._index[a]

    def __contains__(self, a) -> bool:
        return a in self._index

    def value(self, chi, g) -> complex:
        L = self.base.exponent
        k = chi[self.base.index(g)]
        return complex(np.exp(2j * np.pi * k / L))


def characters_trivial_on(group, sub_elements) -> CharacterSubgroup:
    """ker Res^{group}_{sub} for an arbitrary group-like, via phase tuples."""
    L = group.exponent
    els = group.elements
    tuples = []
    for phases in _all_characters(group):
        if all(phases[group.index(h)] == 0 for h in sub_elements):
            tuples.append(phases)
    return CharacterSubgroup(group, tuple(sorted(tuples)))


def _all_characters(group):
    """Phase tuples of all characters of a group-like (exact, brute force)."""
    from .groups import cyclic_basis

    L = group.exponent
    basis = cyclic_basis(group)
    if not basis:
        yield (0,) * len(group.elements)
        return
    orders = [d for _, d in basis]
    # coordinates of each element in the chosen basis
    coords = {}
    for combo in itertools.product(*(range(d) for d in orders)):
        g = group.identity
        for (b, _), c in zip(basis, combo):
            for _ in range(c):
                g = group.mul(g, b)
        coords[g] = combo
    for exps in itertools.product(*(range(d) for d in orders)):
        phases = []
        for g in group.elements:
            combo = coords[g]
            k = sum(e * c * (L // d) for e, c, d in zip(exps, combo, orders)) % L
            phases.append(k)
        yield tuple(phases)


@dataclass
class SlantIso:
    """The canonical isomorphism G/K_gamma -> ker Res^G_{K_gamma} induced by
    a slant product, together with its inverse."""

    quotient: Quotient
    codomain: CharacterSubgroup
    _forward: dict
    _backward: dict

    def forward(self, coset_rep: Element):
        return self._forward[self.quotient.project(coset_rep)]

    def backward(self, chi) -> Element:
        return self._backward[chi]

    def verify(self) -> None:
        Q, C = self.quotient, self.codomain
        if Q.order != C.order:
            raise RuntimeError("slant isomorphism is not bijective")
        if len(set(self._forward.values())) != Q.order:
            raise RuntimeError("slant map is not injective on the quotient")
        for a in Q.elements:
            for b in Q.elements:
                lhs = self.forward(Q.mul(a, b))
                rhs = C.mul(self.forward(a), self.forward(b))
                if lhs != rhs:
                    raise RuntimeError("slant map is not a homomorphism")


def induced_iso(gamma: Cocycle) -> SlantIso:
    """Canonical iso [u] -> c^gamma(u, .) with exhaustively verified inverse."""
    G = gamma.group
    c = slant_product(gamma)
    K = c.kernel_elements()
    Q = Quotient(G, K)
    keys = _phase_key(c.values, G.exponent)
    ker_res = characters_trivial_on(G, K)
    forward, backward = {}, {}
    for rep in Q.elements:
        chi = tuple(keys[G.index(rep)].tolist())
        if chi not in ker_res:
            raise RuntimeError("slant image escaped ker Res (inconsistent cocycle)")
        forward[rep] = chi
        backward[chi] = rep
    iso = SlantIso(Q, ker_res, forward, backward)
    iso.verify()
    return iso


def descend_to_quotient(gamma: Cocycle, degeneracy: Subgroup) -> CocycleClass:
    """Class on G/K_gamma with slant c([g],[h]) = c^gamma(g,h).

    Representative independence is re-checked numerically; failure signals an
    invalid input cocycle.
    """
    G = gamma.group
    c = slant_product(gamma)
    if set(degeneracy.elements) != set(c.kernel_elements()):
        raise ValueError("supplied subgroup is not the degeneracy of gamma")
    Q = Quotient(G, degeneracy.elements)
    n = Q.order
    table = np.empty((n, n), dtype=complex)
    for a, g in enumerate(Q.elements):
        for b, h in enumerate(Q.elements):
            vals = [
                c(G.mul(g, k1), G.mul(h, k2))
                for k1 in degeneracy.elements
                for k2 in degeneracy.elements
            ]
            if max(abs(v - vals[0]) for v in vals) > 10 * UNIT_TOL:
                raise RuntimeError("descent to the quotient is ill-defined")
            table[a, b] = vals[0]
    descended = Bicharacter(Q, table)
    if not descended.is_nondegenerate():
        raise RuntimeError("descended class must be nondegenerate")
    return CocycleClass(Q, descended)


def enumerate_h2(group: AbelianGroup) -> list[CocycleClass]:
    """One bilinear representative per class; |H^2| = prod_{i<j} gcd(n_i,n_j)."""
    k = len(group.moduli)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    ranges = [range(math.gcd(group.moduli[i], group.moduli[j])) for i, j in pairs]
    classes = []
    for combo in itertools.product(*ranges):
        mat = CocycleMatrix.from_upper_entries(
            group, {pair: v for pair, v in zip(pairs, combo)}
        )
        classes.append(class_of(cocycle_from_matrix(mat)))
    return classes
