"""Finite abelian groups presented as explicit products of cyclic factors.

Elements are residue tuples with componentwise modular arithmetic.  Subgroups
and quotients reuse the ambient tuples, so every "group-like" object in this
package exposes the same small surface: ``elements`` (deterministic order),
``order``, ``identity``, ``mul``, ``inv``, ``index`` and ``exponent``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

Element = tuple[int, ...]


class AbelianGroup:
    """Z_{n_1} x ... x Z_{n_k} with lexicographic element enumeration."""

    def __init__(self, moduli):
        moduli = tuple(int(n) for n in moduli)
        if not moduli:
            raise ValueError("at least one cyclic factor is required")
        if any(n < 1 for n in moduli):
            raise ValueError(f"moduli must be >= 1, got {moduli}")
        self.moduli = moduli
        self.order = math.prod(moduli)
        self.elements: tuple[Element, ...] = tuple(
            itertools.product(*(range(n) for n in moduli))
        )
        self.identity: Element = (0,) * len(moduli)
        self.exponent = reduce(math.lcm, moduli)
        self._index = {g: i for i, g in enumerate(self.elements)}

    def mul(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.moduli))

    def inv(self, a: Element) -> Element:
        return tuple((-x) % n for x, n in zip(a, self.moduli))

    def index(self, a: Element) -> int:
        return self._index[a]

    def pow(self, a: Element, k: int) -> Element:
        return tuple((x * k) % n for x, n in zip(a, self.moduli))

    def element_order(self, a: Element) -> int:
        return reduce(math.lcm, (n // math.gcd(n, x) for x, n in zip(a, self.moduli)))

    def __contains__(self, a) -> bool:
        return a in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianGroup) and self.moduli == other.moduli

    def __hash__(self) -> int:
        return hash(self.moduli)

    def __repr__(self) -> str:
        return "x".join(f"Z{n}" for n in self.moduli)


def make_group(moduli) -> AbelianGroup:
    """Build Z_{n_1} x ... x Z_{n_k}; rejects non-positive moduli."""
    return AbelianGroup(moduli)


class Subgroup:
    """Materialized subgroup of a group-like parent.

    ``elements`` are ambient residue tuples, sorted lexicographically, so two
    subgroups are equal iff their element sets agree.
    """

    def __init__(self, parent, elements, generators=()):
        self.parent = parent
        self.generators = tuple(generators)
        self.elements: tuple[Element, ...] = tuple(sorted(set(elements)))
        self.order = len(self.elements)
        self.identity = parent.identity
        if self.identity not in self.elements:
            raise ValueError("subgroup must contain the identity")
        self._index = {g: i for i, g in enumerate(self.elements)}
        for a in self.elements:
            if parent.inv(a) not in self._index:
                raise ValueError(f"subgroup not closed under inverse at {a}")
            for b in self.elements:
                if parent.mul(a, b) not in self._index:
                    raise ValueError(f"subgroup not closed under product at {a},{b}")
        self.exponent = reduce(
            math.lcm, (element_order(parent, g) for g in self.elements)
        )

    def mul(self, a: Element, b: Element) -> Element:
        return self.parent.mul(a, b)

    def inv(self, a: Element) -> Element:
        return self.parent.inv(a)

    def index(self, a: Element) -> int:
        return self._index[a]

    def __contains__(self, a) -> bool:
        return a in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        gens = ",".join(map(str, self.generators)) if self.generators else "..."
        return f"<{gens}> of order {self.order}"


class Quotient:
    """Quotient of a group-like by a subgroup, via canonical coset reps.

    The representative of a coset is its lexicographically smallest member.
    """

    def __init__(self, parent, by):
        self.parent = parent
        by_elements = by.elements if hasattr(by, "elements") else tuple(by)
        self.by = tuple(sorted(set(by_elements)))
        rep_of = {}
        reps = []
        for g in parent.elements:
            if g not in rep_of:
                coset = tuple(sorted(parent.mul(g, h) for h in self.by))
                rep = coset[0]
                for c in coset:
                    rep_of[c] = rep
                reps.append(rep)
        self.rep_of = rep_of
        self.elements: tuple[Element, ...] = tuple(sorted(reps))
        self.order = len(self.elements)
        self.identity = rep_of[parent.identity]
        self._index = {g: i for i, g in enumerate(self.elements)}
        self.exponent = reduce(
            math.lcm, (element_order(self, g) for g in self.elements)
        )

    def project(self, a: Element) -> Element:
        return self.rep_of[a]

    def mul(self, a: Element, b: Element) -> Element:
        return self.rep_of[self.parent.mul(a, b)]

    def inv(self, a: Element) -> Element:
        return self.rep_of[self.parent.inv(a)]

    def index(self, a: Element) -> int:
        return self._index[a]

    def __contains__(self, a) -> bool:
        return a in self._index


def element_order(group, a: Element) -> int:
    """Order of ``a`` in any group-like (by iterated multiplication)."""
    k, x = 1, a
    while x != group.identity:
        x = group.mul(x, a)
        k += 1
    return k


def subgroup_span(parent, gens) -> Subgroup:
    """Smallest subgroup of ``parent`` containing ``gens`` (BFS closure)."""
    gens = [tuple(g) for g in gens]
    for g in gens:
        if g not in parent.elements and not _in_parent(parent, g):
            raise ValueError(f"generator {g} not in parent group")
    seen = {parent.identity}
    frontier = [parent.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = parent.mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return Subgroup(parent, seen, generators=gens)


def _in_parent(parent, g) -> bool:
    try:
        parent.index(g)
        return True
    except KeyError:
        return False


def trivial_subgroup(parent) -> Subgroup:
    return Subgroup(parent, [parent.identity])


def full_subgroup(parent) -> Subgroup:
    return Subgroup(parent, parent.elements)


def all_subgroups(parent) -> list[Subgroup]:
    """All subgroups of a group-like, sorted by (order, element list)."""
    found = {frozenset([parent.identity])}
    frontier = [frozenset([parent.identity])]
    while frontier:
        nxt = []
        for sub in frontier:
            for g in parent.elements:
                if g in sub:
                    continue
                bigger = frozenset(subgroup_span(parent, list(sub) + [g]).elements)
                if bigger not in found:
                    found.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    subs = [Subgroup(parent, s) for s in found]
    subs.sort(key=lambda h: (h.order, h.elements))
    return subs


def quotient_transversal(parent, sub: Subgroup) -> list[Element]:
    """One representative per coset of ``sub``, in enumeration order."""
    covered = set()
    reps = []
    for g in parent.elements:
        if g in covered:
            continue
        reps.append(g)
        covered.update(parent.mul(g, h) for h in sub.elements)
    return reps


def complement(parent, sub: Subgroup) -> Subgroup | None:
    """Brute-force complement K with K + sub = parent, K ^ sub = {e}.

    Searches all subgroups smallest-order-first with lexicographic
    tie-break; returns None when no complement exists (e.g. Z2 < Z4).
    """
    order = getattr(parent, "order", len(parent.elements))
    if order % sub.order:
        return None
    target = order // sub.order
    for cand in all_subgroups(parent):
        if cand.order != target:
            continue
        if sum(1 for g in cand.elements if g in sub) == 1:
            return cand
    return None


def cyclic_basis(group) -> list[tuple[Element, int]]:
    """Decompose a group-like into <b_1> + ... + <b_k> (internal direct sum).

    Returns (generator, order) pairs.  A maximal-order cyclic subgroup of a
    finite abelian group is always complemented, so the greedy recursion
    terminates.
    """
    if len(group.elements) == 1:
        return []
    best = max(group.elements, key=lambda g: (element_order(group, g), [-x for x in g]))
    d = element_order(group, best)
    cyc = subgroup_span(group, [best])
    rest = complement(group, cyc)
    if rest is None:
        raise RuntimeError("maximal cyclic subgroup should always split off")
    return [(best, d)] + cyclic_basis(rest)


def iso_moduli(group) -> tuple[int, ...]:
    """Isomorphism-class key: sorted prime-power cyclic orders."""
    parts = []
    for _, d in cyclic_basis(group):
        for p, e in _factor(d).items():
            parts.append(p**e)
    return tuple(sorted(parts))


def _factor(n: int) -> dict[int, int]:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# Characters and the Pontryagin dual
# ---------------------------------------------------------------------------

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Character:
    """chi_m(g) = prod_i exp(2 pi i m_i g_i / n_i) on an AbelianGroup."""

    group: AbelianGroup
    exponents: Element

    def __post_init__(self):
        object.__setattr__(
            self,
            "exponents",
            tuple(m % n for m, n in zip(self.exponents, self.group.moduli)),
        )

    def phase_index(self, g: Element) -> int:
        """Exact phase as an integer k with chi(g) = exp(2 pi i k / L)."""
        L = self.group.exponent
        return sum(m * x * (L // n) for m, x, n in zip(self.exponents, g, self.group.moduli)) % L

    def __call__(self, g: Element) -> complex:
        L = self.group.exponent
        return complex(
            math.cos(TWO_PI * self.phase_index(g) / L),
            math.sin(TWO_PI * self.phase_index(g) / L),
        )

    def mul(self, other: "Character") -> "Character":
        return Character(
            self.group,
            tuple(a + b for a, b in zip(self.exponents, other.exponents)),
        )

    def conj(self) -> "Character":
        return Character(self.group, self.group.inv(self.exponents))

    def is_trivial_on(self, elements) -> bool:
        return all(self.phase_index(g) == 0 for g in elements)


def dual_group(group: AbelianGroup) -> AbelianGroup:
    """The Pontryagin dual, with the same moduli; exponent tuples label
    characters via :func:`character`."""
    return AbelianGroup(group.moduli)


def character(group: AbelianGroup, exponents) -> Character:
    return Character(group, tuple(exponents))


def kernel_of_restriction(group: AbelianGroup, sub) -> Subgroup:
    """{chi in dual(G) : chi trivial on sub}, as a subgroup of the dual."""
    dual = dual_group(group)
    sub_elements = sub.elements if hasattr(sub, "elements") else tuple(sub)
    kept = [
        m
        for m in dual.elements
        if Character(group, m).is_trivial_on(sub_elements)
    ]
    return Subgroup(dual, kept)


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism between moduli groups, given on standard generators."""

    domain: AbelianGroup
    codomain: AbelianGroup
    images: tuple[Element, ...]

    def __post_init__(self):
        if len(self.images) != len(self.domain.moduli):
            raise ValueError("one image per cyclic factor of the domain")
        for n, im in zip(self.domain.moduli, self.images):
            if self.codomain.pow(im, n) != self.codomain.identity:
                raise ValueError(
                    f"image {im} of a Z{n} generator has incompatible order"
                )

    def __call__(self, g: Element) -> Element:
        out = self.codomain.identity
        for x, im in zip(g, self.images):
            out = self.codomain.mul(out, self.codomain.pow(im, x))
        return out

    def is_bijective(self) -> bool:
        if self.domain.order != self.codomain.order:
            return False
        return len({self(g) for g in self.domain.elements}) == self.domain.order

    def dual(self) -> "GroupHom":
        """The dual map s -> s o f from dual(codomain) to dual(domain)."""
        dual_dom = dual_group(self.codomain)
        dual_cod = dual_group(self.domain)
        images = []
        for i in range(len(self.codomain.moduli)):
            m = tuple(1 if j == i else 0 for j in range(len(self.codomain.moduli)))
            chi = Character(self.codomain, m)
            images.append(
                _character_exponents(
                    self.domain,
                    lambda g, chi=chi: chi.phase_index(self(g)),
                    self.codomain.exponent,
                )
            )
        return GroupHom(dual_dom, dual_cod, tuple(images))


def identity_hom(group: AbelianGroup) -> GroupHom:
    k = len(group.moduli)
    return GroupHom(
        group, group, tuple(tuple(1 if j == i else 0 for j in range(k)) for i in range(k))
    )


def _character_exponents(group: AbelianGroup, phase_of, modulus: int | None = None) -> Element:
    """Exponent tuple of the character g -> exp(2 pi i phase_of(g) / modulus)."""
    L = modulus if modulus is not None else group.exponent
    exps = []
    for i, n in enumerate(group.moduli):
        e_i = tuple(1 if j == i else 0 for j in range(len(group.moduli)))
        k = phase_of(e_i) % L
        # chi(e_i) must be an n-th root of unity: k/L = exps_i/n exactly
        if k * n % L:
            raise ValueError("phase function is not a character")
        exps.append(k * n // L)
    return tuple(exps)


def hom_from_map(domain: AbelianGroup, codomain: AbelianGroup, func) -> GroupHom:
    """Package a verified map of moduli groups as a GroupHom."""
    k = len(domain.moduli)
    images = tuple(
        func(tuple(1 if j == i else 0 for j in range(k))) for i in range(k)
    )
    hom = GroupHom(domain, codomain, images)
    for g in domain.elements:
        if hom(g) != func(g):
            raise ValueError("map is not the homomorphism induced by its generator images")
    return hom


def restriction_map(group: AbelianGroup, sub: Subgroup) -> GroupHom:
    """Res^G_H : dual(G) -> dual(H), with dual(H) presented via a cyclic
    basis of H."""
    basis = cyclic_basis(sub)
    if not basis:
        target = AbelianGroup([1])
        return GroupHom(
            dual_group(group), target, tuple((0,) for _ in group.moduli)
        )
    orders = [d for _, d in basis]
    target = AbelianGroup(orders)
    L = group.exponent
    images = []
    for i in range(len(group.moduli)):
        m = tuple(1 if j == i else 0 for j in range(len(group.moduli)))
        chi = Character(group, m)
        exps = []
        for b, d in basis:
            k = chi.phase_index(b)
            # chi(b) is a d-th root of unity since b has order d
            exps.append(k * d // L)
        images.append(tuple(exps))
    return GroupHom(dual_group(group), target, tuple(images))


def internal_factorization(group, gb: Subgroup, gu: Subgroup) -> dict[Element, tuple[Element, Element]]:
    """Table g -> (b, u) for an internal direct sum G = G_b + G_u.

    Raises if the pair is not a factorization of the group.
    """
    table = {}
    for b in gb.elements:
        for u in gu.elements:
            g = group.mul(b, u)
            if g in table:
                raise ValueError("G_b and G_u overlap: not a direct factorization")
            table[g] = (b, u)
    if len(table) != group.order:
        raise ValueError("G_b * G_u does not cover the group")
    return table
