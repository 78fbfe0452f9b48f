"""Catalogue and explicit construction of maximal subgroups of PSL(2, q).

For prime p the catalogue is the classical congruence table (Dickson); for
q0 = q^2 it is the corresponding Aschbacher-class list.  Instances are
identified with their element index sets, which makes conjugate counting a
matter of set deduplication.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .field import _is_prime
from .psl2 import (
    GroupIndex,
    canonicalize,
    mat_inv,
    mat_mul,
    subgroup_closure,
)

BOREL = "Borel"
DMINUS = "Dminus"
DPLUS = "Dplus"
A4 = "A4"
S4 = "S4"
A5 = "A5"
SUBFIELD_PSL2 = "SubfieldPSL2"
PSL2Q_DOT2 = "PSL2qDot2"

_SEARCH_BUDGET = 20_000


@dataclass(frozen=True)
class MaxKind:
    tag: str
    class_count: int = 1


@dataclass(frozen=True)
class SubgroupInstance:
    kind: MaxKind
    generators: tuple
    element_set: frozenset
    involution_count: int

    @property
    def order(self):
        return len(self.element_set)


def dickson_kinds(p: int) -> list[MaxKind]:
    """Maximal subgroup kinds of PSL(2, p), p an odd prime."""
    if not _is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if p < 3:
        raise ValueError("p must be an odd prime")
    kinds = [MaxKind(BOREL)]
    if p > 11:
        kinds.append(MaxKind(DMINUS))
    if p > 7:
        kinds.append(MaxKind(DPLUS))
    if p % 40 in (3, 13, 27, 37):
        kinds.append(MaxKind(A4))
    if p % 8 in (1, 7):
        kinds.append(MaxKind(S4, class_count=2))
    if p % 10 in (1, 9):
        kinds.append(MaxKind(A5, class_count=2))
    return kinds


def aschbacher_kinds(q0: int) -> list[MaxKind]:
    """Maximal subgroup kinds of PSL(2, q0) for q0 = q^2, q an odd prime."""
    q = round(q0**0.5)
    if q * q != q0 or not _is_prime(q) or q == 2:
        raise ValueError(f"q0 = {q0} is not the square of an odd prime")
    kinds = [
        MaxKind(BOREL),
        MaxKind(PSL2Q_DOT2, class_count=2),
        MaxKind(DMINUS),
        MaxKind(DPLUS),
    ]
    if q % 10 in (3, 7):
        kinds.append(MaxKind(A5, class_count=2))
    return kinds


def kinds_for(G: GroupIndex) -> list[MaxKind]:
    if G.n == 1:
        return dickson_kinds(G.q)
    if G.n == 2 and _is_prime(G.p):
        return aschbacher_kinds(G.q)
    raise ValueError(f"no catalogue for q = {G.q}")


def expected_order(kind: MaxKind, G: GroupIndex) -> int:
    q = G.q
    if kind.tag == BOREL:
        return q * (q - 1) // 2
    if kind.tag == DMINUS:
        return q - 1
    if kind.tag == DPLUS:
        return q + 1
    if kind.tag == A4:
        return 12
    if kind.tag == S4:
        return 24
    if kind.tag == A5:
        return 60
    q1 = G.p ** (G.n // 2)
    if kind.tag == SUBFIELD_PSL2:
        return q1 * (q1 * q1 - 1) // 2
    if kind.tag == PSL2Q_DOT2:
        return q1 * (q1 * q1 - 1)
    raise ValueError(f"unknown kind {kind.tag}")


def count_involutions(S: SubgroupInstance | frozenset, G: GroupIndex) -> int:
    members = S.element_set if isinstance(S, SubgroupInstance) else S
    return sum(1 for i in members if G.orders[i] == 2)


# -- helpers --


def cyclic_subgroup(i: int, G: GroupIndex) -> frozenset:
    out = {G.identity_index}
    k = i
    while k != G.identity_index:
        out.add(k)
        k = G.mul_idx(k, i)
    return frozenset(out)


def normalizer_of_cyclic(i: int, G: GroupIndex) -> frozenset:
    """Indices of elements g with g <x> g^-1 = <x>, x = elements[i]; O(|G|) scan."""
    powers = cyclic_subgroup(i, G)
    F = G.field
    x = G.elements[i]
    out = []
    index_of = G.index_of
    for j, g in enumerate(G.elements):
        m = mat_mul(mat_mul(g, x, F), mat_inv(g, F), F)
        if index_of[canonicalize(m, F)] in powers:
            out.append(j)
    return frozenset(out)


def conjugate_set(members: frozenset, by: int, G: GroupIndex) -> frozenset:
    return frozenset(G.conjugate_idx(i, by) for i in members)


def find_generating_pair(G: GroupIndex, seed: int = 0):
    from .psl2 import make_fast_tester

    test = make_fast_tester(G)
    rng = random.Random(seed)
    n = len(G)
    for _ in range(10_000):
        i, j = rng.randrange(n), rng.randrange(n)
        if test(i, j):
            return i, j
    raise RuntimeError("no generating pair found")  # unreachable for simple G


def all_conjugates(members: frozenset, G: GroupIndex) -> set[frozenset]:
    """Full conjugation orbit of a subgroup's element set."""
    gi, gj = find_generating_pair(G)
    seen = {members}
    frontier = [members]
    while frontier:
        new = []
        for S in frontier:
            for g in (gi, gj):
                T = conjugate_set(S, g, G)
                if T not in seen:
                    seen.add(T)
                    new.append(T)
        frontier = new
    return seen


def _closure_instance(kind: MaxKind, gen_idx, G: GroupIndex, cap=None) -> SubgroupInstance:
    gens = tuple(G.elements[i] for i in gen_idx)
    res = subgroup_closure(gens, G, cap=cap)
    if res.capped:
        raise RuntimeError(f"closure for {kind.tag} exceeded cap")
    members = res.elements_found
    want = expected_order(kind, G)
    if len(members) != want:
        raise RuntimeError(f"{kind.tag} instance has order {len(members)}, expected {want}")
    return SubgroupInstance(kind, gens, members, count_involutions(members, G))


def _indices_of_order(G: GroupIndex, o: int):
    return [i for i, k in enumerate(G.orders) if k == o]


# anchor order -> (partner order, product order) completing a generating triple
_TRIPLES = {
    A4: {2: (3, 3), 3: (2, 3)},
    S4: {2: (3, 4), 3: (2, 4), 4: (3, 2)},
    A5: {2: (3, 5), 3: (2, 5), 5: (2, 3)},
}


def _search_small(kind: MaxKind, G: GroupIndex, anchor_idx) -> SubgroupInstance:
    rng = random.Random(f"{kind.tag}-{G.q}")
    table = _TRIPLES[kind.tag]
    if anchor_idx is None:
        anchor_order = 2
        anchors = _indices_of_order(G, 2)
    else:
        anchor_order = G.orders[anchor_idx]
        if anchor_order not in table:
            raise ValueError(
                f"anchor of order {anchor_order} cannot lie in a {kind.tag} instance"
            )
        anchors = [anchor_idx]
    partner_order, product_order = table[anchor_order]
    partners = _indices_of_order(G, partner_order)
    if not anchors or not partners:
        raise RuntimeError(f"no candidate generators for {kind.tag} in PSL(2,{G.q})")
    for _ in range(_SEARCH_BUDGET):
        i = rng.choice(anchors)
        j = rng.choice(partners)
        if G.orders[G.mul_idx(i, j)] == product_order:
            return _closure_instance(kind, (i, j), G, cap=2 * expected_order(kind, G))
    raise RuntimeError(f"search budget exhausted constructing {kind.tag} in PSL(2,{G.q})")


def _rational_eigenline(i: int, G: GroupIndex):
    """An eigenvector of elements[i] over GF(q), or None."""
    F = G.field
    a, b, c, d = G.elements[i]
    t = F.add(a, d)
    disc = F.sub(F.mul(t, t), F.embed_prime(4))
    r = F.sqrt(disc)
    if r is None:
        return None
    lam = F.mul(F.add(t, r), F.inv(F.embed_prime(2)))
    # kernel of M - lam*I
    aa, dd = F.sub(a, lam), F.sub(d, lam)
    if aa != 0 or b != 0:
        return (b, F.neg(aa))
    if c != 0 or dd != 0:
        return (dd, F.neg(c))
    return (F.one, 0)  # M central on this line; cannot happen for non-identity


def _basis_change_from_line(v, F):
    """det-1 matrix whose first column is v."""
    v0, v1 = v
    if v0 != 0:
        w = (0, F.inv(v0))
    else:
        w = (F.neg(F.inv(v1)), 0)
    return (v0, w[0], v1, w[1])


def _standard_borel(G: GroupIndex) -> frozenset:
    F = G.field
    out = set()
    for a in range(1, G.q):
        ai = F.inv(a)
        for b in range(G.q):
            out.add(G.index_of[canonicalize((a, b, 0, ai), F)])
    return frozenset(out)


def _subfield_copy(G: GroupIndex) -> frozenset:
    sub = G.field.subfield_elements(G.n // 2)
    return frozenset(
        i for i, m in enumerate(G.elements) if all(e in sub for e in m)
    )


def construct_maximal(kind: MaxKind, G: GroupIndex, anchor=None) -> SubgroupInstance:
    """Build one verified instance of a catalogue kind, optionally through anchor.

    The element set is closed by construction and checked against the
    kind's theoretical order.
    """
    if kind.tag not in {k.tag for k in kinds_for(G)}:
        raise ValueError(f"{kind.tag} is not a maximal subgroup kind for q = {G.q}")
    F = G.field
    anchor_idx = G.index(anchor) if anchor is not None else None

    if kind.tag == BOREL:
        std = _standard_borel(G)
        if anchor_idx is None:
            members = std
        else:
            v = _rational_eigenline(anchor_idx, G)
            if v is None:
                raise ValueError("anchor fixes no rational point, so lies in no Borel")
            P = _basis_change_from_line(v, F)
            Pi = mat_inv(P, F)
            members = frozenset(
                G.index_of[canonicalize(mat_mul(mat_mul(P, G.elements[i], F), Pi, F), F)]
                for i in std
            )
            if anchor_idx not in members:
                raise RuntimeError("anchored Borel construction missed its anchor")
        gens = tuple(G.elements[i] for i in sorted(members)[:2])
        return SubgroupInstance(kind, gens, members, count_involutions(members, G))

    if kind.tag in (DMINUS, DPLUS):
        half = (G.q - 1) // 2 if kind.tag == DMINUS else (G.q + 1) // 2
        if anchor_idx is None:
            candidates = _indices_of_order(G, half)
            if not candidates:
                raise RuntimeError(f"no element of order {half} found")
            anchor_idx = candidates[0]
        o = G.orders[anchor_idx]
        if o <= 2 or half % o != 0:
            raise ValueError(
                f"anchor of order {o} does not pin down a unique {kind.tag} torus"
            )
        members = normalizer_of_cyclic(anchor_idx, G)
        want = expected_order(kind, G)
        if len(members) != want:
            raise RuntimeError(
                f"normalizer through anchor has order {len(members)}, expected {want}"
            )
        gens = tuple(G.elements[i] for i in sorted(members)[:3])
        return SubgroupInstance(kind, gens, members, count_involutions(members, G))

    if kind.tag in (A4, S4, A5):
        return _search_small(kind, G, anchor_idx)

    if kind.tag in (SUBFIELD_PSL2, PSL2Q_DOT2):
        members = _subfield_copy(G)
        if kind.tag == PSL2Q_DOT2:
            # a subfield non-square becomes a square in the quadratic extension
            sub_ns = next(
                a for a in sorted(G.field.subfield_elements(G.n // 2))
                if not _subfield_is_square(a, G)
            )
            s = F.sqrt(sub_ns)
            if s is None:
                raise RuntimeError("subfield non-square has no root in the extension")
            w = canonicalize((s, 0, 0, F.inv(s)), F)
            gens = [G.elements[i] for i in sorted(members)[:3]] + [w]
            res = subgroup_closure(gens, G, cap=2 * expected_order(kind, G))
            if res.capped:
                raise RuntimeError("subfield normalizer closure exceeded cap")
            members = res.elements_found
        want = expected_order(kind, G)
        if len(members) != want:
            raise RuntimeError(f"{kind.tag} has order {len(members)}, expected {want}")
        if anchor_idx is not None and anchor_idx not in members:
            inst = SubgroupInstance(
                kind, tuple(G.elements[i] for i in sorted(members)[:2]),
                members, count_involutions(members, G),
            )
            moved = _move_instance_through(inst, anchor_idx, G)
            if moved is None:
                raise ValueError("anchor is not contained in any instance of this kind")
            return moved
        gens = tuple(G.elements[i] for i in sorted(members)[:2])
        return SubgroupInstance(kind, gens, members, count_involutions(members, G))

    raise ValueError(f"unknown kind {kind.tag}")


def _subfield_is_square(a: int, G: GroupIndex) -> bool:
    """Square in the subfield GF(p^(n/2)), not in the big field."""
    sub = G.field.subfield_elements(G.n // 2)
    return any(G.field.mul(b, b) == a for b in sub)


def _move_instance_through(inst: SubgroupInstance, anchor_idx: int, G: GroupIndex):
    """Conjugate an instance so that it contains the anchor, if possible."""
    o = G.orders[anchor_idx]
    F = G.field
    x = G.elements[anchor_idx]
    tx = G.traces[anchor_idx]
    key = min(tx, F.neg(tx))
    for j in inst.element_set:
        # conjugates share order and trace up to sign; filtering keeps the
        # t-scan short (expected |centralizer| hits among |G| elements)
        if G.orders[j] != o:
            continue
        tj = G.traces[j]
        if min(tj, F.neg(tj)) != key:
            continue
        y = G.elements[j]
        for ti, t in enumerate(G.elements):
            m = canonicalize(mat_mul(mat_mul(t, y, F), mat_inv(t, F), F), F)
            if m == x:
                members = frozenset(G.conjugate_idx(k, ti) for k in inst.element_set)
                return SubgroupInstance(
                    inst.kind,
                    tuple(G.elements[i] for i in sorted(members)[:2]),
                    members,
                    inst.involution_count,
                )
    return None


def second_class_twin(inst: SubgroupInstance, G: GroupIndex) -> SubgroupInstance:
    """Image of an instance under the diagonal outer automorphism.

    For two-class kinds this lands in the other conjugacy class.
    """
    F = G.field
    ns = G.field.nonsquare()
    members = set()
    for i in inst.element_set:
        a, b, c, d = G.elements[i]
        m = (a, F.mul(ns, b), F.mul(F.inv(ns), c), d)
        members.add(G.index_of[canonicalize(m, F)])
    members = frozenset(members)
    return SubgroupInstance(
        inst.kind,
        tuple(G.elements[i] for i in sorted(members)[:2]),
        members,
        count_involutions(members, G),
    )


def copies_through(x, kind: MaxKind, G: GroupIndex, cross_check: bool = False):
    """All instances of a kind containing x, as element sets.

    Computed from the orbit of an anchored instance under conjugation by
    the normalizer of <x> (one orbit per conjugacy class of the kind).
    With cross_check=True the full conjugation orbit of the kind is
    enumerated and filtered instead, and the two answers must agree.
    """
    xi = G.index(x) if not isinstance(x, int) else x
    if G.orders[xi] <= 2:
        raise ValueError("anchor must have order greater than 2")
    base = construct_maximal(kind, G, anchor=G.elements[xi])
    reps = [base]
    if kind.class_count == 2:
        twin = second_class_twin(base, G)
        moved = _move_instance_through(twin, xi, G)
        if moved is not None:
            reps.append(moved)
    norm = normalizer_of_cyclic(xi, G)
    found = set()
    for rep in reps:
        for n in norm:
            S = conjugate_set(rep.element_set, n, G)
            assert xi in S
            found.add(S)
    if cross_check:
        exhaustive = set()
        for rep in reps:
            for S in all_conjugates(rep.element_set, G):
                if xi in S:
                    exhaustive.add(S)
        if exhaustive != found:
            raise RuntimeError(
                f"normalizer orbit found {len(found)} copies but exhaustive "
                f"scan found {len(exhaustive)}"
            )
    return sorted(found, key=sorted)


def conjugate_count_through(x, kind: MaxKind, G: GroupIndex, cross_check: bool = False) -> int:
    """Exact number of instances of a kind containing x (|x| > 2)."""
    return len(copies_through(x, kind, G, cross_check=cross_check))


__all__ = [
    "A4",
    "A5",
    "BOREL",
    "DMINUS",
    "DPLUS",
    "MaxKind",
    "PSL2Q_DOT2",
    "S4",
    "SUBFIELD_PSL2",
    "SubgroupInstance",
    "all_conjugates",
    "aschbacher_kinds",
    "conjugate_count_through",
    "conjugate_set",
    "construct_maximal",
    "copies_through",
    "count_involutions",
    "cyclic_subgroup",
    "dickson_kinds",
    "expected_order",
    "find_generating_pair",
    "kinds_for",
    "normalizer_of_cyclic",
    "second_class_twin",
]
