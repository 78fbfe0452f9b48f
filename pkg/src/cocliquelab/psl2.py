"""PSL(2, q) as canonical projective matrices, with two-element generation tests.

A group element is a 4-tuple (a, b, c, d) of field codes with ad - bc = 1,
normalised under +-I by picking the lexicographically smaller of {M, -M}
(tuple comparison, which is the field element order).  Enumeration is the
row-major lexicographic scan over (a, b, c, d) keeping the first canonical
occurrence, so element indices are deterministic across runs.

Generation of the full group by a pair is decided two ways:

* ``generates`` -- breadth-first closure with a cap set to the largest
  order of a proper subgroup; exceeding the cap certifies generation.
* ``trace_triple_classify`` -- a fast path from the trace triple of SL(2)
  lifts (reducibility, dihedral patterns, small-order closure, subfield
  trace descent).  It must agree with the closure oracle; the test suite
  checks agreement exhaustively for q in {5, 7} and on samples elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldSpec, ff_build

DEFAULT_ENUMERATION_CAP = 100_000

# projective orders possible inside A4, S4, A5
_EXCEPTIONAL_MAX_ORDER = 5
_EXCEPTIONAL_CAP = 60


def _factor_prime_power(q: int):
    for p in range(2, q + 1):
        if q % p == 0:
            n = 0
            m = q
            while m % p == 0:
                m //= p
                n += 1
            if m != 1:
                raise ValueError(f"q = {q} is not a prime power")
            return p, n
    raise ValueError(f"q = {q} is not a prime power")


def mat_mul(m1, m2, F: FieldSpec):
    a, b, c, d = m1
    e, f, g, h = m2
    mul, add = F.mul, F.add
    return (
        add(mul(a, e), mul(b, g)),
        add(mul(a, f), mul(b, h)),
        add(mul(c, e), mul(d, g)),
        add(mul(c, f), mul(d, h)),
    )


def mat_inv(m, F: FieldSpec):
    a, b, c, d = m
    return (d, F.neg(b), F.neg(c), a)


def mat_neg(m, F: FieldSpec):
    a, b, c, d = m
    return (F.neg(a), F.neg(b), F.neg(c), F.neg(d))


def identity_matrix(F: FieldSpec):
    return (F.one, 0, 0, F.one)


def canonicalize(m, F: FieldSpec):
    """Representative of {M, -M} with the lexicographically smaller entry tuple."""
    return min(m, mat_neg(m, F))


def mat_det(m, F: FieldSpec):
    a, b, c, d = m
    return F.sub(F.mul(a, d), F.mul(b, c))


def mat_trace(m, F: FieldSpec):
    return F.add(m[0], m[3])


class GroupIndex:
    """Enumerated PSL(2, q): canonical elements, index map, order table.

    Immutable after construction; all queries are pure.
    """

    def __init__(self, q: int, cap: int = DEFAULT_ENUMERATION_CAP):
        p, n = _factor_prime_power(q)
        if p == 2:
            raise ValueError("even q is not supported")
        expected = q * (q * q - 1) // 2
        if expected > cap:
            raise ValueError(
                f"PSL(2,{q}) has {expected} elements; configured enumeration cap is {cap}"
            )
        self.q = q
        self.p = p
        self.n = n
        self.field = ff_build(p, n)
        self.elements = self._enumerate()
        if len(self.elements) != expected:
            raise RuntimeError(
                f"enumerated {len(self.elements)} elements, expected {expected}"
            )
        self.index_of = {m: i for i, m in enumerate(self.elements)}
        self.identity = identity_matrix(self.field)
        self.identity_index = self.index_of[self.identity]
        F = self.field
        self.traces = [F.add(m[0], m[3]) for m in self.elements]
        self.orders = self._order_table()
        self.involutions = [i for i, o in enumerate(self.orders) if o == 2]
        self.generation_cap = self._generation_cap()
        # (element set, extension index) per maximal proper subfield, largest first
        self.subfield_checks = [
            (F.subfield_elements(m), n // m) for m in F.maximal_subfield_degrees()
        ]

    def __len__(self):
        return len(self.elements)

    def _enumerate(self):
        F = self.field
        q = self.q
        one = F.one
        seen = set()
        for a in range(q):
            if a == 0:
                # det = -bc = 1
                for b in range(1, q):
                    c = F.neg(F.inv(b))
                    for d in range(q):
                        m = (0, b, c, d)
                        seen.add(min(m, mat_neg(m, F)))
            else:
                ai = F.inv(a)
                for b in range(q):
                    for c in range(q):
                        d = F.mul(ai, F.add(one, F.mul(b, c)))
                        m = (a, b, c, d)
                        seen.add(min(m, mat_neg(m, F)))
        return sorted(seen)

    def _order_table(self):
        # Non-identity elements with the same trace up to sign are conjugate
        # over the algebraic closure, hence share a projective order; one
        # powering per trace class suffices.  Cross-checked against direct
        # powering in the tests.
        F = self.field
        orders = [0] * len(self.elements)
        by_trace = {}
        for i, m in enumerate(self.elements):
            if i == self.identity_index:
                orders[i] = 1
                continue
            t = self.traces[i]
            key = min(t, F.neg(t))
            o = by_trace.get(key)
            if o is None:
                o = order_by_powering(m, F)
                by_trace[key] = o
            orders[i] = o
        return orders

    def _generation_cap(self):
        q = self.q
        cap = max(q * (q - 1) // 2, q + 1, _EXCEPTIONAL_CAP)
        for m in self.field.maximal_subfield_degrees():
            q1 = self.p**m
            cap = max(cap, q1 * (q1 * q1 - 1))
        return cap

    @classmethod
    def from_cached(cls, q: int, elements, orders) -> "GroupIndex":
        """Rebuild from persisted element and order tables, with validation."""
        self = cls.__new__(cls)
        p, n = _factor_prime_power(q)
        self.q, self.p, self.n = q, p, n
        self.field = ff_build(p, n)
        expected = q * (q * q - 1) // 2
        if len(elements) != expected or len(orders) != expected:
            raise ValueError("cached table has the wrong length")
        if elements != sorted(elements):
            raise ValueError("cached elements are not in canonical order")
        self.elements = list(elements)
        self.index_of = {m: i for i, m in enumerate(self.elements)}
        self.identity = identity_matrix(self.field)
        self.identity_index = self.index_of[self.identity]
        F = self.field
        self.traces = [F.add(m[0], m[3]) for m in self.elements]
        self.orders = list(orders)
        if self.orders[self.identity_index] != 1:
            raise ValueError("cached order table is inconsistent")
        self.involutions = [i for i, o in enumerate(self.orders) if o == 2]
        self.generation_cap = self._generation_cap()
        self.subfield_checks = [
            (F.subfield_elements(m), n // m) for m in F.maximal_subfield_degrees()
        ]
        return self

    def index(self, m) -> int:
        """Index of a matrix given in any sign; raises KeyError if not in G."""
        return self.index_of[canonicalize(m, self.field)]

    def mul_idx(self, i: int, j: int) -> int:
        prod = mat_mul(self.elements[i], self.elements[j], self.field)
        return self.index_of[canonicalize(prod, self.field)]

    def inv_idx(self, i: int) -> int:
        return self.index_of[canonicalize(mat_inv(self.elements[i], self.field), self.field)]

    def conjugate_idx(self, i: int, by: int) -> int:
        """Index of by * elements[i] * by^-1."""
        F = self.field
        g = self.elements[by]
        m = mat_mul(mat_mul(g, self.elements[i], F), mat_inv(g, F), F)
        return self.index_of[canonicalize(m, F)]


def psl2_enumerate(q: int, cap: int = DEFAULT_ENUMERATION_CAP) -> GroupIndex:
    """Enumerate PSL(2, q) for odd prime power q."""
    return GroupIndex(q, cap=cap)


def order_by_powering(m, F: FieldSpec) -> int:
    """Projective order by repeated multiplication (independent of the table)."""
    ident = identity_matrix(F)
    x = m
    k = 1
    while canonicalize(x, F) != ident:
        x = mat_mul(x, m, F)
        k += 1
    return k


def element_order(g, G: GroupIndex) -> int:
    return G.orders[G.index(g)]


@dataclass(frozen=True)
class SubgroupClosureResult:
    elements_found: frozenset
    capped: bool

    def __len__(self):
        return len(self.elements_found)


def _closure_mats(gen_mats, F: FieldSpec, cap):
    """BFS closure under right multiplication by the generators.

    Returns (set of canonical matrices, capped).  When capped, the set is
    the partial closure at the moment its size exceeded the cap.
    """
    gens = [canonicalize(m, F) for m in gen_mats]
    seen = {identity_matrix(F)}
    frontier = [identity_matrix(F)]
    while frontier:
        new = []
        for m in frontier:
            for g in gens:
                prod = canonicalize(mat_mul(m, g, F), F)
                if prod not in seen:
                    seen.add(prod)
                    new.append(prod)
                    if cap is not None and len(seen) > cap:
                        return seen, True
        frontier = new
    return seen, False


def subgroup_closure(gens, G: GroupIndex, cap: int | None = None) -> SubgroupClosureResult:
    """Close a nonempty set of canonical matrices under the group operation."""
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    mats, capped = _closure_mats(gens, G.field, cap)
    return SubgroupClosureResult(frozenset(G.index_of[m] for m in mats), capped)


def generates(g, h, G: GroupIndex) -> bool:
    """Closure-with-cap oracle for <g, h> = G."""
    F = G.field
    gc, hc = canonicalize(g, F), canonicalize(h, F)
    if gc == G.identity or hc == G.identity:
        raise ValueError("generation test is undefined for the identity")
    mats, capped = _closure_mats([gc, hc], F, G.generation_cap)
    return True if capped else len(mats) == len(G)


REDUCIBLE = "reducible"
DIHEDRAL = "dihedral-contained"
EXCEPTIONAL = "A4/S4/A5-contained"
SUBFIELD = "subfield-contained"
FULL = "full"

# closure outcomes memoised per trace triple
_CAPPED, _PROPER, _WHOLE = 0, 1, 2


def _exceptional_closure_memo(G: GroupIndex, A, B, x, y, z) -> int:
    """Cap-60 closure outcome for an absolutely irreducible pair.

    An absolutely irreducible pair is determined up to GL2(q) conjugacy by
    its trace triple, and flipping lift signs maps (x, y, z) to
    (e1*x, e2*y, e1*e2*z), so the subgroup order is a function of the
    sign-orbit of the triple.  One closure per orbit decides all pairs.
    """
    F = G.field
    memo = getattr(G, "_exceptional_memo", None)
    if memo is None:
        memo = G._exceptional_memo = {}
    nx, ny, nz = F.neg(x), F.neg(y), F.neg(z)
    key = min((x, y, z), (x, ny, nz), (nx, y, nz), (nx, ny, z))
    outcome = memo.get(key)
    if outcome is None:
        mats, capped = _closure_mats([A, B], F, _EXCEPTIONAL_CAP)
        if capped:
            outcome = _CAPPED
        else:
            outcome = _WHOLE if len(mats) == len(G) else _PROPER
        memo[key] = outcome
    return outcome


def trace_triple_classify(g, h, G: GroupIndex) -> str:
    """Classify <g, h> from the trace triple of lifted representatives.

    Tags other than "full" certify a proper subgroup; "full" holds exactly
    when the pair generates.  Only the small-order branch runs a (cheap,
    cap-60) closure; everything else is trace arithmetic.
    """
    F = G.field
    return _classify(G, G.index(g), G.index(h), F)


def _classify(G: GroupIndex, i: int, j: int, F: FieldSpec):
    if i == G.identity_index or j == G.identity_index or i == j:
        return REDUCIBLE  # cyclic, commutator trace 2
    A = G.elements[i]
    B = G.elements[j]
    x = G.traces[i]
    y = G.traces[j]
    P = mat_mul(A, B, F)  # lift product: its trace must stay consistent with x, y
    z = F.add(P[0], P[3])
    xyz = F.mul(F.mul(x, y), z)
    c = F.sub(F.add(F.add(F.mul(x, x), F.mul(y, y)), F.mul(z, z)), xyz)
    if c == F.embed_prime(4):
        return REDUCIBLE
    if (x == 0) + (y == 0) + (z == 0) >= 2:
        return DIHEDRAL
    k = G.index_of[canonicalize(P, F)]
    if (
        G.orders[i] <= _EXCEPTIONAL_MAX_ORDER
        and G.orders[j] <= _EXCEPTIONAL_MAX_ORDER
        and G.orders[k] <= _EXCEPTIONAL_MAX_ORDER
    ):
        outcome = _exceptional_closure_memo(G, A, B, x, y, z)
        if outcome == _PROPER:
            return EXCEPTIONAL
        if outcome == _WHOLE:
            return FULL
    for sub, r in G.subfield_checks:
        if r == 2:
            # invariant-trace descent: x^2, y^2, z^2, xyz in the subfield
            # puts the projective pair inside a PGL2(subfield) copy
            if (
                F.mul(x, x) in sub
                and F.mul(y, y) in sub
                and F.mul(z, z) in sub
                and xyz in sub
            ):
                return SUBFIELD
        else:
            if x in sub and y in sub and z in sub:
                return SUBFIELD
    return FULL


def make_fast_tester(G: GroupIndex):
    """Index-pair generation test with tables bound into the closure.

    The returned callable test(i, j) -> bool answers <g_i, g_j> = G and is
    the engine behind graph builds and maximality scans.
    """
    F = G.field
    q = F.q
    MUL = F._mul
    ADD = F._add
    NEG = F._neg
    elements = G.elements
    traces = G.traces
    orders = G.orders
    index_of = G.index_of
    ident = G.identity_index
    four = F.embed_prime(4)
    n_elements = len(elements)
    subfield_checks = G.subfield_checks
    sq = [MUL[t * q + t] for t in range(q)]

    def test(i: int, j: int) -> bool:
        if i == j or i == ident or j == ident:
            return False
        a, b, c, d = elements[i]
        e, f, g, h = elements[j]
        pa = ADD[MUL[a * q + e] * q + MUL[b * q + g]]
        pb = ADD[MUL[a * q + f] * q + MUL[b * q + h]]
        pc = ADD[MUL[c * q + e] * q + MUL[d * q + g]]
        pd = ADD[MUL[c * q + f] * q + MUL[d * q + h]]
        x = traces[i]
        y = traces[j]
        z = ADD[pa * q + pd]
        xyz = MUL[MUL[x * q + y] * q + z]
        s = ADD[ADD[sq[x] * q + sq[y]] * q + sq[z]]
        if ADD[s * q + NEG[xyz]] == four:
            return False
        if (x == 0) + (y == 0) + (z == 0) >= 2:
            return False
        prod = (pa, pb, pc, pd)
        neg = (NEG[pa], NEG[pb], NEG[pc], NEG[pd])
        k = index_of[min(prod, neg)]
        if orders[i] <= 5 and orders[j] <= 5 and orders[k] <= 5:
            outcome = _exceptional_closure_memo(G, elements[i], elements[j], x, y, z)
            if outcome == _PROPER:
                return False
            if outcome == _WHOLE:
                return True
        for sub, r in subfield_checks:
            if r == 2:
                if sq[x] in sub and sq[y] in sub and sq[z] in sub and xyz in sub:
                    return False
            else:
                if x in sub and y in sub and z in sub:
                    return False
        return True

    return test


def validate_fast_tester(G: GroupIndex, samples: int, seed: int) -> int:
    """Compare the fast tester against the closure oracle on seeded pairs.

    Returns the number of pairs checked; raises on any disagreement.
    """
    import random

    rng = random.Random(seed)
    test = make_fast_tester(G)
    n = len(G)
    checked = 0
    for _ in range(samples):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == G.identity_index or j == G.identity_index or i == j:
            continue
        fast = test(i, j)
        slow = generates(G.elements[i], G.elements[j], G)
        if fast != slow:
            raise RuntimeError(
                f"fast generation test disagrees with closure at q={G.q}, "
                f"pair ({i}, {j}): fast={fast} closure={slow}"
            )
        checked += 1
    return checked


__all__ = [
    "GroupIndex",
    "SubgroupClosureResult",
    "canonicalize",
    "element_order",
    "generates",
    "identity_matrix",
    "make_fast_tester",
    "mat_det",
    "mat_inv",
    "mat_mul",
    "mat_neg",
    "mat_trace",
    "order_by_powering",
    "psl2_enumerate",
    "subgroup_closure",
    "trace_triple_classify",
    "validate_fast_tester",
]
