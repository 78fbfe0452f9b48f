"""Minus-type orthogonal 4-space over GF(q) and the PSL(2, q^2) action on it.

The isomorphism PSL(2, q^2) -> POmega4^-(q) is realised on the fixed space
of the conjugate-swap involution of V2 (x) V2bar, with GF(q)-basis

    u1 = v1(x)v1,  u2 = v2(x)v2,  w1 = v1(x)v2 + v2(x)v1,
    w2 = lam v1(x)v2 + lambar v2(x)v1,        lam in GF(q^2) \\ GF(q),

on which g acts as g (x) gbar (entrywise Frobenius).  The invariant bilinear
form B(x(x)y, u(x)w) = det(x|u) det(y|w) has Gram matrix

    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -2, -T], [0, 0, -T, -2N]]

with T = lam + lambar, N = lam*lambar; its discriminant (lam - lambar)^2 is
a non-square, so the form has minus type.  Omega membership never needs a
spinor norm here: the group IS the image of the map.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .field import FieldSpec, ff_build
from .gengraph import Coclique
from .psl2 import GroupIndex, make_fast_tester, psl2_enumerate

# -- small linear algebra over a FieldSpec --


def vec_add(u, v, F):
    return tuple(F.add(a, b) for a, b in zip(u, v))


def vec_scale(c, u, F):
    return tuple(F.mul(c, a) for a in u)


def mat_vec(M, v, F):
    return tuple(
        functools.reduce(F.add, (F.mul(M[r][c], v[c]) for c in range(len(v))))
        for r in range(len(M))
    )


def rref(rows, F: FieldSpec):
    """Reduced row echelon form; returns the tuple of nonzero rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return ()
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        pr = next((r for r in range(pivot_row, len(rows)) if rows[r][col] != 0), None)
        if pr is None:
            continue
        rows[pivot_row], rows[pr] = rows[pr], rows[pivot_row]
        inv = F.inv(rows[pivot_row][col])
        rows[pivot_row] = [F.mul(inv, x) for x in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                c = rows[r][col]
                rows[r] = [F.sub(x, F.mul(c, y)) for x, y in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return tuple(tuple(r) for r in rows[:pivot_row] if any(r))


def kernel(rows, F: FieldSpec, ncols: int):
    """Basis (as rref rows) of the right kernel of the given matrix."""
    R = rref(rows, F)
    pivots = []
    for r in R:
        pivots.append(next(c for c in range(ncols) if r[c] != 0))
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = F.one
        for r, pc in zip(R, pivots):
            v[pc] = F.neg(r[fcol])
        basis.append(tuple(v))
    return rref(basis, F)


def det_small(M, F: FieldSpec):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return F.sub(F.mul(M[0][0], M[1][1]), F.mul(M[0][1], M[1][0]))
    total = 0
    sign_pos = True
    for c in range(n):
        minor = [[M[r][cc] for cc in range(n) if cc != c] for r in range(1, n)]
        term = F.mul(M[0][c], det_small(minor, F))
        total = F.add(total, term if sign_pos else F.neg(term))
        sign_pos = not sign_pos
    return total


# -- quadratic spaces and subspaces --


@dataclass(frozen=True)
class QuadSpace:
    field: FieldSpec
    gram: tuple
    type_certificate: int  # number of nonzero singular vectors

    @property
    def q(self):
        return self.field.q

    def bilinear(self, u, v):
        F = self.field
        return functools.reduce(F.add, (F.mul(a, b) for a, b in zip(mat_vec(self.gram, v, F), u)))

    def quadratic(self, v):
        return self.bilinear(v, v)


def count_singular(gram, F: FieldSpec) -> int:
    q = F.q
    count = 0
    scratch = [0, 0, 0, 0]
    for code in range(1, q**4):
        c = code
        for k in range(4):
            scratch[k] = c % q
            c //= q
        v = tuple(scratch)
        s = 0
        for r in range(4):
            if v[r]:
                row = gram[r]
                acc = 0
                for cidx in range(4):
                    if v[cidx]:
                        acc = F.add(acc, F.mul(row[cidx], v[cidx]))
                s = F.add(s, F.mul(v[r], acc))
        if s == 0:
            count += 1
    return count


def make_quad_space(gram, F: FieldSpec) -> QuadSpace:
    """Wrap a symmetric Gram matrix, certifying minus type by singular count."""
    q = F.q
    want = (q * q + 1) * (q - 1)
    got = count_singular(gram, F)
    if got != want:
        raise ValueError(
            f"form is not of minus type: {got} nonzero singular vectors, expected {want}"
        )
    return QuadSpace(F, tuple(tuple(r) for r in gram), got)


def build_minus_space(q: int) -> QuadSpace:
    """diag(1, -1, 1, -delta) with delta the canonical non-square."""
    F = ff_build(*_prime_power(q))
    one = F.one
    delta = F.nonsquare()
    gram = (
        (one, 0, 0, 0),
        (0, F.neg(one), 0, 0),
        (0, 0, one, 0),
        (0, 0, 0, F.neg(delta)),
    )
    try:
        return make_quad_space(gram, F)
    except ValueError:
        # unreachable for odd q; scan as a diagnostic fallback
        for d in range(1, F.q):
            gram = (
                (one, 0, 0, 0),
                (0, F.neg(one), 0, 0),
                (0, 0, one, 0),
                (0, 0, 0, F.neg(d)),
            )
            try:
                return make_quad_space(gram, F)
            except ValueError:
                continue
        raise RuntimeError(f"no minus-type diagonal form found over GF({q})")


def _prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            n = 0
            while q % p == 0:
                q //= p
                n += 1
            if q != 1:
                raise ValueError("q must be a prime power")
            return p, n
    raise ValueError("bad q")


@dataclass(frozen=True)
class Subspace:
    basis: tuple  # rref rows, ambient coordinates
    gram_restriction: tuple

    @property
    def dim(self):
        return len(self.basis)

    @staticmethod
    def from_rows(rows, space: QuadSpace) -> "Subspace":
        F = space.field
        basis = rref(rows, F)
        gr = tuple(
            tuple(space.bilinear(u, v) for v in basis) for u in basis
        )
        return Subspace(basis, gr)


PLUS = "plus"
MINUS = "minus"
DEGENERATE = "degenerate"


def projective_points(U: Subspace, F: FieldSpec):
    """The (q^dim - 1)/(q - 1) projective points of a subspace."""
    if U.dim == 1:
        yield U.basis[0]
        return
    if U.dim == 2:
        u, w = U.basis
        yield u
        for c in range(F.q):
            yield vec_add(w, vec_scale(c, u, F), F)
        return
    raise ValueError("points enumerated only for dim <= 2")


def classify_2space(U: Subspace, S: QuadSpace) -> str:
    """Type of a 2-space, double-certified by its isotropic point count."""
    if U.dim != 2:
        raise ValueError(f"need a 2-space, got dimension {U.dim}")
    F = S.field
    d = det_small(U.gram_restriction, F)
    if d == 0:
        tag = DEGENERATE
    elif F.is_square(F.neg(d)):
        tag = PLUS
    else:
        tag = MINUS
    isotropic = sum(1 for pt in projective_points(U, F) if S.quadratic(pt) == 0)
    expected = {DEGENERATE: 1, PLUS: 2, MINUS: 0}[tag]
    if isotropic != expected:
        raise RuntimeError(
            f"type certification clash: square-class rule says {tag} but the "
            f"space has {isotropic} isotropic points"
        )
    return tag


def two_subspaces(W: Subspace, S: QuadSpace):
    """All q^2+q+1 2-subspaces of a 3-space, via echelon patterns."""
    if W.dim != 3:
        raise ValueError("need a 3-space")
    F = S.field
    b0, b1, b2 = W.basis

    def comb(*coeffs):
        out = (0,) * len(b0)
        for c, b in zip(coeffs, (b0, b1, b2)):
            if c:
                out = vec_add(out, vec_scale(c, b, F), F)
        return out

    one = F.one
    for a in range(F.q):
        for b in range(F.q):
            yield Subspace.from_rows([comb(one, 0, a), comb(0, one, b)], S)
    for a in range(F.q):
        yield Subspace.from_rows([comb(one, a, 0), comb(0, 0, one)], S)
    yield Subspace.from_rows([comb(0, one, 0), comb(0, 0, one)], S)


def census_2spaces(W: Subspace, S: QuadSpace):
    """(minus, plus, degenerate) counts over the 2-subspaces of W."""
    F = S.field
    if W.dim != 3 or det_small(W.gram_restriction, F) == 0:
        raise ValueError("census needs a non-degenerate 3-space")
    counts = {MINUS: 0, PLUS: 0, DEGENERATE: 0}
    total = 0
    for U in two_subspaces(W, S):
        counts[classify_2space(U, S)] += 1
        total += 1
    q = F.q
    if total != q * q + q + 1:
        raise RuntimeError(f"enumerated {total} 2-spaces, expected {q*q+q+1}")
    return counts[MINUS], counts[PLUS], counts[DEGENERATE]


# -- the isomorphism --


class IsoData:
    """PSL(2, q^2) acting on the fixed-space model of minus-type 4-space.

    apply() maps a canonical group matrix to its 4x4 image over GF(q);
    the enumerated group and the image table are built lazily.
    """

    def __init__(self, q: int):
        p, n = _prime_power(q)
        if n != 1 or p == 2:
            raise ValueError("the isomorphism model is built for odd prime q")
        self.q = q
        self.Fq = ff_build(q, 1)
        self.K = ff_build(q, 2)
        K = self.K
        self.lam = K.encode([0, 1])
        self.lbar = K.frobenius(self.lam)
        if self.lam == self.lbar:
            raise RuntimeError("lambda landed in the subfield")  # impossible
        self._lam_diff_inv = K.inv(K.sub(self.lam, self.lbar))
        T = K.to_prime(K.add(self.lam, self.lbar))
        N = K.to_prime(K.mul(self.lam, self.lbar))
        Fq = self.Fq
        two = Fq.embed_prime(2)
        gram = (
            (0, Fq.one, 0, 0),
            (Fq.one, 0, 0, 0),
            (0, 0, Fq.neg(two), Fq.neg(T)),
            (0, 0, Fq.neg(T), Fq.neg(Fq.mul(two, N))),
        )
        self.space = make_quad_space(gram, Fq)
        self._group = None
        self._images = None
        self._image_array = None

    def apply(self, m):
        """4x4 image over GF(q) of a matrix over GF(q^2); sign-independent."""
        K, Fq = self.K, self.Fq
        a, b, c, d = m
        ab, bb, cb, db = (K.frobenius(x) for x in m)

        def outer(u0, u1, w0, w1):
            return (K.mul(u0, w0), K.mul(u0, w1), K.mul(u1, w0), K.mul(u1, w1))

        r11 = outer(a, c, ab, cb)  # image of E11 = u1
        r22 = outer(b, d, bb, db)  # image of E22 = u2
        r12 = outer(a, c, bb, db)  # image of E12
        r21 = outer(b, d, ab, cb)  # image of E21

        def col(R):
            # R = (R11, R12, R21, R22) coordinates in the tensor basis
            alpha, beta = R[0], R[3]
            dcoef = K.mul(K.sub(R[1], R[2]), self._lam_diff_inv)
            gcoef = K.sub(R[1], K.mul(dcoef, self.lam))
            return tuple(K.to_prime(x) for x in (alpha, beta, gcoef, dcoef))

        c1 = col(r11)
        c2 = col(r22)
        c3 = col(tuple(K.add(x, y) for x, y in zip(r12, r21)))
        c4 = col(
            tuple(
                K.add(K.mul(self.lam, x), K.mul(self.lbar, y))
                for x, y in zip(r12, r21)
            )
        )
        cols = (c1, c2, c3, c4)
        return tuple(tuple(cols[cc][r] for cc in range(4)) for r in range(4))

    @property
    def group(self) -> GroupIndex:
        if self._group is None:
            self._group = psl2_enumerate(self.q * self.q)
        return self._group

    @property
    def images(self):
        if self._images is None:
            self._images = [self.apply(m) for m in self.group.elements]
        return self._images

    @property
    def image_array(self):
        if self._image_array is None:
            self._image_array = np.array(self.images, dtype=np.int64)
        return self._image_array


@functools.lru_cache(maxsize=None)
def kl_isomorphism(q: int) -> IsoData:
    return IsoData(q)


def mat4_mul(A, B, F: FieldSpec):
    return tuple(
        tuple(
            functools.reduce(F.add, (F.mul(A[r][k], B[k][c]) for k in range(4)))
            for c in range(4)
        )
        for r in range(4)
    )


def mat4_identity(F: FieldSpec):
    return tuple(tuple(F.one if r == c else 0 for c in range(4)) for r in range(4))


def preserves_form(M, S: QuadSpace) -> bool:
    F = S.field
    Mt = tuple(tuple(M[r][c] for r in range(4)) for c in range(4))
    return mat4_mul(Mt, mat4_mul(S.gram, M, F), F) == S.gram


def eigenspaces(M, S: QuadSpace):
    """[(eigenvalue sign, kernel of M -+ I)] for the only possible eigenvalues."""
    F = S.field
    out = []
    for sign, lam in ((1, F.one), (-1, F.neg(F.one))):
        rows = [
            tuple(F.sub(M[r][c], lam if r == c else 0) for c in range(4))
            for r in range(4)
        ]
        basis = kernel(rows, F, 4)
        if basis:
            out.append((sign, Subspace.from_rows(basis, S)))
    return out


def canonical_nonisotropic(S: QuadSpace):
    """First standard basis vector with Q != 0 (e1 in the diagonal model)."""
    F = S.field
    for i in range(4):
        e = tuple(F.one if k == i else 0 for k in range(4))
        if S.quadratic(e) != 0:
            return e
    raise RuntimeError("no non-isotropic standard basis vector")  # impossible


def perp(v, S: QuadSpace) -> Subspace:
    F = S.field
    row = tuple(mat_vec(S.gram, v, F))
    return Subspace.from_rows(kernel([row], F, 4), S)


def eigenspace_elements(U: Subspace, iso: IsoData, v=None) -> frozenset:
    """Non-identity group indices whose image has U inside an eigenspace.

    Counts are pinned to the 2-space type: degenerate U gives the pointwise
    stabiliser of order q (elementary abelian); a plus-type U gives a cyclic
    group of order q+1 and a minus-type U one of order q-1 (the rotations
    act on the complement U-perp, whose type is opposite to U's).
    """
    S = iso.space
    F = S.field
    if U.dim != 2:
        raise ValueError("eigenspace elements are defined for 2-spaces")
    if v is not None:
        for u in U.basis:
            if S.bilinear(u, v) != 0:
                raise ValueError("2-space is not inside the perp of v")
    arr = iso.image_array
    p = F.p
    members = None
    for u in U.basis:
        uvec = np.array(u, dtype=np.int64)
        prod = arr @ uvec % p
        plus_fix = (prod == uvec).all(axis=1)
        minus_fix = (prod == (-uvec) % p).all(axis=1)
        stacked = np.stack([plus_fix, minus_fix])
        members = stacked if members is None else (members & stacked)
    hit = members.any(axis=0)
    hit[iso.group.identity_index] = False
    found = frozenset(int(i) for i in np.nonzero(hit)[0])
    tag = classify_2space(U, S)
    expected = {DEGENERATE: F.q - 1, PLUS: F.q, MINUS: F.q - 2}[tag]
    if len(found) != expected:
        raise RuntimeError(
            f"{tag} 2-space stabiliser has {len(found)} non-identity elements, "
            f"expected {expected}"
        )
    return found


@dataclass
class GeometricCoclique:
    coclique: Coclique
    space: QuadSpace
    v: tuple
    vperp: Subspace
    per_space: list  # (Subspace, type tag, frozenset of indices)

    @property
    def size_with_identity(self):
        return self.coclique.size_with_identity


def build_geometric_coclique(q: int, v=None, verify_pairwise: bool = True) -> GeometricCoclique:
    """Union of eigenspace element sets over the 2-spaces of v-perp.

    The member count is exactly q^3 + q - 1 non-identity elements (q^3 + q
    counting the identity); pairwise non-generation is verified against the
    group unless verify_pairwise is False.
    """
    if q <= 3:
        raise ValueError("the construction needs q > 3")
    iso = kl_isomorphism(q)
    S = iso.space
    if v is None:
        v = canonical_nonisotropic(S)
    elif S.quadratic(tuple(v)) == 0:
        raise ValueError("v must be non-isotropic")
    W = perp(v, S)
    per_space = []
    union = set()
    for U in two_subspaces(W, S):
        tag = classify_2space(U, S)
        members = eigenspace_elements(U, iso, v=v)
        if union & members:
            raise RuntimeError("eigenspace element sets overlap")
        union |= members
        per_space.append((U, tag, members))
    want = q**3 + q - 1
    if len(union) != want:
        raise RuntimeError(f"collected {len(union)} elements, expected {want}")
    members = tuple(sorted(union))
    verified = False
    if verify_pairwise:
        G = iso.group
        test = make_fast_tester(G)
        for a in range(len(members)):
            ia = members[a]
            for b in range(a + 1, len(members)):
                if test(ia, members[b]):
                    raise RuntimeError(
                        f"members {ia} and {members[b]} generate the group"
                    )
        verified = True
    c = Coclique(members=members, group_q=q * q, verified_pairwise=verified)
    return GeometricCoclique(c, S, tuple(v), W, per_space)


# -- JSON dumps --


def subspace_to_dict(U: Subspace, S: QuadSpace, tag=None) -> dict:
    d = {
        "basis": [list(r) for r in U.basis],
        "gram_restriction": [list(r) for r in U.gram_restriction],
        "dim": U.dim,
    }
    if tag is None and U.dim == 2:
        tag = classify_2space(U, S)
    if tag is not None:
        d["type"] = tag
    return d


def geometric_report(gc: GeometricCoclique, iso: IsoData) -> dict:
    from .gengraph import coclique_report

    rep = coclique_report(gc.coclique, iso.group)
    rep["v"] = list(gc.v)
    rep["gram"] = [list(r) for r in gc.space.gram]
    rep["two_spaces"] = [
        {**subspace_to_dict(U, gc.space, tag), "members": sorted(ms)}
        for U, tag, ms in gc.per_space
    ]
    return rep


__all__ = [
    "DEGENERATE",
    "GeometricCoclique",
    "IsoData",
    "MINUS",
    "PLUS",
    "QuadSpace",
    "Subspace",
    "build_geometric_coclique",
    "build_minus_space",
    "canonical_nonisotropic",
    "census_2spaces",
    "classify_2space",
    "count_singular",
    "eigenspace_elements",
    "eigenspaces",
    "geometric_report",
    "kernel",
    "kl_isomorphism",
    "make_quad_space",
    "mat4_identity",
    "mat4_mul",
    "perp",
    "preserves_form",
    "projective_points",
    "rref",
    "subspace_to_dict",
    "two_subspaces",
]
