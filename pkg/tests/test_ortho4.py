import random

import pytest

from cocliquelab.field import ff_build
from cocliquelab.ortho4 import (
    DEGENERATE,
    MINUS,
    PLUS,
    Subspace,
    build_geometric_coclique,
    build_minus_space,
    canonical_nonisotropic,
    census_2spaces,
    classify_2space,
    count_singular,
    eigenspace_elements,
    eigenspaces,
    kl_isomorphism,
    make_quad_space,
    mat4_identity,
    mat4_mul,
    perp,
    preserves_form,
    rref,
    two_subspaces,
)
from cocliquelab.psl2 import canonicalize, mat_mul

from conftest import group


def random_sl2(K, rng):
    while True:
        a = rng.randrange(K.q)
        b = rng.randrange(K.q)
        if a:
            c = rng.randrange(K.q)
            d = K.mul(K.inv(a), K.add(K.one, K.mul(b, c)))
            return (a, b, c, d)
        if b:
            c = K.neg(K.inv(b))
            d = rng.randrange(K.q)
            return (a, b, c, d)


@pytest.mark.parametrize("q,count", [(3, 20), (5, 104), (7, 300)])
def test_minus_space_singular_count(q, count):
    S = build_minus_space(q)
    assert S.type_certificate == count
    assert count == (q * q + 1) * (q - 1)


def test_plus_type_diagonal_rejected():
    F = ff_build(5, 1)
    one = F.one
    gram = ((one, 0, 0, 0), (0, 4, 0, 0), (0, 0, one, 0), (0, 0, 0, 4))
    assert count_singular(gram, F) == (25 - 1) * (5 + 1)
    with pytest.raises(ValueError, match="minus"):
        make_quad_space(gram, F)


@pytest.mark.parametrize(
    "q,expected",
    [(3, (3, 6, 4)), (5, (10, 15, 6)), (7, (21, 28, 8))],
)
def test_census_diagonal_model(q, expected):
    S = build_minus_space(q)
    v = canonical_nonisotropic(S)
    W = perp(v, S)
    counts = census_2spaces(W, S)
    assert counts == expected
    assert sum(counts) == q * q + q + 1


@pytest.mark.parametrize("q", [3, 5])
def test_census_tensor_model_matches(q):
    iso = kl_isomorphism(q)
    v = canonical_nonisotropic(iso.space)
    W = perp(v, iso.space)
    assert census_2spaces(W, iso.space) == (q * (q - 1) // 2, q * (q + 1) // 2, q + 1)


def test_classify_q5_orthonormal_basis_plus_and_q7_minus():
    for q, want in ((5, PLUS), (7, MINUS)):
        S = build_minus_space(q)
        F = S.field
        one = F.one
        U = Subspace.from_rows([(one, 0, 0, 0), (0, 0, one, 0)], S)
        d = U.gram_restriction
        assert d == ((one, 0), (0, one))
        assert classify_2space(U, S) == want


def test_classify_degenerate():
    S = build_minus_space(5)
    F = S.field
    one = F.one
    # v1 + v2 is singular in diag(1,-1,...)
    U = Subspace.from_rows([(one, one, 0, 0), (0, 0, one, 0)], S)
    assert classify_2space(U, S) == DEGENERATE
    pts = [
        pt
        for pt in __import__("cocliquelab.ortho4", fromlist=["projective_points"]).projective_points(U, F)
        if S.quadratic(pt) == 0
    ]
    assert len(pts) == 1


def test_classify_wrong_dimension():
    S = build_minus_space(5)
    with pytest.raises(ValueError):
        classify_2space(Subspace.from_rows([(S.field.one, 0, 0, 0)], S), S)


def test_iso_gram_is_minus_type():
    for q in (3, 5, 7):
        iso = kl_isomorphism(q)
        assert iso.space.type_certificate == (q * q + 1) * (q - 1)


@pytest.mark.parametrize("q", [3, 5])
def test_iso_multiplicative_form_preserving_det_one(q):
    iso = kl_isomorphism(q)
    K = iso.K
    rng = random.Random(1234)
    from cocliquelab.ortho4 import det_small

    for _ in range(1000):
        m1 = random_sl2(K, rng)
        m2 = random_sl2(K, rng)
        M1, M2 = iso.apply(m1), iso.apply(m2)
        assert iso.apply(mat_mul(m1, m2, K)) == mat4_mul(M1, M2, iso.Fq)
        assert preserves_form(M1, iso.space)
        assert det_small(M1, iso.Fq) == iso.Fq.one


def test_iso_kernel_and_injectivity_q5():
    iso = kl_isomorphism(5)
    K = iso.K
    ident4 = mat4_identity(iso.Fq)
    minus_i = (K.neg(K.one), 0, 0, K.neg(K.one))
    assert iso.apply(minus_i) == ident4
    assert iso.apply((K.one, 0, 0, K.one)) == ident4
    images = iso.images
    assert len(set(images)) == len(iso.group) == 7800


def test_iso_image_closure_is_whole_group():
    iso = kl_isomorphism(5)
    G = iso.group
    from cocliquelab.maxsub import find_generating_pair

    i, j = find_generating_pair(G, seed=42)
    gens = [iso.images[i], iso.images[j]]
    seen = {mat4_identity(iso.Fq)}
    frontier = list(seen)
    while frontier:
        new = []
        for m in frontier:
            for g in gens:
                prod = mat4_mul(m, g, iso.Fq)
                if prod not in seen:
                    seen.add(prod)
                    new.append(prod)
        frontier = new
    assert len(seen) == 7800


def eigenspace_sets_by_type(q):
    iso = kl_isomorphism(q)
    S = iso.space
    v = canonical_nonisotropic(S)
    W = perp(v, S)
    by_type = {PLUS: [], MINUS: [], DEGENERATE: []}
    for U in two_subspaces(W, S):
        by_type[classify_2space(U, S)].append((U, eigenspace_elements(U, iso, v=v)))
    return iso, by_type


def test_degenerate_pointwise_stabilizer_q5():
    iso, by_type = eigenspace_sets_by_type(5)
    G = iso.group
    for U, members in by_type[DEGENERATE]:
        assert len(members) == 4
        assert all(G.orders[i] == 5 for i in members)
        full = set(members) | {G.identity_index}
        for i in full:
            for j in full:
                assert G.mul_idx(i, j) in full  # elementary abelian of order 5


def test_nondegenerate_stabilizers_cyclic_q5():
    iso, by_type = eigenspace_sets_by_type(5)
    G = iso.group
    from cocliquelab.maxsub import cyclic_subgroup

    for tag, order in ((PLUS, 6), (MINUS, 4)):
        for U, members in by_type[tag]:
            assert len(members) == order - 1
            full = set(members) | {G.identity_index}
            assert any(cyclic_subgroup(i, G) == full for i in members)


def test_eigenspace_elements_act_correctly_q5():
    iso, by_type = eigenspace_sets_by_type(5)
    S = iso.space
    F = S.field
    for tag in (PLUS, MINUS):
        U, members = by_type[tag][0]
        for i in members:
            M = iso.images[i]
            eig = eigenspaces(M, S)
            # U is an eigenspace; the complement may be a second 2-dim one
            assert any(sub.dim == 2 and sub.basis == U.basis for _, sub in eig)


def test_eigenspace_elements_requires_subset_of_perp():
    iso = kl_isomorphism(5)
    S = iso.space
    F = S.field
    v = canonical_nonisotropic(S)
    one = F.one
    # a 2-space through v itself is not inside v-perp
    other = tuple(one if k == 3 else 0 for k in range(4))
    U = Subspace.from_rows([v, other], S)
    with pytest.raises(ValueError):
        eigenspace_elements(U, iso, v=v)


def test_geometric_coclique_q5_size_and_disjointness():
    gc = build_geometric_coclique(5, verify_pairwise=True)
    assert gc.coclique.size == 129
    assert gc.size_with_identity == 130 == 5**3 + 5
    assert gc.coclique.verified_pairwise
    sets = [ms for _, _, ms in gc.per_space]
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            assert not (sets[a] & sets[b])


def test_geometric_coclique_rejects_small_q():
    with pytest.raises(ValueError):
        build_geometric_coclique(3)


def test_two_spaces_of_vperp_pairwise_intersect():
    gc = build_geometric_coclique(5, verify_pairwise=False)
    F = gc.space.field
    spaces = [U for U, _, _ in gc.per_space]
    for a in range(len(spaces)):
        for b in range(a + 1, len(spaces)):
            stacked = rref(spaces[a].basis + spaces[b].basis, F)
            # dim(U1 + U2) <= 3 inside the 3-space, so dim(U1 & U2) >= 1
            assert len(stacked) <= 3


def test_eigenspaces_identity_and_no_3dim():
    iso = kl_isomorphism(5)
    S = iso.space
    ident = mat4_identity(iso.Fq)
    eig = eigenspaces(ident, S)
    assert len(eig) == 1 and eig[0][0] == 1 and eig[0][1].dim == 4
    for i, M in enumerate(iso.images):
        if i == iso.group.identity_index:
            continue
        for _, sub in eigenspaces(M, S):
            assert sub.dim != 3  # a 3-dim eigenspace would force the identity


def test_geometric_coclique_q7_size():
    gc = build_geometric_coclique(7, verify_pairwise=False)
    assert gc.size_with_identity == 7**3 + 7 == 350
