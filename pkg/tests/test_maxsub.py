import pytest

from cocliquelab.maxsub import (
    A4,
    A5,
    BOREL,
    DMINUS,
    DPLUS,
    PSL2Q_DOT2,
    S4,
    MaxKind,
    all_conjugates,
    aschbacher_kinds,
    conjugate_count_through,
    construct_maximal,
    copies_through,
    count_involutions,
    dickson_kinds,
    expected_order,
    kinds_for,
    normalizer_of_cyclic,
    second_class_twin,
)
from cocliquelab.psl2 import subgroup_closure

from conftest import group


def tags(kinds):
    return {(k.tag, k.class_count) for k in kinds}


def test_dickson_examples():
    assert tags(dickson_kinds(13)) == {(BOREL, 1), (DMINUS, 1), (DPLUS, 1), (A4, 1)}
    assert tags(dickson_kinds(7)) == {(BOREL, 1), (S4, 2)}
    assert tags(dickson_kinds(11)) == {(BOREL, 1), (DPLUS, 1), (A5, 2)}


def test_dickson_rejects_composite():
    with pytest.raises(ValueError):
        dickson_kinds(15)


def test_aschbacher_examples():
    assert tags(aschbacher_kinds(25)) == {
        (BOREL, 1), (PSL2Q_DOT2, 2), (DMINUS, 1), (DPLUS, 1)
    }
    assert tags(aschbacher_kinds(49)) == {
        (BOREL, 1), (PSL2Q_DOT2, 2), (DMINUS, 1), (DPLUS, 1), (A5, 2)
    }
    assert tags(aschbacher_kinds(121)) == {
        (BOREL, 1), (PSL2Q_DOT2, 2), (DMINUS, 1), (DPLUS, 1)
    }
    with pytest.raises(ValueError):
        aschbacher_kinds(27)


def test_borel_psl2_7(G7):
    inst = construct_maximal(MaxKind(BOREL), G7)
    assert inst.order == 21
    assert inst.involution_count == 0


def test_borel_psl2_13_involutions(G13):
    inst = construct_maximal(MaxKind(BOREL), G13)
    assert inst.order == 78
    # (p-1)/2 = 6 is even, so the Borel holds p involutions
    assert inst.involution_count == 13


def test_a4_psl2_13(G13):
    inst = construct_maximal(MaxKind(A4), G13)
    assert inst.order == 12
    assert inst.involution_count == 3


def test_dplus_psl2_13(G13):
    inst = construct_maximal(MaxKind(DPLUS), G13)
    assert inst.order == 14
    assert inst.involution_count == 7
    assert inst.involution_count <= (13 + 3) // 2


def test_dminus_psl2_13(G13):
    inst = construct_maximal(MaxKind(DMINUS), G13)
    assert inst.order == 12
    assert inst.involution_count <= (13 + 3) // 2


def test_s4_psl2_7(G7):
    inst = construct_maximal(MaxKind(S4, 2), G7)
    assert inst.order == 24
    assert count_involutions(inst, G7) == 9  # 6 transposition-like + 3 double


def test_a5_psl2_11(G11):
    inst = construct_maximal(MaxKind(A5, 2), G11)
    assert inst.order == 60
    assert inst.involution_count == 15


def test_kind_not_in_catalogue_rejected(G13):
    with pytest.raises(ValueError):
        construct_maximal(MaxKind(S4, 2), G13)


@pytest.mark.parametrize("q", [7, 11, 13])
def test_catalogue_instances_closed_with_expected_order(q):
    G = group(q)
    for kind in kinds_for(G):
        inst = construct_maximal(kind, G)
        assert inst.order == expected_order(kind, G)
        res = subgroup_closure([G.elements[i] for i in sorted(inst.element_set)[:4]], G)
        closed = subgroup_closure(
            [G.elements[i] for i in inst.element_set], G, cap=inst.order + 1
        )
        assert closed.elements_found == inst.element_set and not closed.capped
        assert res.elements_found <= inst.element_set


def test_subfield_and_dot2_at_q25(G25):
    sub = construct_maximal(MaxKind(PSL2Q_DOT2, 2), G25)
    assert sub.order == 120
    # the plain subfield copy sits inside
    from cocliquelab.maxsub import _subfield_copy

    plain = _subfield_copy(G25)
    assert len(plain) == 60
    assert plain <= sub.element_set
    assert count_involutions(sub, G25) == 25  # q^2 involutions in PGL2(q)


def test_second_class_twin_is_distinct_class(G25):
    inst = construct_maximal(MaxKind(PSL2Q_DOT2, 2), G25)
    twin = second_class_twin(inst, G25)
    assert twin.order == inst.order
    orbit = all_conjugates(inst.element_set, G25)
    assert len(orbit) == len(G25) // 120
    assert twin.element_set not in orbit


def test_absent_small_kinds_are_not_maximal_subgroups():
    # p = 13: S4 and A5 have no subgroup instances at all (order divisibility);
    # p = 7: A4 instances exist but every one extends inside an S4.
    import random

    G13 = group(13)
    assert all(o != 4 or True for o in G13.orders)
    rng = random.Random(99)
    found_s4_or_a5 = 0
    for _ in range(10_000):
        i, j = rng.randrange(len(G13)), rng.randrange(len(G13))
        if i == G13.identity_index or j == G13.identity_index:
            continue
        res = subgroup_closure([G13.elements[i], G13.elements[j]], G13, cap=61)
        if not res.capped and len(res) in (24, 60):
            found_s4_or_a5 += 1
    assert found_s4_or_a5 == 0

    G7 = group(7)
    a4 = None
    for _ in range(10_000):
        i = rng.choice(G7.involutions)
        j = rng.randrange(len(G7))
        if G7.orders[j] != 3:
            continue
        res = subgroup_closure([G7.elements[i], G7.elements[j]], G7, cap=13)
        if not res.capped and len(res) == 12:
            a4 = res.elements_found
            break
    assert a4 is not None
    bigger = subgroup_closure(
        [G7.elements[i] for i in sorted(a4)[:3]] + [G7.elements[k] for k in range(3, 6)],
        G7,
        cap=len(G7),
    )
    # A4 at p=7 is inside an S4 (one of the two classes)
    s4 = construct_maximal(MaxKind(S4, 2), G7)
    orbit = all_conjugates(s4.element_set, G7) | all_conjugates(
        second_class_twin(s4, G7).element_set, G7
    )
    covers = [S for S in orbit if a4 <= S]
    assert covers, "every A4 at p=7 lies in an S4 copy"
    assert bigger is not None


@pytest.mark.parametrize("q", [7, 11, 13])
def test_conjugate_counts_match_index_formula(q):
    G = group(q)
    for kind in kinds_for(G):
        inst = construct_maximal(kind, G)
        orbit = all_conjugates(inst.element_set, G)
        stabilizer_order = len(G) // len(orbit)
        assert stabilizer_order % inst.order == 0 or stabilizer_order == inst.order
        # maximal subgroups are self-normalising here (simple G, single class)
        assert len(orbit) == len(G) // inst.order


@pytest.mark.parametrize("q", [11, 13])
def test_dihedral_conjugates_intersect_in_involutions(q):
    G = group(q)
    inst = construct_maximal(MaxKind(DPLUS), G)
    orbit = sorted(all_conjugates(inst.element_set, G), key=sorted)
    for a in range(len(orbit)):
        for b in range(a + 1, len(orbit)):
            common = orbit[a] & orbit[b]
            for i in common:
                assert G.orders[i] <= 2


def test_unique_maximal_membership_p13(G13):
    # every element of order 7 = (p+1)/2 lies in exactly one maximal subgroup
    per_kind_orbits = {
        kind.tag: all_conjugates(construct_maximal(kind, G13).element_set, G13)
        for kind in kinds_for(G13)
    }
    for i, o in enumerate(G13.orders):
        if o != 7:
            continue
        containing = [
            S for orbit in per_kind_orbits.values() for S in orbit if i in S
        ]
        assert len(containing) == 1


def test_conjugate_count_through_examples(G13):
    x3 = next(G13.elements[i] for i, o in enumerate(G13.orders) if o == 3)
    n = conjugate_count_through(x3, MaxKind(A4), G13, cross_check=True)
    # 3 divides p-1 = 12, so the orbit has length (p-1)/3 = 4
    assert n == 4
    x7 = next(G13.elements[i] for i, o in enumerate(G13.orders) if o == 7)
    assert conjugate_count_through(x7, MaxKind(DPLUS), G13, cross_check=True) == 1


def test_conjugate_count_rejects_involutions(G13):
    t = G13.elements[G13.involutions[0]]
    with pytest.raises(ValueError):
        conjugate_count_through(t, MaxKind(A4), G13)


def test_normalizer_of_cyclic_is_dihedral(G13):
    i = next(i for i, o in enumerate(G13.orders) if o == 7)
    N = normalizer_of_cyclic(i, G13)
    assert len(N) == 14


def test_copies_through_pgl_at_q25(G25):
    x = next(G25.elements[i] for i, o in enumerate(G25.orders) if o == 3)
    copies = copies_through(x, MaxKind(PSL2Q_DOT2, 2), G25, cross_check=True)
    assert len(copies) == 4
    xi = G25.index(x)
    for S in copies:
        assert xi in S and len(S) == 120


def test_a5_in_psl2_25_exists_but_is_not_maximal(G25):
    # empirical resolution: A5 closures exist (subfield copies) yet every one
    # extends to a proper PSL2(5).2 overgroup, so A5 is rightly absent from
    # the q0 = 25 catalogue
    import random

    rng = random.Random(4)
    inv = group(25).involutions
    order3 = [i for i, o in enumerate(G25.orders) if o == 3]
    a5 = None
    for _ in range(20_000):
        i, j = rng.choice(inv), rng.choice(order3)
        if G25.orders[G25.mul_idx(i, j)] == 5:
            res = subgroup_closure([G25.elements[i], G25.elements[j]], G25, cap=61)
            if not res.capped and len(res) == 60:
                a5 = res.elements_found
                break
    assert a5 is not None
    dot2 = construct_maximal(MaxKind(PSL2Q_DOT2, 2), G25)
    overgroups = [
        S
        for S in all_conjugates(dot2.element_set, G25)
        | all_conjugates(second_class_twin(dot2, G25).element_set, G25)
        if a5 <= S
    ]
    assert overgroups
