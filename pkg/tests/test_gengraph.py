import json

import networkx as nx
import pytest

from cocliquelab.gengraph import (
    Coclique,
    build_graph,
    classify_coclique,
    coclique_report,
    extend_to_maximal,
    graph_to_dot,
    graph_to_graphml,
    graph_to_json,
    is_coclique,
    is_maximal_coclique,
    search_cocliques,
)
from cocliquelab.maxsub import BOREL, DPLUS, MaxKind, construct_maximal, kinds_for
from cocliquelab.psl2 import subgroup_closure

from conftest import group

_graphs = {}


def graph(q):
    if q not in _graphs:
        _graphs[q] = build_graph(group(q))
    return _graphs[q]


def test_graph_cap():
    with pytest.raises(ValueError, match="cap"):
        build_graph(group(13), cap=100)


def test_vertex_count_excludes_identity():
    g5 = graph(5)
    assert g5.n_vertices == 59
    assert g5.rows[g5.group.identity_index] == 0


def test_graph_symmetric_irreflexive():
    g = graph(5)
    n = len(g.group)
    for i in range(n):
        assert not g.adjacent(i, i)
        for j in range(n):
            assert g.adjacent(i, j) == g.adjacent(j, i)


def test_involutions_form_independent_set():
    for q in (5, 7, 13):
        g = graph(q)
        inv = g.group.involutions
        for a in range(len(inv)):
            for b in range(a + 1, len(inv)):
                assert not g.adjacent(inv[a], inv[b])


def test_every_vertex_has_an_edge_q7():
    g = graph(7)
    for i in range(len(g.group)):
        if i != g.group.identity_index:
            assert g.degree(i) >= 1


def test_is_coclique_examples(G7):
    g = graph(7)
    some = next(i for i in range(len(G7)) if i != G7.identity_index)
    assert is_coclique([some], G7, g)
    assert is_coclique(G7.involutions, G7, g)
    borel = construct_maximal(MaxKind(BOREL), G7)
    assert is_coclique(borel.element_set - {G7.identity_index}, G7, g)


def test_is_coclique_rejects_identity(G7):
    with pytest.raises(ValueError):
        is_coclique([G7.identity_index], G7)
    with pytest.raises(ValueError):
        is_coclique([], G7)


def test_involution_class_is_maximal_coclique_p13(G13):
    g = graph(13)
    ok, log = is_maximal_coclique(G13.involutions, G13, g)
    assert ok
    outside = set(range(len(G13))) - set(G13.involutions) - {G13.identity_index}
    assert set(log) == outside
    for out_elt, witness in log.items():
        assert g.adjacent(out_elt, witness)


def test_borel_is_maximal_coclique_p13(G13):
    g = graph(13)
    borel = construct_maximal(MaxKind(BOREL), G13)
    ok, _ = is_maximal_coclique(borel.element_set - {G13.identity_index}, G13, g)
    assert ok


def test_single_small_element_not_maximal(G13):
    g = graph(13)
    x = next(i for i, o in enumerate(G13.orders) if o == 3)
    ok, extender = is_maximal_coclique([x], G13, g)
    assert not ok
    assert not g.adjacent(x, extender)


def test_extension_of_unique_maximal_element_is_its_dihedral(G13):
    g = graph(13)
    x = next(i for i, o in enumerate(G13.orders) if o == 7)
    d14 = construct_maximal(MaxKind(DPLUS), G13, anchor=G13.elements[x])
    want = tuple(sorted(d14.element_set - {G13.identity_index}))
    det = extend_to_maximal([x], G13)
    assert det.members == want
    for seed in range(25):
        c = extend_to_maximal([x], G13, seed=seed, graph=g)
        assert c.members == want


def test_extend_keeps_maximal_input_fixed(G13):
    g = graph(13)
    borel = construct_maximal(MaxKind(BOREL), G13)
    start = sorted(borel.element_set - {G13.identity_index})
    c = extend_to_maximal(start, G13, graph=g)
    assert list(c.members) == start


def test_extend_single_involution_verified(G13):
    g = graph(13)
    c = extend_to_maximal([G13.involutions[0]], G13, graph=g)
    assert c.verified_maximal and c.verified_pairwise
    assert is_coclique(c.members, G13, g)


def test_search_rejects_zero_trials(G7):
    with pytest.raises(ValueError):
        search_cocliques(G7, 0, seed=1)


def test_search_results_verified_and_classified_q7(G7):
    g = graph(7)
    bound = 129 * (7 - 1) // 2 + 2
    results = search_cocliques(G7, 100, seed=20240901, element_filter="order-gt-2", graph=g)
    assert len(results) == 100
    for c in results:
        assert G7.orders[[i for i in c.members][0]] >= 1
        assert any(G7.orders[i] > 2 for i in c.members)
        label = classify_coclique(c, G7)
        assert label["kind"] in ("subgroup", "involution-class", "other")
        assert label["kind"] == "subgroup" or c.size <= bound


def test_search_q11_unfiltered_outcomes(G11):
    # random greedy extensions essentially never reproduce the pure
    # involution class (it needs ~54 involution-only acceptances in a row);
    # 2000-trial probe found 0.  Assert what the procedure verifiably yields.
    g = graph(11)
    results = search_cocliques(G11, 100, seed=7, graph=g)
    labels = [classify_coclique(c, G11) for c in results]
    assert all(c.verified_maximal for c in results)
    subgroup_orders = {l["order"] for l in labels if l["kind"] == "subgroup"}
    assert subgroup_orders & {12, 55, 60}  # D12, Borel, A5 all reachable
    # the involution class itself still certifies as a maximal coclique
    ok, _ = is_maximal_coclique(G11.involutions, G11, g)
    assert ok


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_subgroup_cocliques_from_catalogue(q):
    G = group(q)
    g = graph(q)
    for kind in kinds_for(G):
        inst = construct_maximal(kind, G)
        assert is_coclique(inst.element_set - {G.identity_index}, G, g)


def test_proper_closure_search_results_equal_their_closure(G13):
    g = graph(13)
    results = search_cocliques(G13, 40, seed=5, graph=g)
    for c in results:
        res = subgroup_closure(
            [G13.elements[i] for i in c.members], G13, cap=G13.generation_cap
        )
        if not res.capped and len(res.elements_found) < len(G13):
            assert res.elements_found == set(c.members) | {G13.identity_index}


def test_dot_export_roundtrip():
    g = graph(7)
    dot = graph_to_dot(g)
    parsed = nx.nx_pydot.read_dot.__wrapped__ if False else None
    # parse by hand: networkx's pydot needs the pydot package, parse edges directly
    edges = set()
    nodes = set()
    for line in dot.splitlines():
        line = line.strip().rstrip(";")
        if " -- " in line:
            a, b = line.split(" -- ")
            edges.add((int(a[1:]), int(b[1:])))
        elif line.startswith("v"):
            nodes.add(int(line[1:]))
    assert len(nodes) == 167
    assert edges == set(g.edges())
    assert parsed is None


def test_graphml_export_roundtrip(tmp_path):
    g = graph(5)
    path = tmp_path / "g.graphml"
    path.write_text(graph_to_graphml(g))
    H = nx.read_graphml(path)
    assert H.number_of_nodes() == 59
    assert {tuple(sorted((int(u[1:]), int(v[1:])))) for u, v in H.edges()} == set(g.edges())


def test_json_export(G5):
    g = graph(5)
    payload = json.loads(graph_to_json(g))
    assert payload["q"] == 5
    assert payload["vertices"] == 59
    assert all(i < j for i, j in payload["edges"])
    assert len(payload["edges"]) == g.edge_count()


def test_coclique_report_schema(G13):
    g = graph(13)
    c = extend_to_maximal([G13.involutions[0]], G13, graph=g)
    rep = coclique_report(c, G13)
    assert rep["q"] == 13
    assert rep["size"] == c.size
    assert rep["size_with_identity"] == c.size + 1
    assert len(rep["members"]) == c.size
    assert {"index", "matrix", "order"} <= set(rep["members"][0])
    assert rep["verified_maximal"]
