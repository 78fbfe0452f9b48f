"""Generating graph, coclique predicates, certification, and seeded search.

Vertices are the non-identity element indices of a GroupIndex; an edge joins
two indices exactly when the pair generates the group.  Adjacency is stored
as one bit row per index (identity row empty).  Groups above the graph cap
are handled without a prebuilt graph by on-demand generation tests.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .psl2 import GroupIndex, make_fast_tester, subgroup_closure

DEFAULT_GRAPH_CAP = 2000


class GeneratingGraph:
    """Symmetric, irreflexive adjacency over non-identity indices."""

    def __init__(self, group: GroupIndex, rows):
        self.group = group
        self.rows = rows
        self.n_vertices = len(group) - 1

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def edges(self):
        for i in range(len(self.group)):
            row = self.rows[i] >> (i + 1)
            j = i + 1
            while row:
                if row & 1:
                    yield (i, j)
                row >>= 1
                j += 1

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def degree(self, i: int) -> int:
        return self.rows[i].bit_count()


def build_graph(G: GroupIndex, cap: int = DEFAULT_GRAPH_CAP) -> GeneratingGraph:
    """Test all pairs and pack the adjacency into bit rows."""
    if len(G) > cap:
        raise ValueError(
            f"PSL(2,{G.q}) has {len(G)} elements; configured graph cap is {cap}"
        )
    test = make_fast_tester(G)
    n = len(G)
    rows = [0] * n
    ident = G.identity_index
    for i in range(n):
        if i == ident:
            continue
        acc = rows[i]
        for j in range(i + 1, n):
            if j == ident:
                continue
            if test(i, j):
                acc |= 1 << j
                rows[j] |= 1 << i
        rows[i] = acc
    return GeneratingGraph(G, rows)


@dataclass
class Coclique:
    """A verified set of pairwise non-generating, non-identity indices."""

    members: tuple
    group_q: int
    verified_pairwise: bool = False
    verified_maximal: bool = False
    witness_log: dict = field(default_factory=dict, repr=False)
    seed: int | None = None

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def size_with_identity(self) -> int:
        return len(self.members) + 1


def _pair_tester(G: GroupIndex, graph: GeneratingGraph | None):
    if graph is not None and graph.group is G:
        return graph.adjacent
    return make_fast_tester(G)


def _check_members(S, G: GroupIndex):
    members = sorted(set(S))
    if not members:
        raise ValueError("coclique test needs a nonempty set")
    if G.identity_index in members:
        raise ValueError("the identity is not a vertex of the generating graph")
    if members[0] < 0 or members[-1] >= len(G):
        raise ValueError("member index out of range")
    return members


def is_coclique(S, G: GroupIndex, graph: GeneratingGraph | None = None) -> bool:
    """True iff no pair of members generates the group."""
    members = _check_members(S, G)
    test = _pair_tester(G, graph)
    for a in range(len(members)):
        ia = members[a]
        for b in range(a + 1, len(members)):
            if test(ia, members[b]):
                return False
    return True


def is_maximal_coclique(S, G: GroupIndex, graph: GeneratingGraph | None = None):
    """(True, witness_log) if maximal, else (False, extending_element).

    witness_log maps every outside index to a member that generates with
    it; witnesses are searched in ascending member order.
    """
    members = _check_members(S, G)
    member_set = set(members)
    test = _pair_tester(G, graph)
    witness_log = {}
    ident = G.identity_index
    for g in range(len(G)):
        if g == ident or g in member_set:
            continue
        for h in members:
            if test(g, h):
                witness_log[g] = h
                break
        else:
            return False, g
    return True, witness_log


def extend_to_maximal(
    S,
    G: GroupIndex,
    seed: int | None = None,
    graph: GeneratingGraph | None = None,
) -> Coclique:
    """Grow a coclique greedily until no element can be added.

    Deterministic ascending-index order when seed is None, seeded shuffle
    otherwise.  The result is certified maximal before it is returned.
    """
    members = _check_members(S, G)
    if not is_coclique(members, G, graph):
        raise ValueError("starting set is not a coclique")
    test = _pair_tester(G, graph)
    current = list(members)
    ident = G.identity_index
    candidates = [i for i in range(len(G)) if i != ident and i not in set(current)]
    if seed is not None:
        random.Random(seed).shuffle(candidates)
    for g in candidates:
        if all(not test(g, h) for h in current):
            current.append(g)
    ok, log = is_maximal_coclique(current, G, graph)
    if not ok:
        raise RuntimeError("greedy extension failed to reach a maximal coclique")
    return Coclique(
        members=tuple(sorted(current)),
        group_q=G.q,
        verified_pairwise=True,
        verified_maximal=True,
        witness_log=log,
        seed=seed,
    )


def search_cocliques(
    G: GroupIndex,
    trials: int,
    seed: int,
    element_filter=None,
    graph: GeneratingGraph | None = None,
) -> list[Coclique]:
    """Seeded random maximal cocliques, each independently verified.

    element_filter restricts the starting element: a callable on indices,
    or the name "order-gt-2".
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if element_filter == "order-gt-2":
        element_filter = lambda i: G.orders[i] > 2  # noqa: E731
    rng = random.Random(seed)
    pool = [
        i
        for i in range(len(G))
        if i != G.identity_index and (element_filter is None or element_filter(i))
    ]
    if not pool:
        raise ValueError("element filter leaves no starting elements")
    out = []
    for t in range(trials):
        start = rng.choice(pool)
        sub_seed = rng.randrange(2**32)
        c = extend_to_maximal([start], G, seed=sub_seed, graph=graph)
        out.append(c)
    return out


def classify_coclique(c: Coclique, G: GroupIndex) -> dict:
    """Label a coclique: involution class, a subgroup's element set, or other."""
    members = set(c.members)
    if members == set(G.involutions):
        return {"kind": "involution-class", "order": len(members)}
    res = subgroup_closure(
        [G.elements[i] for i in c.members], G, cap=G.generation_cap
    )
    if not res.capped and res.elements_found == members | {G.identity_index}:
        return {"kind": "subgroup", "order": len(res.elements_found)}
    return {"kind": "other", "order": len(members)}


# -- exports --


def graph_to_dot(graph: GeneratingGraph) -> str:
    lines = ["graph gengraph {"]
    ident = graph.group.identity_index
    for i in range(len(graph.group)):
        if i != ident:
            lines.append(f"  v{i};")
    for i, j in graph.edges():
        lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_graphml(graph: GeneratingGraph) -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <graph id="gengraph" edgedefault="undirected">',
    ]
    ident = graph.group.identity_index
    for i in range(len(graph.group)):
        if i != ident:
            out.append(f'    <node id="v{i}"/>')
    for i, j in graph.edges():
        out.append(f'    <edge source="v{i}" target="v{j}"/>')
    out.append("  </graph>")
    out.append("</graphml>")
    return "\n".join(out) + "\n"


def graph_to_json(graph: GeneratingGraph) -> str:
    payload = {
        "q": graph.group.q,
        "vertices": graph.n_vertices,
        "edges": sorted(graph.edges()),
    }
    return json.dumps(payload)


def coclique_report(c: Coclique, G: GroupIndex) -> dict:
    return {
        "group": f"PSL(2,{G.q})",
        "q": G.q,
        "size": c.size,
        "size_with_identity": c.size_with_identity,
        "members": [
            {"index": i, "matrix": list(G.elements[i]), "order": G.orders[i]}
            for i in c.members
        ],
        "verified_pairwise": c.verified_pairwise,
        "verified_maximal": c.verified_maximal,
        "classification": classify_coclique(c, G),
        "seed": c.seed,
    }


__all__ = [
    "Coclique",
    "DEFAULT_GRAPH_CAP",
    "GeneratingGraph",
    "build_graph",
    "classify_coclique",
    "coclique_report",
    "extend_to_maximal",
    "graph_to_dot",
    "graph_to_graphml",
    "graph_to_json",
    "is_coclique",
    "is_maximal_coclique",
    "search_cocliques",
]
