"""Command-line entry point, configuration, and export plumbing.

Exit codes: 0 verified/success, 1 refuted, 2 usage or precondition error,
3 inconclusive (budget-limited run).  Every output carries the parameters,
seed and artifact version that produced it.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import ARTIFACT_VERSION
from .cache import (
    cache_roundtrip,  # noqa: F401  (re-exported: part of the cache surface)
    cached_graph,
    cached_group,
    clear_cache,
    default_cache_dir,
)
from .gengraph import (
    DEFAULT_GRAPH_CAP,
    coclique_report,
    extend_to_maximal,
    graph_to_dot,
    graph_to_graphml,
    graph_to_json,
    is_coclique,
    is_maximal_coclique,
    search_cocliques,
)
from .psl2 import DEFAULT_ENUMERATION_CAP
from .verify import (
    INCONCLUSIVE,
    REFUTED,
    VERIFIED,
    verify_geometric,
    verify_iso,
    verify_lemmas,
    verify_remark,
    verify_subfield_bound,
    verify_theorem_a,
)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

_STATUS_EXIT = {VERIFIED: EXIT_OK, REFUTED: EXIT_REFUTED, INCONCLUSIVE: EXIT_INCONCLUSIVE}


@dataclass
class RunConfig:
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    graph_cap: int = DEFAULT_GRAPH_CAP
    closure_cap: int | None = None
    seed: int = 0
    cache_dir: Path | None = None
    output_format: str = "json"
    parallelism: int = 1

    def __post_init__(self):
        if self.enumeration_cap <= 0 or self.graph_cap <= 0 or self.parallelism <= 0:
            raise ValueError("caps and parallelism degree must be positive")


def load_config_file(path: Path) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


_INT_KEYS = {"enumeration_cap", "graph_cap", "closure_cap", "seed", "parallelism"}


def build_config(args) -> RunConfig:
    values: dict = {}
    if args.config:
        for k, v in load_config_file(args.config).items():
            if k in _INT_KEYS:
                values[k] = int(v)
            elif k == "cache_dir":
                values[k] = Path(v)
            elif k == "output_format":
                values[k] = v
            else:
                raise ValueError(f"unknown config key {k!r}")
    for k in ("enumeration_cap", "graph_cap", "closure_cap", "seed", "parallelism"):
        flag = getattr(args, k, None)
        if flag is not None:
            values[k] = flag
    if getattr(args, "cache_dir", None) is not None:
        values["cache_dir"] = Path(args.cache_dir)
    cfg = RunConfig(**values)
    if cfg.cache_dir is None and not getattr(args, "no_cache", False):
        cfg.cache_dir = default_cache_dir()
    return cfg


def _emit(payload: dict, args, cfg: RunConfig):
    payload.setdefault("artifact_version", ARTIFACT_VERSION)
    payload.setdefault("seed", cfg.seed)
    text = json.dumps(payload, indent=2, default=_default)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    print(text)


def _default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"not JSON-serialisable: {type(x)}")


def _group(args, cfg: RunConfig):
    from .psl2 import psl2_enumerate

    if cfg.cache_dir is None:
        G = psl2_enumerate(args.q, cap=cfg.enumeration_cap)
    else:
        G = cached_group(args.q, cfg.cache_dir)
    if cfg.closure_cap is not None:
        G.generation_cap = cfg.closure_cap
    return G


def _parse_members(args) -> list[int]:
    if args.members:
        return [int(s) for s in args.members.replace(" ", "").split(",") if s]
    if args.members_file:
        data = json.loads(Path(args.members_file).read_text())
        if isinstance(data, dict):
            data = [m["index"] if isinstance(m, dict) else m for m in data["members"]]
        return [int(i) for i in data]
    raise ValueError("provide --members or --members-file")


def cmd_group_build(args, cfg):
    G = _group(args, cfg)
    _emit(
        {
            "q": G.q,
            "order": len(G),
            "involutions": len(G.involutions),
            "identity_index": G.identity_index,
            "cache_dir": cfg.cache_dir,
        },
        args,
        cfg,
    )
    return EXIT_OK


def cmd_graph_build(args, cfg):
    G = _group(args, cfg)
    graph = cached_graph(G, cfg.cache_dir, cfg.graph_cap)
    _emit(
        {"q": G.q, "vertices": graph.n_vertices, "edges": graph.edge_count()},
        args,
        cfg,
    )
    return EXIT_OK


def cmd_graph_export(args, cfg):
    G = _group(args, cfg)
    graph = cached_graph(G, cfg.cache_dir, cfg.graph_cap)
    writer = {"dot": graph_to_dot, "graphml": graph_to_graphml, "json": graph_to_json}[
        args.format
    ]
    text = writer(graph)
    if args.out:
        Path(args.out).write_text(text)
        summary = {
            "q": G.q,
            "format": args.format,
            "out": args.out,
            "artifact_version": ARTIFACT_VERSION,
            "seed": cfg.seed,
        }
        print(json.dumps(summary, indent=2))
    else:
        print(text)
    return EXIT_OK


def cmd_coclique_check(args, cfg):
    G = _group(args, cfg)
    members = _parse_members(args)
    graph = None
    if len(G) <= cfg.graph_cap:
        graph = cached_graph(G, cfg.cache_dir, cfg.graph_cap)
    pairwise = is_coclique(members, G, graph)
    payload = {"q": G.q, "members": len(members), "coclique": pairwise}
    if pairwise:
        ok, data = is_maximal_coclique(members, G, graph)
        payload["maximal"] = ok
        if not ok:
            payload["extending_element"] = data
    _emit(payload, args, cfg)
    return EXIT_OK if pairwise else EXIT_REFUTED


def cmd_coclique_extend(args, cfg):
    G = _group(args, cfg)
    graph = cached_graph(G, cfg.cache_dir, cfg.graph_cap) if len(G) <= cfg.graph_cap else None
    c = extend_to_maximal(_parse_members(args), G, seed=args.shuffle_seed, graph=graph)
    _emit(coclique_report(c, G), args, cfg)
    return EXIT_OK


def cmd_coclique_search(args, cfg):
    G = _group(args, cfg)
    graph = cached_graph(G, cfg.cache_dir, cfg.graph_cap) if len(G) <= cfg.graph_cap else None
    results = search_cocliques(
        G, args.trials, cfg.seed, element_filter=args.filter, graph=graph
    )
    _emit(
        {
            "q": G.q,
            "trials": args.trials,
            "cocliques": [coclique_report(c, G) for c in results],
        },
        args,
        cfg,
    )
    return EXIT_OK


def cmd_geom_build(args, cfg):
    from .ortho4 import build_geometric_coclique, geometric_report, kl_isomorphism

    gc = build_geometric_coclique(args.q)
    _emit(geometric_report(gc, kl_isomorphism(args.q)), args, cfg)
    return EXIT_OK


def cmd_geom_census(args, cfg):
    from .ortho4 import build_minus_space, canonical_nonisotropic, census_2spaces, perp

    S = build_minus_space(args.q)
    v = canonical_nonisotropic(S)
    minus, plus, degen = census_2spaces(perp(v, S), S)
    _emit(
        {
            "q": args.q,
            "gram": [list(r) for r in S.gram],
            "singular_vectors": S.type_certificate,
            "census": {"minus": minus, "plus": plus, "degenerate": degen},
            "total": minus + plus + degen,
        },
        args,
        cfg,
    )
    return EXIT_OK


def cmd_verify(args, cfg):
    kind = args.claim
    if kind == "theorem-a":
        v = verify_theorem_a(args.p, trials=args.trials, seed=cfg.seed, cache_dir=cfg.cache_dir)
    elif kind == "remark":
        v = verify_remark(args.p, seed=cfg.seed)
    elif kind == "geometric":
        v = verify_geometric(args.q, pairwise_only=args.pairwise_only, seed=cfg.seed)
    elif kind == "subfield":
        v = verify_subfield_bound(args.q, seed=cfg.seed)
    elif kind == "lemmas":
        v = verify_lemmas(args.p, seed=cfg.seed, cache_dir=cfg.cache_dir)
    elif kind == "iso":
        v = verify_iso(args.q, pairs=args.pairs, seed=cfg.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown claim {kind}")
    _emit(v.to_dict(), args, cfg)
    return _STATUS_EXIT[v.status]


def cmd_cache_clear(args, cfg):
    target = cfg.cache_dir or default_cache_dir()
    removed = clear_cache(target)
    _emit({"cache_dir": target, "removed": removed}, args, cfg)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocliquelab",
        description="Maximal cocliques in generating graphs of PSL(2, q): "
        "constructions, certification, and claim verification.",
    )
    parser.add_argument("--config", type=Path, help="flat key=value config file")
    parser.add_argument("--cache-dir", type=Path, help="cache directory override")
    parser.add_argument("--no-cache", action="store_true", help="disable the disk cache")
    parser.add_argument("--seed", type=int, help="seed recorded in every output")
    parser.add_argument("--enumeration-cap", dest="enumeration_cap", type=int)
    parser.add_argument("--graph-cap", dest="graph_cap", type=int)
    parser.add_argument("--closure-cap", dest="closure_cap", type=int)
    parser.add_argument("--parallelism", type=int, help="accepted; execution is serial")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="group enumeration").add_subparsers(
        dest="sub", required=True
    )
    b = g.add_parser("build")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--out")
    b.set_defaults(fn=cmd_group_build)

    gr = sub.add_parser("graph", help="generating graph").add_subparsers(
        dest="sub", required=True
    )
    b = gr.add_parser("build")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--out")
    b.set_defaults(fn=cmd_graph_build)
    e = gr.add_parser("export")
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--format", choices=["dot", "graphml", "json"], default="json")
    e.add_argument("--out")
    e.set_defaults(fn=cmd_graph_export)

    co = sub.add_parser("coclique", help="coclique operations").add_subparsers(
        dest="sub", required=True
    )
    for name, fn in (
        ("check", cmd_coclique_check),
        ("extend", cmd_coclique_extend),
    ):
        c = co.add_parser(name)
        c.add_argument("--q", type=int, required=True)
        c.add_argument("--members")
        c.add_argument("--members-file")
        c.add_argument("--out")
        if name == "extend":
            c.add_argument(
                "--shuffle-seed",
                type=int,
                help="seeded candidate shuffle; omit for deterministic ascending order",
            )
        c.set_defaults(fn=fn)
    s = co.add_parser("search")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--filter", choices=["order-gt-2"])
    s.add_argument("--out")
    s.set_defaults(fn=cmd_coclique_search)

    ge = sub.add_parser("geom", help="orthogonal 4-space constructions").add_subparsers(
        dest="sub", required=True
    )
    b = ge.add_parser("build")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--out")
    b.set_defaults(fn=cmd_geom_build)
    c = ge.add_parser("census")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_geom_census)

    ve = sub.add_parser("verify", help="claim verification")
    vs = ve.add_subparsers(dest="claim", required=True)
    for claim in ("theorem-a", "remark", "geometric", "subfield", "lemmas", "iso"):
        vp = vs.add_parser(claim)
        if claim in ("theorem-a", "remark", "lemmas"):
            vp.add_argument("--p", type=int, required=True)
        else:
            vp.add_argument("--q", type=int, required=True)
        if claim == "theorem-a":
            vp.add_argument("--trials", type=int, default=100)
        if claim == "geometric":
            vp.add_argument("--pairwise-only", action="store_true")
        if claim == "iso":
            vp.add_argument("--pairs", type=int, default=1000)
        vp.add_argument("--out")
        vp.set_defaults(fn=cmd_verify)

    ca = sub.add_parser("cache", help="cache maintenance").add_subparsers(
        dest="sub", required=True
    )
    cc = ca.add_parser("clear")
    cc.add_argument("--out")
    cc.set_defaults(fn=cmd_cache_clear)

    return parser


def cli_dispatch(argv) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(args)
        return args.fn(args, cfg)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():  # pragma: no cover - thin wrapper
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
