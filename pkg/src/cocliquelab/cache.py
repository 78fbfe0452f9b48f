"""Disk cache for group enumerations and generating graphs.

Every entry is a single file: one JSON header line (kind, parameters,
artifact version, layout) followed by a packed little-endian body.  Writes
go through a temp file and rename, so readers never see partial entries.
Version or shape mismatches and corrupt files count as misses; callers
recompute and overwrite.
"""

from __future__ import annotations

import json
import os
import warnings
from pathlib import Path

from . import ARTIFACT_VERSION
from .gengraph import GeneratingGraph
from .psl2 import GroupIndex

ENV_VAR = "COCLIQUELAB_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cocliquelab"


def _write_atomic(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


def _read_entry(path: Path, expect: dict):
    """Header dict + body bytes, or None on miss/corruption (with a warning)."""
    if not path.exists():
        return None
    try:
        raw = path.read_bytes()
        nl = raw.index(b"\n")
        header = json.loads(raw[:nl])
        body = raw[nl + 1 :]
    except (ValueError, json.JSONDecodeError):
        warnings.warn(f"corrupt cache entry {path}; recomputing")
        return None
    if header.get("version") != ARTIFACT_VERSION:
        return None
    for k, v in expect.items():
        if header.get(k) != v:
            warnings.warn(f"cache entry {path} has unexpected {k}; recomputing")
            return None
    return header, body


def graph_path(q: int, cache_dir: Path) -> Path:
    return Path(cache_dir) / f"graph-q{q}.bin"


def store_graph(graph: GeneratingGraph, cache_dir: Path) -> Path:
    G = graph.group
    stride = (len(G) + 7) // 8
    header = {
        "kind": "graph",
        "q": G.q,
        "count": len(G),
        "row_stride": stride,
        "version": ARTIFACT_VERSION,
    }
    body = b"".join(row.to_bytes(stride, "little") for row in graph.rows)
    path = graph_path(G.q, cache_dir)
    _write_atomic(path, json.dumps(header).encode() + b"\n" + body)
    return path


def load_graph(G: GroupIndex, cache_dir: Path):
    entry = _read_entry(graph_path(G.q, cache_dir), {"kind": "graph", "q": G.q, "count": len(G)})
    if entry is None:
        return None
    header, body = entry
    stride = header["row_stride"]
    if len(body) != stride * len(G):
        warnings.warn(f"cache entry for graph q={G.q} has wrong size; recomputing")
        return None
    rows = [
        int.from_bytes(body[i * stride : (i + 1) * stride], "little") for i in range(len(G))
    ]
    return GeneratingGraph(G, rows)


def group_path(q: int, cache_dir: Path) -> Path:
    return Path(cache_dir) / f"group-q{q}.bin"


def store_group(G: GroupIndex, cache_dir: Path) -> Path:
    header = {
        "kind": "group",
        "q": G.q,
        "count": len(G),
        "version": ARTIFACT_VERSION,
    }
    width = 4  # int32 per entry
    body = bytearray()
    for (a, b, c, d), o in zip(G.elements, G.orders):
        for v in (a, b, c, d, o):
            body += v.to_bytes(width, "little")
    path = group_path(G.q, cache_dir)
    _write_atomic(path, json.dumps(header).encode() + b"\n" + bytes(body))
    return path


def load_group(q: int, cache_dir: Path):
    expected = q * (q * q - 1) // 2
    entry = _read_entry(group_path(q, cache_dir), {"kind": "group", "q": q, "count": expected})
    if entry is None:
        return None
    _, body = entry
    width = 4
    if len(body) != expected * 5 * width:
        warnings.warn(f"cache entry for group q={q} has wrong size; recomputing")
        return None
    elements = []
    orders = []
    pos = 0
    for _ in range(expected):
        vals = [
            int.from_bytes(body[pos + k * width : pos + (k + 1) * width], "little")
            for k in range(5)
        ]
        pos += 5 * width
        elements.append(tuple(vals[:4]))
        orders.append(vals[4])
    try:
        return GroupIndex.from_cached(q, elements, orders)
    except Exception as exc:  # noqa: BLE001 - any inconsistency means recompute
        warnings.warn(f"cache entry for group q={q} failed validation ({exc}); recomputing")
        return None


def kv_path(key: str, cache_dir: Path) -> Path:
    safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in key)
    return Path(cache_dir) / f"kv-{safe}.json"


def cache_roundtrip(key: str, payload, cache_dir: Path):
    """Store a JSON payload under a key and read it back from disk."""
    path = kv_path(key, cache_dir)
    doc = {"kind": "kv", "key": key, "version": ARTIFACT_VERSION, "payload": payload}
    _write_atomic(path, json.dumps(doc).encode() + b"\n")
    entry = _read_entry(path, {"kind": "kv", "key": key})
    if entry is None:
        raise RuntimeError(f"cache round-trip failed for key {key}")
    return json.loads(json.dumps(entry[0]["payload"]))


def load_kv(key: str, cache_dir: Path):
    entry = _read_entry(kv_path(key, cache_dir), {"kind": "kv", "key": key})
    return None if entry is None else entry[0]["payload"]


def clear_cache(cache_dir: Path) -> int:
    cache_dir = Path(cache_dir)
    if not cache_dir.exists():
        return 0
    removed = 0
    for f in cache_dir.iterdir():
        if f.name.startswith(("graph-", "group-", "kv-")) and f.is_file():
            f.unlink()
            removed += 1
    return removed


def cached_group(q: int, cache_dir: Path | None) -> GroupIndex:
    if cache_dir is None:
        from .psl2 import psl2_enumerate

        return psl2_enumerate(q)
    G = load_group(q, cache_dir)
    if G is None:
        from .psl2 import psl2_enumerate

        G = psl2_enumerate(q)
        store_group(G, cache_dir)
    return G


def cached_graph(G: GroupIndex, cache_dir: Path | None, cap: int):
    from .gengraph import build_graph

    if cache_dir is None:
        return build_graph(G, cap=cap)
    graph = load_graph(G, cache_dir)
    if graph is None:
        graph = build_graph(G, cap=cap)
        store_graph(graph, cache_dir)
    return graph
