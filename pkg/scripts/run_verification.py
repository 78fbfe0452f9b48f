#!/usr/bin/env python3
"""Full claim-register sweep: runs every verification and writes verdict JSONs.

Usage: python scripts/run_verification.py [--out results/] [--seed N] [--heavy]

The default sweep covers the desk-scale parameters (theorem-a and the lemma
suite at p in {5,7,11,13}, the p=53 construction, the q=5 geometric coclique,
the q0=25 subfield bound, iso sanity at q in {3,5}).  --heavy adds the q=7
geometric run (pairwise-only; PSL(2,49) has 58800 elements).
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cocliquelab.verify import (  # noqa: E402
    verify_geometric,
    verify_iso,
    verify_lemmas,
    verify_remark,
    verify_subfield_bound,
    verify_theorem_a,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--heavy", action="store_true", help="include the q=7 geometric run")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    jobs = []
    for p in (5, 7, 11, 13):
        jobs.append((f"theorem-a-p{p}", lambda p=p: verify_theorem_a(p, args.trials, args.seed)))
        jobs.append((f"lemmas-p{p}", lambda p=p: verify_lemmas(p, seed=args.seed)))
    jobs += [
        ("remark-p53", lambda: verify_remark(53, seed=args.seed)),
        ("geometric-q5", lambda: verify_geometric(5, seed=args.seed)),
        ("subfield-q5", lambda: verify_subfield_bound(5, seed=args.seed)),
        ("iso-q3", lambda: verify_iso(3, seed=args.seed)),
        ("iso-q5", lambda: verify_iso(5, seed=args.seed)),
    ]
    if args.heavy:
        jobs.append(("geometric-q7-pairwise", lambda: verify_geometric(7, pairwise_only=True)))

    summary = []
    for name, job in jobs:
        t0 = time.time()
        v = job()
        (args.out / f"{name}.json").write_text(v.to_json(indent=2) + "\n")
        line = f"{name:28s} {v.status:22s} {time.time() - t0:7.1f}s"
        print(line)
        summary.append({"job": name, "status": v.status, "runtime_ms": v.runtime_ms})
    (args.out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    bad = [s for s in summary if s["status"] == "refuted"]
    print(f"\n{len(summary)} verdicts written to {args.out}/; refuted: {len(bad)}")
    for s in bad:
        print(f"  refuted: {s['job']} (see {args.out}/{s['job']}.json for the inventory)")


if __name__ == "__main__":
    main()
