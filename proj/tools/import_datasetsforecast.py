#!/usr/bin/env python3
"""Convert a hierarchical dataset in long format to the CLI's wide CSV.

Input is the pair of frames the `datasetsforecast` package hands out for its
hierarchical collections, exported to CSV:

  Y.csv  columns unique_id, ds, y          (one row per series per period)
  S.csv  first column = node id, then one 0/1 column per bottom series

Writes dataset.csv (t, then one column per node) and hierarchy.json. Only
tree-shaped hierarchies are accepted; grouped structures where a series
rolls up into two different parents are rejected.

    python tools/import_datasetsforecast.py Y.csv S.csv outdir/

Nothing is downloaded here. To get the frames:

    from datasetsforecast.hierarchical import HierarchicalData
    Y, S, _ = HierarchicalData.load("data", "Labour")
    Y.to_csv("Y.csv", index=False); S.to_csv("S.csv")
"""

import argparse
import json
import sys
from pathlib import Path

import pandas as pd


def tree_edges(s):
    leaves = {node: frozenset(s.columns[s.loc[node].to_numpy() != 0]) for node in s.index}
    edges = []
    for child, below in leaves.items():
        parents = [p for p, cover in leaves.items() if p != child and below < cover]
        if not parents:
            continue
        # The direct parent is the smallest strict superset.
        size = min(len(leaves[p]) for p in parents)
        direct = [p for p in parents if len(leaves[p]) == size]
        if len(direct) != 1:
            raise SystemExit(f"node {child!r} has several parents {direct}; not a tree")
        edges.append([str(direct[0]), str(child)])
    return edges


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("y_csv")
    ap.add_argument("s_csv")
    ap.add_argument("out_dir")
    args = ap.parse_args()

    y = pd.read_csv(args.y_csv)
    s = pd.read_csv(args.s_csv, index_col=0)
    s.index = s.index.astype(str)
    s.columns = s.columns.astype(str)
    y["unique_id"] = y["unique_id"].astype(str)

    # Aggregates may be absent; the CLI recomputes them from the leaves.
    absent_leaves = set(s.columns) - set(y["unique_id"])
    if absent_leaves:
        sys.exit(f"bottom series without data: {sorted(absent_leaves)[:5]}")

    wide = y.pivot(index="ds", columns="unique_id", values="y").sort_index()
    wide = wide[[c for c in s.index if c in wide.columns]]
    if wide.isna().any().any():
        sys.exit("some series have gaps; fill or trim them first")
    wide.insert(0, "t", range(1, len(wide) + 1))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    wide.to_csv(out / "dataset.csv", index=False, float_format="%.17g")
    spec = {"nodes": list(s.index), "edges": tree_edges(s)}
    (out / "hierarchy.json").write_text(json.dumps(spec, indent=2) + "\n")
    print(f"{len(wide)} periods, {len(s.index)} nodes, {len(s.columns)} bottom series -> {out}")


if __name__ == "__main__":
    main()
