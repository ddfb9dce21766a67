"""Agglomerative merging on a precomputed dissimilarity matrix.

One Lance-Williams style engine serves both the base linkage clusterers
and the consensus step. Merge records follow the usual convention:
original samples are nodes 0..n-1 and the cluster created by merge ``i``
is node ``n + i``.
"""
from __future__ import annotations

import numpy as np

LINKAGE_METHODS = ("single", "complete", "average", "ward")


def linkage_merge(dissimilarity: np.ndarray, method: str) -> list[tuple[int, int, float, int]]:
    """Run bottom-up merging; returns n-1 records (left, right, height, size).

    Ties in the closest pair go to the smallest (row, column) slot pair,
    which keeps the merge sequence deterministic.
    """
    if method not in LINKAGE_METHODS:
        raise ValueError(f"unknown linkage method {method!r}")
    d = np.asarray(dissimilarity, dtype=float).copy()
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError("dissimilarity matrix must be square")
    np.fill_diagonal(d, np.inf)

    active = np.ones(n, dtype=bool)
    node_id = np.arange(n)          # slot -> current cluster id
    size = np.ones(n, dtype=int)    # slot -> cluster size
    merges: list[tuple[int, int, float, int]] = []

    for step in range(n - 1):
        idx = np.flatnonzero(active)
        sub = d[np.ix_(idx, idx)]
        r, c = np.unravel_index(int(np.argmin(sub)), sub.shape)
        i, j = int(idx[r]), int(idx[c])
        if i > j:
            i, j = j, i
        height = float(d[i, j])

        others = idx[(idx != i) & (idx != j)]
        if others.size:
            dki = d[others, i]
            dkj = d[others, j]
            if method == "single":
                new = np.minimum(dki, dkj)
            elif method == "complete":
                new = np.maximum(dki, dkj)
            elif method == "average":
                new = (size[i] * dki + size[j] * dkj) / (size[i] + size[j])
            else:  # ward, treating stored values as Euclidean-like distances
                sk = size[others]
                num = (
                    (size[i] + sk) * dki**2
                    + (size[j] + sk) * dkj**2
                    - sk * height**2
                )
                new = np.sqrt(np.maximum(num / (size[i] + size[j] + sk), 0.0))
            d[others, i] = new
            d[i, others] = new

        left, right = sorted((int(node_id[i]), int(node_id[j])))
        size[i] += size[j]
        merges.append((left, right, height, int(size[i])))
        node_id[i] = n + step
        active[j] = False

    return merges


def cut_merges(merges: list[tuple[int, int, float, int]], n: int, k: int) -> np.ndarray:
    """Labels after undoing the last k-1 merges (exactly k clusters).

    Labels are renumbered 0..k-1 in order of each cluster's smallest
    sample index.
    """
    if not 1 <= k <= n:
        raise ValueError(f"cluster count {k} outside [1, {n}]")
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step in range(n - k):
        left, right, _, _ = merges[step]
        new = n + step
        parent[find(left)] = new
        parent[find(right)] = new

    roots = [find(i) for i in range(n)]
    relabel: dict[int, int] = {}
    labels = np.empty(n, dtype=int)
    for i, root in enumerate(roots):
        if root not in relabel:
            relabel[root] = len(relabel)
        labels[i] = relabel[root]
    return labels
