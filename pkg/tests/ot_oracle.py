"""Brute-force minimum-cost transport oracle, independent of the package.

Enumerates every spanning-tree basis of the bipartite transport graph
(there are m^(n-1) * n^(m-1) of them), solves each by leaf elimination,
and returns the cheapest feasible basic solution's cost. Exponential,
intended for supports up to about 4x4.
"""
import itertools
from functools import lru_cache

import numpy as np


def _elimination_order(cells, m, n):
    """Per-basis leaf-elimination schedule, or None if the cells contain a
    cycle / leave the graph disconnected (i.e. are not a spanning tree)."""
    adj = {node: [] for node in range(m + n)}
    for idx, (i, j) in enumerate(cells):
        adj[i].append(idx)
        adj[m + j].append(idx)
    degree = {node: len(lst) for node, lst in adj.items()}
    used = [False] * len(cells)
    leaves = [node for node, d in degree.items() if d == 1]
    order = []
    while leaves:
        node = leaves.pop()
        live = [idx for idx in adj[node] if not used[idx]]
        if len(live) != 1:
            continue  # the node's last cell was consumed from the other side
        idx = live[0]
        used[idx] = True
        order.append((idx, node))
        i, j = cells[idx]
        other = m + j if node == i else i
        degree[other] -= 1
        degree[node] -= 1
        if degree[other] == 1:
            leaves.append(other)
    if not all(used):
        return None
    return tuple(order)


@lru_cache(maxsize=None)
def _tree_bases(m, n):
    cells = [(i, j) for i in range(m) for j in range(n)]
    bases = []
    for subset in itertools.combinations(cells, m + n - 1):
        order = _elimination_order(subset, m, n)
        if order is not None:
            bases.append((subset, order))
    return bases


def oracle_min_cost(a, b, costs) -> float:
    """Exact optimum of the transportation LP by vertex enumeration."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    costs = np.asarray(costs, dtype=float)
    m, n = costs.shape
    best = np.inf
    for cells, order in _tree_bases(m, n):
        resid = np.concatenate([a, b])
        flows = np.empty(len(cells))
        for idx, node in order:
            i, j = cells[idx]
            f = resid[node]
            flows[idx] = f
            resid[m + j if node == i else i] -= f
            resid[node] = 0.0
        if flows.min() < -1e-12:
            continue
        cost = sum(costs[cells[idx]] * flows[idx] for idx in range(len(cells)))
        best = min(best, cost)
    return float(best)
