"""Exact Word Mover's Distance as a small optimal-transport problem.

The solver is a dense transportation simplex: northwest-corner start,
spanning-tree duals, most-negative entering rule with a first-negative
fallback against degenerate cycling. Exact (within float tolerance), so
it can be checked against brute-force enumeration of basic solutions.
"""
from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass

import numpy as np

from .core import Document, EmbeddingStore
from .errors import EmptyVectorError, InfeasibleMarginals, ZeroNorm

DEFAULT_STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by can could did do does doing down during
each few for from further had has have having he her here hers herself him
himself his how i if in into is it its itself just me more most my myself no
nor not now of off on once only or other our ours ourselves out over own same
she should so some such than that the their theirs them themselves then there
these they this those through to too under until up very was we were what when
where which while who whom why will with would you your yours yourself
yourselves
""".split())

MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class WmdConfig:
    remove_stopwords: bool = True
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    ground_metric: str = "euclidean"  # or "cosine"

    def __post_init__(self):
        if self.ground_metric not in ("euclidean", "cosine"):
            raise ValueError(f"unknown ground metric {self.ground_metric!r}")


DEFAULT_WMD_CONFIG = WmdConfig()


@dataclass(frozen=True)
class NBow:
    """Normalized bag of words: unique support with probability weights."""

    support: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        support = tuple(self.support)
        weights = np.array(self.weights, dtype=float)
        if len(set(support)) != len(support):
            raise ValueError("support words must be unique")
        if weights.shape != (len(support),):
            raise ValueError("weights length must match support length")
        if (weights < 0).any():
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        weights.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class TransportPlan:
    matrix: np.ndarray
    cost: float

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if (matrix < -MARGINAL_TOL).any():
            raise ValueError("transport plan has negative mass")
        matrix[matrix < 0] = 0.0
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "cost", float(self.cost))


def nbow(doc: Document, store: EmbeddingStore,
         config: WmdConfig = DEFAULT_WMD_CONFIG) -> NBow:
    """Occurrence-normalized bag of in-vocabulary words.

    Stopwords (if configured) and out-of-vocabulary tokens are dropped
    before counting; support order is first occurrence.
    """
    tokens = doc.tokens()
    if config.remove_stopwords:
        tokens = [t for t in tokens if t not in config.stopwords]
    tokens = [t for t in tokens if t in store]
    if not tokens:
        raise EmptyVectorError(f"document {doc.id!r} has no in-vocabulary tokens")
    counts = Counter(tokens)
    support = tuple(counts)  # Counter preserves first-occurrence order
    weights = np.array([counts[w] for w in support], dtype=float)
    return NBow(support, weights / weights.sum())


def ground_costs(a: NBow, b: NBow, store: EmbeddingStore,
                 config: WmdConfig = DEFAULT_WMD_CONFIG) -> np.ndarray:
    """Pairwise transport costs between the two supports."""
    va = np.stack([store.vector(w) for w in a.support])
    vb = np.stack([store.vector(w) for w in b.support])
    if config.ground_metric == "euclidean":
        diff = va[:, None, :] - vb[None, :, :]
        return np.sqrt((diff * diff).sum(axis=2))
    norms_a = np.linalg.norm(va, axis=1)
    norms_b = np.linalg.norm(vb, axis=1)
    if (norms_a == 0).any() or (norms_b == 0).any():
        raise ZeroNorm("cosine ground metric undefined for zero-norm embedding")
    cos = (va @ vb.T) / np.outer(norms_a, norms_b)
    return np.maximum(1.0 - cos, 0.0)


def _northwest_corner(a, b):
    """Initial basic feasible solution: a staircase of m+n-1 cells."""
    m, n = len(a), len(b)
    X = np.zeros((m, n))
    basis = []
    ra, rb = a.copy(), b.copy()
    i = j = 0
    while True:
        t = min(ra[i], rb[j])
        X[i, j] = t
        basis.append((i, j))
        ra[i] -= t
        rb[j] -= t
        if i == m - 1 and j == n - 1:
            break
        if j == n - 1:
            i += 1
        elif i == m - 1:
            j += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1
    return X, basis


def _duals(basis, C, m, n):
    """Solve u_i + v_j = C_ij over the basis tree, rooted at row 0."""
    u = np.zeros(m)
    v = np.zeros(n)
    adj = defaultdict(list)
    for (i, j) in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    stack = [0]
    seen = {0}
    while stack:
        node = stack.pop()
        for other in adj[node]:
            if other in seen:
                continue
            seen.add(other)
            if other >= m:
                v[other - m] = C[node, other - m] - u[node]
            else:
                u[other] = C[other, node - m] - v[node - m]
            stack.append(other)
    return u, v


def _cycle(basis, enter, m):
    """Entering cell plus the tree path closing its cycle, in cycle order."""
    ei, ej = enter
    adj = defaultdict(list)
    for (i, j) in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    parent = {m + ej: None}
    queue = deque([m + ej])
    while queue:
        node = queue.popleft()
        if node == ei:
            break
        for other in adj[node]:
            if other not in parent:
                parent[other] = node
                queue.append(other)
    nodes = [ei]
    while nodes[-1] != m + ej:
        nodes.append(parent[nodes[-1]])
    nodes.reverse()  # column of enter ... row of enter
    cells = [enter]
    for x, y in zip(nodes, nodes[1:]):
        cells.append((x, y - m) if x < m else (y, x - m))
    return cells


def _transport_simplex(a, b, C, max_pivots=200_000):
    m, n = C.shape
    X, basis = _northwest_corner(np.asarray(a, float), np.asarray(b, float))
    tol = 1e-11 * max(1.0, float(np.abs(C).max()))
    bland_after = max(200, 20 * m * n)
    for pivot in range(max_pivots):
        u, v = _duals(basis, C, m, n)
        red = C - u[:, None] - v[None, :]
        if pivot < bland_after:
            ei, ej = divmod(int(np.argmin(red)), n)
            if red[ei, ej] >= -tol:
                return X
        else:
            cand = np.argwhere(red < -tol)
            if len(cand) == 0:
                return X
            ei, ej = map(int, cand[0])
        cells = _cycle(basis, (ei, ej), m)
        minus = cells[1::2]
        theta = min(X[c] for c in minus)
        leave = min(c for c in minus if X[c] == theta)
        for k, c in enumerate(cells):
            X[c] = X[c] + theta if k % 2 == 0 else X[c] - theta
        X[leave] = 0.0
        np.maximum(X, 0.0, out=X)
        basis[basis.index(leave)] = (ei, ej)
    raise RuntimeError("transport simplex exceeded pivot limit")


def solve_ot(a: NBow, b: NBow, costs) -> TransportPlan:
    """Minimize sum(T*costs) over transport plans between the two weights."""
    costs = np.asarray(costs, dtype=float)
    m, n = len(a.support), len(b.support)
    if costs.shape != (m, n):
        raise ValueError(f"cost matrix shape {costs.shape}, expected {(m, n)}")
    if abs(a.weights.sum() - b.weights.sum()) > MARGINAL_TOL:
        raise InfeasibleMarginals(
            f"marginal sums differ: {a.weights.sum()!r} vs {b.weights.sum()!r}")
    X = _transport_simplex(a.weights, b.weights, costs)
    resid = max(np.abs(X.sum(axis=1) - a.weights).max(),
                np.abs(X.sum(axis=0) - b.weights).max())
    if resid > MARGINAL_TOL:
        raise RuntimeError(f"solver violated marginals by {resid:.3g}")
    return TransportPlan(X, float((X * costs).sum()))


def wmd(doc_a: Document, doc_b: Document, store: EmbeddingStore,
        config: WmdConfig = DEFAULT_WMD_CONFIG) -> float:
    """Exact Word Mover's Distance between two documents."""
    na = nbow(doc_a, store, config)
    nb = nbow(doc_b, store, config)
    return solve_ot(na, nb, ground_costs(na, nb, store, config)).cost


def rwmd_lower_bound(doc_a: Document, doc_b: Document, store: EmbeddingStore,
                     config: WmdConfig = DEFAULT_WMD_CONFIG) -> float:
    """Relaxed WMD: max of the two one-sided nearest-counterpart bounds."""
    na = nbow(doc_a, store, config)
    nb = nbow(doc_b, store, config)
    costs = ground_costs(na, nb, store, config)
    one_sided_a = float(na.weights @ costs.min(axis=1))
    one_sided_b = float(nb.weights @ costs.min(axis=0))
    return max(one_sided_a, one_sided_b)


def wmd_model(store: EmbeddingStore, config: WmdConfig = DEFAULT_WMD_CONFIG):
    """Document-distance function for pairwise_distances."""

    def model(a: Document, b: Document) -> float:
        return wmd(a, b, store, config)

    return model
