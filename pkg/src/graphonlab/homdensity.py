"""Homomorphism densities t(F, W) and the truncated dt metric.

The reference semantics is the weighted sum over all maps of the probe's
vertices into the kernel's parts; it is evaluated as an exact tensor
contraction (einsum), and even cycles additionally get the trace shortcut.
"""

from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .kernels import (
    BudgetExceededError,
    InvalidInputError,
    MultiGraph,
    SimpleGraph,
    StepKernel,
    graphon_from_graph,
)

MAP_BUDGET = 10 ** 8

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _as_probe(F):
    if isinstance(F, SimpleGraph):
        return MultiGraph.from_simple(F)
    if isinstance(F, MultiGraph):
        return F
    raise InvalidInputError("probe must be a SimpleGraph or MultiGraph")


def hom_density(F, W):
    """t(F, W): sum over maps V(F)->parts of the edge-value product times part masses.

    F is a loopless multigraph (or simple graph); W a step kernel, or a
    simple graph G, in which case t(F, G) = t(F, W_G).
    """
    F = _as_probe(F)
    if isinstance(W, SimpleGraph):
        W = graphon_from_graph(W)
    if not isinstance(W, StepKernel):
        raise InvalidInputError("W must be a StepKernel or SimpleGraph")
    if F.n < 1:
        raise InvalidInputError("probe needs at least one vertex")
    if float(W.m) ** F.n > MAP_BUDGET:
        raise BudgetExceededError(
            f"{W.m}^{F.n} maps exceed the {MAP_BUDGET:.0e} budget; "
            "use cycle_density for cycles or estimate by sampling"
        )
    subs = []
    ops = []
    for (u, v), k in zip(F.edges, F.mult):
        subs.append(_LETTERS[u] + _LETTERS[v])
        ops.append(W.values ** k if k > 1 else W.values)
    for x in range(F.n):
        subs.append(_LETTERS[x])
        ops.append(W.weights)
    return float(np.einsum(",".join(subs) + "->", *ops, optimize=True))


def cycle_density(k, W):
    """t(C_k, W) via the trace of the k-th power of M, M_ij = values_ij * p_j.

    k=2 is the doubled edge M_2 (equals moment(W, 2)); k >= 3 are genuine
    cycles.
    """
    k = int(k)
    if k < 2:
        raise InvalidInputError("cycle length must be >= 2")
    if isinstance(W, SimpleGraph):
        W = graphon_from_graph(W)
    M = W.values * W.weights[None, :]
    return float(np.trace(np.linalg.matrix_power(M, k)))


def cycle_graph(k):
    """The k-cycle as a MultiGraph (k=2 gives the doubled edge)."""
    k = int(k)
    if k < 2:
        raise InvalidInputError("cycle length must be >= 2")
    if k == 2:
        return MultiGraph(2, [(0, 1)], [2])
    return MultiGraph(k, [(i, (i + 1) % k) for i in range(k)])


def complete_graph(n):
    return SimpleGraph(n, list(combinations(range(n), 2)))


def parallel_edges(k):
    """M_k: two vertices joined by k parallel edges."""
    return MultiGraph(2, [(0, 1)], [int(k)])


def _canon_code(n, edge_set):
    """Canonical adjacency code: min over vertex permutations of the edge bitmask."""
    pairs = list(combinations(range(n), 2))
    pos = {e: i for i, e in enumerate(pairs)}
    best = None
    for perm in permutations(range(n)):
        code = 0
        for (u, v) in edge_set:
            a, b = perm[u], perm[v]
            code |= 1 << pos[(min(a, b), max(a, b))]
        if best is None or code < best:
            best = code
    return best


@lru_cache(maxsize=None)
def unlabelled_graphs(max_vertices):
    """Fixed enumeration of unlabelled simple graphs on 1..max_vertices vertices.

    Ordered by vertex count, then edge count, then canonical adjacency code
    (minimum over vertex permutations of the upper-triangular bitmask); this
    order is frozen so dt values reproduce bit-for-bit.  Counts per vertex
    number are 1, 2, 4, 11, 34 for 1..5.
    """
    max_vertices = int(max_vertices)
    if not (1 <= max_vertices <= 5):
        raise InvalidInputError("enumeration supported for 1..5 vertices")
    out = []
    for n in range(1, max_vertices + 1):
        pairs = list(combinations(range(n), 2))
        seen = {}
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
            code = _canon_code(n, edges)
            if code not in seen:
                seen[code] = edges
        for code in sorted(seen, key=lambda c: (bin(c).count("1"), c)):
            out.append(SimpleGraph(n, seen[code]))
    return tuple(out)


def _is_connected(g):
    if g.n <= 1:
        return True
    adj = [[] for _ in range(g.n)]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.n


@lru_cache(maxsize=None)
def default_probes(max_vertices=4):
    """Connected simple graphs with at least one edge on <= max_vertices vertices."""
    return tuple(
        g for g in unlabelled_graphs(max_vertices) if g.edges and _is_connected(g)
    )


def dt_distance(W1, W2, max_vertices=5):
    """Truncated dt metric: sum of 2^-n |t(F_n,W1) - t(F_n,W2)| over the enumeration."""
    max_vertices = int(max_vertices)
    if not (1 <= max_vertices <= 5):
        raise InvalidInputError("max_vertices must be between 1 and 5")
    total = 0.0
    for n, F in enumerate(unlabelled_graphs(max_vertices), start=1):
        total += 2.0 ** (-n) * abs(hom_density(F, W1) - hom_density(F, W2))
    return total
