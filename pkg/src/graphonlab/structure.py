"""Twins, purification, step-graphon equivalence, and the r_W metrics.

Two parts are twins when their kernel rows agree in the weighted L1 row
metric; merging twin classes yields the pure (twin-free) version of a step
graphon, which is the canonical representative at finite scale: two step
graphons are equivalent iff their purifications match under a
weight-preserving relabelling of parts.
"""

import numpy as np

from .kernels import FiniteMPMap, InvalidInputError, StepGraphon, StepKernel, moment

UNDECIDED = "undecided"
EXACT_SEARCH_LIMIT = 12


def r_metrics(W):
    """(rW, rWW): weighted L1 row distances of W and of W∘W."""
    rW = _row_metric(W.values, W.weights)
    rWW = _row_metric(compose(W).values, W.weights)
    return rW, rWW


def _row_metric(V, w):
    diff = np.abs(V[:, None, :] - V[None, :, :])
    return np.einsum("ikj,j->ik", diff, w)


def compose(W):
    """Kernel of the squared operator: values' = V diag(p) V on the same parts."""
    Vc = W.values @ (W.weights[:, None] * W.values)
    return StepKernel(W.weights, Vc)


def twins(W, tol=1e-9):
    """Partition the parts into twin classes (transitive closure at tolerance tol).

    Parts i, k land in one class iff a chain of row pairs with weighted L1
    distance <= tol connects them; with tol=0 this is an exact equivalence.
    Classes are sorted by their smallest member.
    """
    rW = _row_metric(W.values, W.weights)
    parent = list(range(W.m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(W.m):
        for k in range(i + 1, W.m):
            if rW[i, k] <= tol:
                parent[find(i)] = find(k)
    classes = {}
    for i in range(W.m):
        classes.setdefault(find(i), []).append(i)
    return sorted(classes.values(), key=lambda c: c[0])


class Purification:
    """Result of merging twin classes: the pure graphon plus the quotient data."""

    def __init__(self, pure, quotient_map, classes):
        self.pure = pure
        self.quotient_map = quotient_map
        self.classes = classes

    def __repr__(self):
        return f"Purification({len(self.classes)} classes from {self.quotient_map.source_weights.size} parts)"


def purify(W, tol=1e-9):
    """Merge twin classes until all rows are distinct beyond tol.

    Class values are weight-averaged blocks (exact when tol=0, since twin
    rows agree); weights are summed.  Merging iterates to a fixpoint so the
    output always has pairwise row distances > tol; for tol > 0 the result
    can depend on merge order near the tolerance boundary (no canonical
    choice exists there).
    """
    if not isinstance(W, StepGraphon):
        raise InvalidInputError("purification is defined for step graphons")
    assign = np.arange(W.m)
    cur = W
    while True:
        classes = twins(cur, tol)
        if len(classes) == cur.m:
            break
        w = np.array([cur.weights[c].sum() for c in classes])
        V = np.empty((len(classes), len(classes)))
        for a, ca in enumerate(classes):
            for b, cb in enumerate(classes):
                block = cur.values[np.ix_(ca, cb)]
                if np.all(block == block.flat[0]):
                    # exact twins: keep the value bit-for-bit
                    V[a, b] = block.flat[0]
                else:
                    mass = np.outer(cur.weights[ca], cur.weights[cb])
                    V[a, b] = float((mass * block).sum() / mass.sum())
        relabel = np.empty(cur.m, dtype=int)
        for a, c in enumerate(classes):
            relabel[c] = a
        assign = relabel[assign]
        cur = StepGraphon(w, (V + V.T) / 2.0)
    final_classes = [list(np.flatnonzero(assign == a)) for a in range(cur.m)]
    qmap = FiniteMPMap(W.weights, cur.weights, assign)
    return Purification(cur, qmap, final_classes)


def equivalent(W1, W2, tol=1e-9):
    """Decide step-graphon equivalence (cut distance zero).

    Both inputs are purified; fast rejections compare moments k=1..4 and the
    sorted weight multisets, then a backtracking search looks for a
    weight-preserving part bijection matching values entrywise within tol.
    Returns (verdict, certificate) with verdict True, False, or the string
    "undecided" (purified size beyond the exact-search limit) -- undecided
    is never conflated with False.
    """
    P1 = purify(W1, tol)
    P2 = purify(W2, tol)
    A, B = P1.pure, P2.pure

    for k in range(1, 5):
        ma, mb = moment(A, k), moment(B, k)
        if abs(ma - mb) > max(tol, 1e-9):
            return False, {"reason": "moment", "k": k, "values": [ma, mb]}
    if A.m != B.m:
        return False, {"reason": "part-count", "values": [A.m, B.m]}
    wa, wb = np.sort(A.weights), np.sort(B.weights)
    if np.max(np.abs(wa - wb)) > max(tol, 1e-9):
        return False, {"reason": "weights", "values": [wa.tolist(), wb.tolist()]}
    if A.m > EXACT_SEARCH_LIMIT:
        return UNDECIDED, {"reason": "size", "limit": EXACT_SEARCH_LIMIT, "m": A.m}

    vtol = max(tol, 1e-9)
    # candidate targets per part: matching weight and row multiset
    cands = []
    for i in range(A.m):
        sig = np.sort(A.values[i])
        ci = [
            j
            for j in range(B.m)
            if abs(A.weights[i] - B.weights[j]) <= vtol
            and np.max(np.abs(sig - np.sort(B.values[j]))) <= vtol
        ]
        if not ci:
            return False, {"reason": "row-multiset", "part": i}
        cands.append(ci)

    order = sorted(range(A.m), key=lambda i: len(cands[i]))
    pi = [-1] * A.m
    used = [False] * B.m

    def backtrack(pos):
        if pos == A.m:
            return True
        i = order[pos]
        for j in cands[i]:
            if used[j]:
                continue
            ok = True
            for q in range(pos):
                k = order[q]
                if abs(A.values[i, k] - B.values[j, pi[k]]) > vtol:
                    ok = False
                    break
            if not ok:
                continue
            if abs(A.values[i, i] - B.values[j, j]) > vtol:
                continue
            pi[i] = j
            used[j] = True
            if backtrack(pos + 1):
                return True
            pi[i] = -1
            used[j] = False
        return False

    if backtrack(0):
        return True, {"bijection": list(pi)}
    return False, {"reason": "no-bijection"}
