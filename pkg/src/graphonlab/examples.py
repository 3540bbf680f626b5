"""Extremal instances: Hadamard kernels, Paley graphs, quasirandom checks,
and the weak-topology bipartite demonstration.
"""

import numpy as np

from . import cutnorm
from .cutdist import cut_distance
from .homdensity import complete_graph, hom_density
from .kernels import (
    FiniteMPMap,
    InvalidInputError,
    SimpleGraph,
    StepKernel,
    builtin,
    graphon_from_graph,
    pullback,
)

PALEY_MAX_Q = 101


def hadamard_kernel(k):
    """Symmetric Hadamard step kernel of order 2^k (tensor powers of [[1,1],[1,-1]])."""
    k = int(k)
    if not (1 <= k <= 5):
        raise InvalidInputError("k must be between 1 and 5")
    H = np.array([[1.0, 1.0], [1.0, -1.0]])
    M = H.copy()
    for _ in range(k - 1):
        M = np.kron(M, H)
    n = 1 << k
    return StepKernel(np.full(n, 1.0 / n), M)


def _is_prime(q):
    if q < 2:
        return False
    f = 2
    while f * f <= q:
        if q % f == 0:
            return False
        f += 1
    return True


def paley_graph(q):
    """Paley graph on F_q (q prime, q = 1 mod 4): x ~ y iff x - y is a nonzero square."""
    q = int(q)
    if q > PALEY_MAX_Q:
        raise InvalidInputError(f"q capped at {PALEY_MAX_Q}")
    if not _is_prime(q) or q % 4 != 1:
        raise InvalidInputError("q must be a prime congruent to 1 mod 4")
    residues = {(x * x) % q for x in range(1, q)}
    edges = [(x, y) for x in range(q) for y in range(x + 1, q) if (x - y) % q in residues]
    return SimpleGraph(q, edges)


def disjoint_subset_cut_norm(W):
    """Exact max over disjoint part subsets S, T of |sum_{S x T} p_i p_j K_ij|.

    The 3^m assignment enumeration, run as 2^m subsets S with the exact
    optimal T read off the signed column sums.  This is the combinatorial
    variant-four value; unlike cut_norm(..., "four") it carries no
    fractional-split correction, so it applies to graph-minus-constant
    kernels whose diagonal is nonzero.
    """
    p = W.weights
    P = p[:, None] * p[None, :] * W.values
    best = 0.0
    for _, A in cutnorm._row_chunks(W.m):
        C = A @ P
        allowed = 1.0 - A
        pos = (np.maximum(C, 0.0) * allowed).sum(axis=1)
        neg = (np.maximum(-C, 0.0) * allowed).sum(axis=1)
        best = max(best, float(pos.max()), float(neg.max()))
    return best


def paley_check(q):
    """Quasirandomness of the Paley graph against the constant-1/2 graphon.

    Reports the exhaustive disjoint-subset cut norm of W_{P_q} - 1/2 and the
    derived expander-mixing bound 1/(2 sqrt q).
    """
    g = paley_graph(q)
    W = graphon_from_graph(g)
    diff = StepKernel(W.weights, W.values - 0.5)
    value = disjoint_subset_cut_norm(diff)
    bound = 1.0 / (2.0 * np.sqrt(q))
    return {
        "q": q,
        "degree": int(g.degrees()[0]),
        "cn4": value,
        "bound": bound,
        "ok": bool(value <= bound + 1e-9),
    }


def random_free_inequality_check(W1, W2, restarts=20, seed=0):
    """Check the L1-versus-cut-norm inequalities for a random-free step graphon.

    W1 must be {0,1}-valued on the same parts as W2 (an n-step random-free
    graphon); then |W1 - W2|_1 <= n^2 cn1(W1 - W2) and, sharper,
    |W1 - W2|_1 <= sqrt(2n) cn2(W1 - W2).
    """
    V1 = W1.values
    if np.max(np.abs(V1 * (1.0 - V1))) > 1e-12:
        raise InvalidInputError("W1 must be {0,1}-valued (random-free)")
    if W1.m != W2.m or np.max(np.abs(W1.weights - W2.weights)) > 1e-12:
        raise InvalidInputError("both graphons must live on the same parts")
    n = W1.m
    diff = StepKernel(W1.weights, V1 - W2.values)
    l1 = diff.l1_norm()
    cn1 = cutnorm.cut_norm(diff, "one", restarts=restarts, seed=seed).value
    cn2 = cutnorm.cut_norm(diff, "two", restarts=restarts, seed=seed).value
    tol = 1e-9
    return {
        "n": n,
        "l1": l1,
        "cn1": cn1,
        "cn2": cn2,
        "bound_n2": n ** 2 * cn1,
        "bound_sqrt2n": float(np.sqrt(2.0 * n)) * cn2,
        "ok_n2": bool(l1 <= n ** 2 * cn1 + tol),
        "ok_sqrt2n": bool(l1 <= np.sqrt(2.0 * n) * cn2 + tol),
    }


def hadamard_ratio_table(k_max=4):
    """L1 / cn2 ratios of the Hadamard kernels against sqrt(n).

    The family shows the sqrt(n) order in the random-free inequality is
    necessary; rendered as a report figure, never asserted.
    """
    rows = []
    for k in range(1, k_max + 1):
        W = hadamard_kernel(k)
        n = W.m
        cn2 = cutnorm.cut_norm(W, "two").value
        l1 = W.l1_norm()
        rows.append({"k": k, "n": n, "l1": l1, "cn2": cn2,
                     "ratio": l1 / cn2, "sqrt_n": float(np.sqrt(n))})
    return rows


def interleaving_map(n):
    """The 2n-part interleaving refinement of the two-part space (parts alternate)."""
    n = int(n)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    return FiniteMPMap(
        np.full(2 * n, 0.5 / n), np.array([0.5, 0.5]), np.arange(2 * n) % 2
    )


def weak_topology_demo(n_list, budget=20, seed=0):
    """Bipartite pull-backs W_n: equivalent to W_1, yet weakly convergent to 1/2.

    For each n the 2n-part interleaved pull-back of the bipartite graphon
    keeps t(K3) = 0, edge density 1/2, and cut distance 0 to W_1, while the
    weak limit (constant 1/2) has t(K3) = 1/8: the triangle density is not
    weakly continuous.
    """
    W1 = builtin("bipartite", 2)
    K2, K3 = complete_graph(2), complete_graph(3)
    t3_limit = hom_density(K3, builtin("constant", 1, p=0.5))
    rows = []
    for n in n_list:
        Wn = pullback(W1, interleaving_map(n))
        bracket = cut_distance(Wn, W1, m=2 * int(n), budget=budget, seed=seed)
        rows.append(
            {
                "n": int(n),
                "parts": Wn.m,
                "t_k2": hom_density(K2, Wn),
                "t_k3": hom_density(K3, Wn),
                "dcut_upper_to_W1": bracket.upper,
            }
        )
    return {"t_k3_weak_limit": t3_limit, "rows": rows}
