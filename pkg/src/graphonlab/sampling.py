"""W-random graphs G(n, W), exact small-n distributions, and entropy.

RNG convention: numpy's PCG64 behind numpy.random.Generator, seeded with
the given integer.  The stream is split in a fixed order -- first the n
part draws (one uniform each), then the C(n,2) edge coins in row-major
upper-triangular order -- so a (W, n, seed) triple replays to the
identical graph.  Natural logarithms throughout (h(1/2) = log 2).
"""

import math
from itertools import product

import numpy as np

from .kernels import (
    BudgetExceededError,
    InvalidInputError,
    SimpleGraph,
    StepGraphon,
    graphon_from_graph,
)
from .homdensity import hom_density

DIST_BUDGET = 10 ** 8


class SampledGraph:
    """A G(n, W) draw: the graph, the sampled part indices, and the seed."""

    def __init__(self, graph, types, seed):
        self.graph = graph
        self.types = np.asarray(types, dtype=int)
        self.seed = int(seed)

    def __repr__(self):
        return f"SampledGraph(n={self.graph.n}, seed={self.seed})"


def sample_graph(W, n, seed):
    """Sample G(n, W): parts i.i.d. from the weights, then independent edge coins."""
    if not isinstance(W, StepGraphon):
        raise InvalidInputError("sampling needs a step graphon")
    n = int(n)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    cum = np.cumsum(W.weights)
    cum[-1] = 1.0
    types = np.searchsorted(cum, rng.random(n), side="right")
    coins = rng.random(n * (n - 1) // 2)
    edges = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if coins[k] < W.values[types[i], types[j]]:
                edges.append((i, j))
            k += 1
    return SampledGraph(SimpleGraph(n, edges), types, seed)


def pair_index(i, j, n):
    """Bit position of edge (i, j), i < j, in the row-major upper-triangular key."""
    if not (0 <= i < j < n):
        raise InvalidInputError("need 0 <= i < j < n")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def exact_distribution(W, n):
    """Exact law of G(n, W) over labeled graphs.

    Keys are C(n,2)-bit integers, bit k (LSB first) set iff the k-th pair in
    row-major upper-triangular order is an edge.  Probabilities sum to 1.
    """
    if not isinstance(W, StepGraphon):
        raise InvalidInputError("exact distribution needs a step graphon")
    n = int(n)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    npairs = n * (n - 1) // 2
    if float(W.m) ** n * 2.0 ** npairs > DIST_BUDGET:
        raise BudgetExceededError(
            f"{W.m}^{n} * 2^{npairs} exceeds the {DIST_BUDGET:.0e} budget"
        )
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    probs = np.zeros(1 << npairs)
    for tau in product(range(W.m), repeat=n):
        wt = float(np.prod(W.weights[list(tau)]))
        acc = np.array([wt])
        for (i, j) in pairs:
            pe = W.values[tau[i], tau[j]]
            acc = np.concatenate([acc * (1.0 - pe), acc * pe])
        probs += acc
    return {key: float(probs[key]) for key in range(1 << npairs)}


def exact_entropy(W, n):
    """Entropy (natural log) of the exact G(n, W) distribution."""
    dist = exact_distribution(W, n)
    return float(-sum(p * math.log(p) for p in dist.values() if p > 0.0))


def binary_entropy(p):
    """h(p) = -p log p - (1-p) log(1-p), continuously extended by h(0)=h(1)=0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def entropy_rate(W):
    """Limit of Ent(G(n,W)) / C(n,2): the weighted average of h(values).

    Zero exactly for random-free graphons.
    """
    if not isinstance(W, StepGraphon):
        raise InvalidInputError("entropy rate needs a step graphon")
    h = np.vectorize(binary_entropy)(W.values)
    return float(np.einsum("i,j,ij->", W.weights, W.weights, h))


def convergence_experiment(W, F, n_list, reps, seed):
    """Monte-Carlo table of t(F, G(n, W)) against the limit t(F, W).

    For each n: `reps` samples with per-rep seeds seed XOR rep, mean and
    standard error of the probe density in the sampled graph.
    """
    mult = getattr(F, "mult", None)
    if mult is not None and any(k > 1 for k in mult):
        raise InvalidInputError("convergence probes must be simple graphs")
    reps = int(reps)
    if reps < 2:
        raise InvalidInputError("need reps >= 2 for a standard error")
    reference = hom_density(F, W)
    rows = []
    for n in n_list:
        vals = np.empty(reps)
        for rep in range(reps):
            g = sample_graph(W, n, int(seed) ^ rep)
            vals[rep] = hom_density(F, graphon_from_graph(g.graph))
        rows.append(
            {
                "n": int(n),
                "reps": reps,
                "mean": float(vals.mean()),
                "stderr": float(vals.std(ddof=1) / math.sqrt(reps)),
            }
        )
    return {"reference": reference, "rows": rows}
