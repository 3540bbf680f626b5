"""Step kernels, step graphons, graphs, and finite measure-preserving maps.

Everything in this package lives on a finite weighted part set: a step
kernel is a symmetric real matrix of block values together with one
strictly positive mass per part (masses sum to 1).  All analytic families
(product kernel, half graphon, ...) enter through grid discretizations.
"""

import json
import math

import numpy as np

WEIGHT_TOL = 1e-12
SYMMETRY_TOL = 1e-9


class GraphonLabError(Exception):
    """Base error for this package."""


class InvalidInputError(GraphonLabError):
    """Raised for malformed kernels, graphs, maps, or arguments."""


class BudgetExceededError(GraphonLabError):
    """Raised when an exact enumeration would exceed its stated budget."""


def _as_finite_array(x, name):
    a = np.asarray(x, dtype=float)
    if a.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains NaN or Inf")
    return a


class StepKernel:
    """Finitely supported symmetric real kernel: part weights + value matrix.

    Construction symmetrizes the value matrix (stored values are
    (A + A^T)/2), drops zero-mass parts, and checks that the weights are
    positive and sum to 1 within 1e-12.
    """

    def __init__(self, weights, values):
        w = _as_finite_array(weights, "weights").ravel()
        V = _as_finite_array(values, "values")
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] != w.size:
            raise InvalidInputError(
                f"values must be an m x m matrix matching {w.size} weights, got {V.shape}"
            )
        if np.any(w < 0):
            raise InvalidInputError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise InvalidInputError(f"weights must sum to 1 within {WEIGHT_TOL}, got {w.sum()!r}")
        keep = w > 0.0
        if not np.all(keep):
            w = w[keep]
            V = V[np.ix_(keep, keep)]
            if w.size == 0:
                raise InvalidInputError("all parts have zero mass")
        V = (V + V.T) / 2.0
        self.weights = w
        self.values = V
        self.weights.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def m(self):
        return self.weights.size

    def __repr__(self):
        return f"{type(self).__name__}(m={self.m})"

    def __eq__(self, other):
        return (
            isinstance(other, StepKernel)
            and self.weights.shape == other.weights.shape
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.values, other.values)
        )

    def l1_norm(self):
        """Weighted L1 norm: sum_ij p_i p_j |values_ij|."""
        return float(np.einsum("i,j,ij->", self.weights, self.weights, np.abs(self.values)))

    def mean(self):
        """Integral of the kernel: sum_ij p_i p_j values_ij."""
        return float(np.einsum("i,j,ij->", self.weights, self.weights, self.values))


class StepGraphon(StepKernel):
    """Step kernel with values in [0, 1]."""

    def __init__(self, weights, values):
        super().__init__(weights, values)
        V = self.values
        if V.min() < -WEIGHT_TOL or V.max() > 1.0 + WEIGHT_TOL:
            raise InvalidInputError(
                f"graphon values must lie in [0, 1], got range [{V.min()!r}, {V.max()!r}]"
            )
        Vc = np.clip(V, 0.0, 1.0)
        Vc.setflags(write=False)
        self.values = Vc


class SimpleGraph:
    """Loopless simple graph on vertices 0..n-1."""

    def __init__(self, n, edges):
        n = int(n)
        if n < 0:
            raise InvalidInputError("vertex count must be nonnegative")
        seen = set()
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidInputError(f"loop at vertex {u} not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInputError(f"edge ({u},{v}) out of range for n={n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidInputError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        self.n = n
        self.edges = sorted(norm)

    def __repr__(self):
        return f"SimpleGraph(n={self.n}, edges={len(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, SimpleGraph) and self.n == other.n and self.edges == other.edges

    def adjacency(self):
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1.0
        return A

    def degrees(self):
        d = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return d


class MultiGraph:
    """Loopless multigraph: unordered edges with multiplicities >= 1."""

    def __init__(self, n, edges, mult=None):
        n = int(n)
        if n < 0:
            raise InvalidInputError("vertex count must be nonnegative")
        if mult is None:
            mult = [1] * len(list(edges))
        edges = list(edges)
        if len(mult) != len(edges):
            raise InvalidInputError("mult must align with edges")
        acc = {}
        for e, k in zip(edges, mult):
            u, v = int(e[0]), int(e[1])
            k = int(k)
            if u == v:
                raise InvalidInputError(f"loop at vertex {u} not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInputError(f"edge ({u},{v}) out of range for n={n}")
            if k < 1:
                raise InvalidInputError("edge multiplicity must be >= 1")
            key = (min(u, v), max(u, v))
            acc[key] = acc.get(key, 0) + k
        self.n = n
        self.edges = sorted(acc)
        self.mult = [acc[e] for e in self.edges]

    def __repr__(self):
        return f"MultiGraph(n={self.n}, edges={len(self.edges)})"

    @property
    def edge_count(self):
        """Total number of edges counted with multiplicity."""
        return sum(self.mult)

    def is_simple(self):
        return all(k == 1 for k in self.mult)

    @classmethod
    def from_simple(cls, g):
        return cls(g.n, g.edges)


class FiniteMPMap:
    """Measure-preserving map between finite weighted part sets.

    sigma[j] gives the target part of source part j; the source mass mapped
    onto each target part must reproduce its weight within 1e-12.
    """

    def __init__(self, source_weights, target_weights, sigma):
        q = _as_finite_array(source_weights, "source_weights").ravel()
        p = _as_finite_array(target_weights, "target_weights").ravel()
        sigma = np.asarray(sigma, dtype=int).ravel()
        if sigma.size != q.size:
            raise InvalidInputError("sigma must assign every source part")
        if sigma.min() < 0 or sigma.max() >= p.size:
            raise InvalidInputError("sigma maps outside the target parts")
        pushed = np.zeros(p.size)
        np.add.at(pushed, sigma, q)
        if np.max(np.abs(pushed - p)) > WEIGHT_TOL:
            raise InvalidInputError(
                f"map is not measure-preserving: pushed-forward masses deviate by {np.max(np.abs(pushed - p))!r}"
            )
        self.source_weights = q
        self.target_weights = p
        self.sigma = sigma

    def __repr__(self):
        return f"FiniteMPMap({self.source_weights.size} -> {self.target_weights.size})"


# ---------------------------------------------------------------------------
# constructors and basic operations
# ---------------------------------------------------------------------------

def graphon_from_graph(g, flavor="vertex"):
    """Adjacency-matrix step graphon of a simple graph.

    Both flavors ("vertex": parts are vertices; "interval": the same matrix
    laid on n uniform interval parts) produce the identical StepGraphon;
    the flag is kept as metadata only, since the two layouts are equivalent.
    """
    if flavor not in ("vertex", "interval"):
        raise InvalidInputError(f"unknown flavor {flavor!r}")
    if g.n == 0:
        raise InvalidInputError("cannot build a graphon from the empty graph")
    W = StepGraphon(np.full(g.n, 1.0 / g.n), g.adjacency())
    W.flavor = flavor
    return W


def pullback(W, phi):
    """Pull-back of a step kernel along a finite measure-preserving map.

    The result has phi's source parts, weights q, and block values
    W.values[sigma(j)][sigma(k)]; it is equivalent to W (cut distance 0).
    """
    if phi.target_weights.size != W.m or np.max(np.abs(phi.target_weights - W.weights)) > WEIGHT_TOL:
        raise InvalidInputError("map target weights do not match the kernel weights")
    V = W.values[np.ix_(phi.sigma, phi.sigma)]
    cls = StepGraphon if isinstance(W, StepGraphon) else StepKernel
    return cls(phi.source_weights, V)


def equalize(W, m):
    """Snap a step kernel onto m uniform parts.

    Parts are laid on [0,1] in index order, the grid cut at k/m, and each
    grid cell takes the value of the part containing its midpoint.  Returns
    the m-uniform-part kernel and the exact L1 distance to W (0 whenever
    every cumulative weight is a multiple of 1/m).
    """
    m = int(m)
    if m < W.m:
        raise InvalidInputError(f"m={m} is smaller than the kernel's part count {W.m}")
    cum = np.concatenate([[0.0], np.cumsum(W.weights)])
    cum[-1] = 1.0
    mids = (np.arange(m) + 0.5) / m
    cell_part = np.clip(np.searchsorted(cum, mids, side="right") - 1, 0, W.m - 1)
    Vq = W.values[np.ix_(cell_part, cell_part)]
    cls = StepGraphon if isinstance(W, StepGraphon) else StepKernel
    Weq = cls(np.full(m, 1.0 / m), Vq)

    # exact L1 error over the common refinement of {k/m} and the part boundaries
    cuts = np.unique(np.concatenate([np.arange(m + 1) / m, cum]))
    lens = np.diff(cuts)
    pos = (cuts[:-1] + cuts[1:]) / 2.0
    orig = np.clip(np.searchsorted(cum, pos, side="right") - 1, 0, W.m - 1)
    grid = np.minimum((pos * m).astype(int), m - 1)
    diff = np.abs(W.values[np.ix_(orig, orig)] - Vq[np.ix_(grid, grid)])
    err = float(np.einsum("a,b,ab->", lens, lens, diff))
    return Weq, err


def builtin(name, m, mode="midpoint", p=None):
    """Built-in analytic families discretized on m uniform parts.

    name: "constant" (value p), "product" (xy), "half" (indicator of
    x+y>1, strict), or "bipartite" (fixed 2-part checkerboard).
    mode "midpoint" evaluates at grid midpoints; "cell_average" averages
    over the cell (for half this puts 1/2 on the anti-diagonal cells; for
    constant and product the two modes coincide because xy factorizes).
    """
    m = int(m)
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    if mode not in ("midpoint", "cell_average"):
        raise InvalidInputError(f"unknown mode {mode!r}")
    w = np.full(m, 1.0 / m)
    if name == "constant":
        if p is None or not (0.0 <= p <= 1.0):
            raise InvalidInputError("constant graphon needs a value p in [0, 1]")
        return StepGraphon(w, np.full((m, m), float(p)))
    if name == "product":
        mid = (np.arange(m) + 0.5) / m
        return StepGraphon(w, np.outer(mid, mid))
    if name == "half":
        i = np.arange(m)
        if mode == "midpoint":
            mid = (i + 0.5) / m
            V = (mid[:, None] + mid[None, :] > 1.0).astype(float)
        else:
            s = i[:, None] + i[None, :]
            V = np.where(s > m - 1, 1.0, np.where(s < m - 1, 0.0, 0.5))
        return StepGraphon(w, V)
    if name == "bipartite":
        if m != 2:
            raise InvalidInputError("bipartite builtin requires m=2")
        return StepGraphon(w, np.array([[0.0, 1.0], [1.0, 0.0]]))
    raise InvalidInputError(f"unknown builtin {name!r}")


def moment(W, k):
    """k-th moment: sum_ij p_i p_j values_ij^k (equals t(M_k, W))."""
    k = int(k)
    if k < 1:
        raise InvalidInputError("moment order must be >= 1")
    return float(np.einsum("i,j,ij->", W.weights, W.weights, W.values ** k))


def marginal(W):
    """First marginal (m1 W)_i = sum_j p_j values_ij; equals the second by symmetry."""
    return W.values @ W.weights


def is_random_free(W, tol=1e-12):
    """True iff the graphon is {0,1}-valued up to tol: integral of W(1-W) <= tol."""
    if not isinstance(W, StepGraphon):
        raise InvalidInputError("random-freeness is defined for step graphons")
    V = W.values
    val = float(np.einsum("i,j,ij->", W.weights, W.weights, V * (1.0 - V)))
    return val <= tol


# ---------------------------------------------------------------------------
# JSON interfaces
# ---------------------------------------------------------------------------
# Kernel JSON: {"weights": [...], "values": [[...]]}
# Graph JSON: {"n": N, "edges": [[u, v], ...]}; MultiGraph adds "mult": [...]
# Readers reject NaN/Inf and asymmetry beyond 1e-9 (then symmetrize).

def _reject_constant(name):
    raise InvalidInputError(f"non-finite JSON constant {name!r} not allowed")


def loads_json(text):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON: {exc}") from exc


def kernel_from_dict(d):
    if not isinstance(d, dict) or "weights" not in d or "values" not in d:
        raise InvalidInputError('kernel JSON needs "weights" and "values"')
    V = _as_finite_array(d["values"], "values")
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InvalidInputError("values must be a square matrix")
    if V.size and np.max(np.abs(V - V.T)) > SYMMETRY_TOL:
        raise InvalidInputError(
            f"values asymmetric beyond {SYMMETRY_TOL}: max deviation {np.max(np.abs(V - V.T))!r}"
        )
    W = StepKernel(d["weights"], V)
    if W.values.min() >= 0.0 and W.values.max() <= 1.0:
        return StepGraphon(W.weights, W.values)
    return W


def kernel_to_dict(W):
    return {"weights": W.weights.tolist(), "values": W.values.tolist()}


def graph_from_dict(d):
    if not isinstance(d, dict) or "n" not in d or "edges" not in d:
        raise InvalidInputError('graph JSON needs "n" and "edges"')
    if "mult" in d:
        return MultiGraph(d["n"], d["edges"], d["mult"])
    return SimpleGraph(d["n"], d["edges"])


def graph_to_dict(g):
    out = {"n": g.n, "edges": [list(e) for e in g.edges]}
    if isinstance(g, MultiGraph):
        out["mult"] = list(g.mult)
    return out


def load_kernel(path):
    with open(path) as fh:
        return kernel_from_dict(loads_json(fh.read()))


def load_graph(path):
    with open(path) as fh:
        return graph_from_dict(loads_json(fh.read()))


def save_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh)
        fh.write("\n")
