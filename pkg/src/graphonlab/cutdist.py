"""Cut distance and L1 distance between step kernels.

Couplings are transportation-polytope matrices and are kept first-class
for certificates; the distance computation itself follows the equal-mass
reduction: both kernels are snapped onto m uniform parts and the cut norm
is minimized over interval permutations (exhaustive for m <= 8, seeded
transposition local search beyond).  Homomorphism densities over small
probes give the lower bound of the bracket.
"""

import math
from itertools import permutations

import numpy as np

from . import cutnorm
from .kernels import InvalidInputError, StepKernel, equalize, moment
from .homdensity import default_probes, hom_density

EXHAUSTIVE_PERM_LIMIT = 8
DEFAULT_M_CAP = 12


class Coupling:
    """Nonnegative matrix with prescribed row/column marginals."""

    def __init__(self, C):
        C = np.asarray(C, dtype=float)
        if C.ndim != 2 or C.size == 0:
            raise InvalidInputError("coupling must be a nonempty matrix")
        if not np.all(np.isfinite(C)) or C.min() < 0.0:
            raise InvalidInputError("coupling entries must be finite and nonnegative")
        self.C = C
        self.m1, self.m2 = C.shape

    def row_marginals(self):
        return self.C.sum(axis=1)

    def col_marginals(self):
        return self.C.sum(axis=0)

    def check_marginals(self, w1, w2, tol=1e-10):
        if self.m1 != len(w1) or self.m2 != len(w2):
            raise InvalidInputError("coupling shape does not match the kernels")
        if np.max(np.abs(self.row_marginals() - w1)) > tol:
            raise InvalidInputError("coupling row sums do not match the first kernel's weights")
        if np.max(np.abs(self.col_marginals() - w2)) > tol:
            raise InvalidInputError("coupling column sums do not match the second kernel's weights")

    @classmethod
    def identity(cls, weights):
        return cls(np.diag(np.asarray(weights, dtype=float)))

    @classmethod
    def product(cls, w1, w2):
        return cls(np.outer(w1, w2))

    @classmethod
    def from_map(cls, phi):
        """Coupling of source and target spaces induced by a measure-preserving map."""
        C = np.zeros((phi.source_weights.size, phi.target_weights.size))
        C[np.arange(phi.sigma.size), phi.sigma] = phi.source_weights
        return cls(C)


class DistanceBracket:
    """Lower and upper bound with the certificates that attain them."""

    def __init__(self, lower, upper, upper_certificate, lower_certificate=None,
                 equalize_errors=(0.0, 0.0), m=None, exact=False):
        self.lower = float(lower)
        self.upper = float(upper)
        self.upper_certificate = upper_certificate
        self.lower_certificate = lower_certificate
        self.equalize_errors = tuple(equalize_errors)
        self.m = m
        self.exact = exact
        if not (0.0 <= self.lower <= self.upper + 1e-9):
            raise InvalidInputError(
                f"inconsistent bracket [{self.lower}, {self.upper}]"
            )

    def __repr__(self):
        return f"DistanceBracket([{self.lower:.6g}, {self.upper:.6g}])"


def refine_by_coupling(W1, W2, coupling):
    """Step kernel of the pulled-back difference on the coupling's product parts.

    Parts are the cells (i, j) with mass C_ij > 0; the value on
    (i,j) x (k,l) is W1_ik - W2_jl (Lemma-style: the norm depends on the
    coupling only through the cell masses).
    """
    coupling.check_marginals(W1.weights, W2.weights)
    idx = np.argwhere(coupling.C > 0.0)
    q = coupling.C[idx[:, 0], idx[:, 1]]
    D = W1.values[np.ix_(idx[:, 0], idx[:, 0])] - W2.values[np.ix_(idx[:, 1], idx[:, 1])]
    return StepKernel(q, D), [tuple(c) for c in idx]


def coupling_cut_norm(W1, W2, coupling, norm="cut", variant="two"):
    """Cut norm (or weighted L1 norm) of the difference under a given coupling."""
    refined, _ = refine_by_coupling(W1, W2, coupling)
    if norm == "l1":
        return refined.l1_norm()
    if norm != "cut":
        raise InvalidInputError(f"unknown norm {norm!r}")
    return cutnorm.cut_norm(refined, variant).value


def _default_m(m1, m2):
    return max(m1, m2, min(math.lcm(m1, m2), DEFAULT_M_CAP))


def _perm_value(p, V1, V2, sigma, objective):
    D = V1 - V2[np.ix_(sigma, sigma)]
    if objective == "l1":
        return float(np.einsum("i,j,ij->", p, p, np.abs(D)))
    return cutnorm.exhaustive_cn2_value(p[:, None] * p[None, :] * D)


def _local_search(p, V1, V2, objective, budget, seed, stop_at):
    m = len(p)
    rng = np.random.default_rng(seed)
    best_val, best_sigma = np.inf, None
    for restart in range(max(1, budget)):
        sigma = np.arange(m) if restart == 0 else rng.permutation(m)
        cur = _perm_value(p, V1, V2, sigma, objective)
        improved = True
        while improved and cur > stop_at + 1e-15:
            improved = False
            pick, pick_val = None, cur
            for i in range(m):
                for j in range(i + 1, m):
                    sigma[i], sigma[j] = sigma[j], sigma[i]
                    v = _perm_value(p, V1, V2, sigma, objective)
                    sigma[i], sigma[j] = sigma[j], sigma[i]
                    if v < pick_val - 1e-15:
                        pick, pick_val = (i, j), v
            if pick is not None:
                i, j = pick
                sigma[i], sigma[j] = sigma[j], sigma[i]
                cur = pick_val
                improved = True
        if cur < best_val:
            best_val, best_sigma = cur, sigma.copy()
        if best_val <= stop_at + 1e-15:
            break
    return best_val, best_sigma


def _exhaustive_perms(p, V1, V2, objective, stop_at, warm_val, warm_sigma):
    best_val, best_sigma = warm_val, warm_sigma
    m = len(p)
    if best_val <= stop_at + 1e-15:
        return best_val, best_sigma
    for perm in permutations(range(m)):
        sigma = np.array(perm)
        v = _perm_value(p, V1, V2, sigma, objective)
        if v < best_val:
            best_val, best_sigma = v, sigma
            if best_val <= stop_at + 1e-15:
                break
    return best_val, best_sigma


def _distance(W1, W2, objective, m, budget, seed):
    if m is None:
        m = _default_m(W1.m, W2.m)
    m = int(m)
    if m < max(W1.m, W2.m):
        raise InvalidInputError(f"m={m} below the larger part count {max(W1.m, W2.m)}")
    W1e, e1 = equalize(W1, m)
    W2e, e2 = equalize(W2, m)
    p = W1e.weights

    if objective == "cut":
        lower, probe = hom_lower_bound(W1, W2)
    else:
        lower, probe = abs(moment(W1, 1) - moment(W2, 1)), None
    # the permutation value cannot drop below max(lower - equalization slack, 0)
    stop_at = max(lower - e1 - e2, 0.0)

    val, sigma = _local_search(p, W1e.values, W2e.values, objective, budget, seed, stop_at)
    exact = False
    if m <= EXHAUSTIVE_PERM_LIMIT:
        val, sigma = _exhaustive_perms(p, W1e.values, W2e.values, objective, stop_at, val, sigma)
        exact = True
    upper = val + e1 + e2
    return DistanceBracket(
        lower,
        upper,
        upper_certificate=sigma.tolist(),
        lower_certificate=probe,
        equalize_errors=(e1, e2),
        m=m,
        exact=exact,
    )


def cut_distance(W1, W2, m=None, budget=20, seed=0):
    """Bracket for the cut distance of two step kernels.

    Upper bound: both kernels equalized to m uniform parts, cut norm of the
    difference minimized over interval permutations (exhaustive for
    m <= 8, otherwise best-improvement transposition search with `budget`
    seeded restarts), plus the two equalization L1 errors.  Lower bound:
    homomorphism-density Lipschitz bound over the built-in probe set.
    """
    return _distance(W1, W2, "cut", m, budget, seed)


def l1_distance(W1, W2, m=None, budget=20, seed=0):
    """Bracket for the L1 (edit) distance; lower bound |int W1 - int W2|."""
    return _distance(W1, W2, "l1", m, budget, seed)


def hom_lower_bound(W1, W2, probes=None):
    """Best cut-distance lower bound |t(F,W1)-t(F,W2)| / |E(F)| over the probes.

    Valid for simple probes only (density continuity fails for multigraphs),
    so probes carrying a parallel edge are rejected.
    """
    if probes is None:
        probes = default_probes(4)
    probes = list(probes)
    if not probes:
        raise InvalidInputError("probe list must be nonempty")
    best, best_probe = 0.0, None
    for F in probes:
        mult = getattr(F, "mult", None)
        if mult is not None and any(k > 1 for k in mult):
            raise InvalidInputError("multigraph probes are invalid for the cut-distance bound")
        ne = len(F.edges)
        if ne == 0:
            continue
        v = abs(hom_density(F, W1) - hom_density(F, W2)) / ne
        if v > best:
            best, best_probe = v, F
    if best_probe is None:
        best_probe = probes[0]
    return best, best_probe
