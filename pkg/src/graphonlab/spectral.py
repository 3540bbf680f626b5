"""Spectrum of the step-kernel integral operator and Schatten norms.

The operator is realized as the symmetric matrix S = D^{1/2} V D^{1/2}
with D = diag(weights); S is similar to V D (the action on part averages),
so it carries the operator's spectrum while staying symmetric for the
eigensolver.
"""

import numpy as np

from .kernels import InvalidInputError
from .homdensity import cycle_density


def operator_matrix(W):
    r = np.sqrt(W.weights)
    return r[:, None] * W.values * r[None, :]


def eigenvalues(W):
    """Eigenvalues of the kernel operator, sorted by decreasing absolute value."""
    lam = np.linalg.eigvalsh(operator_matrix(W))
    return lam[np.argsort(-np.abs(lam), kind="stable")]


def schatten(W, p):
    """Schatten S_p norm (sum |lambda_i|^p)^(1/p); p=2 is the weighted L2 norm of W."""
    p = float(p)
    if p < 1.0:
        raise InvalidInputError("Schatten norm needs p >= 1")
    lam = np.abs(eigenvalues(W))
    if not lam.size:
        return 0.0
    top = lam.max()
    if top == 0.0:
        return 0.0
    # factor out the largest eigenvalue for stable powers
    return float(top * np.sum((lam / top) ** p) ** (1.0 / p))


def opnorm22(W):
    """Operator norm on L2: the largest absolute eigenvalue."""
    return float(np.max(np.abs(eigenvalues(W))))


def spectral_checks(W, p_grid=(3, 4, 6), restarts=20, seed=0):
    """Sandwich inequalities tying the spectrum to the cut norm, for |values| <= 1.

    Verifies cn2 <= |T|_{2,2} <= |T|_{S_p} <= sqrt(2) cn2^{1/2 - 1/p} for each
    p in the grid, and the C4 sandwich t(C4,W)/4 <= cn2 <= t(C4,W)^{1/4}.
    """
    if np.max(np.abs(W.values)) > 1.0 + 1e-12:
        raise InvalidInputError("spectral sandwich requires |values| <= 1")
    from . import cutnorm  # local import to keep module load light

    tol = 1e-9
    cn2 = cutnorm.cut_norm(W, "two", restarts=restarts, seed=seed).value
    op = opnorm22(W)
    c4 = cycle_density(4, W)
    values = {"cn2": cn2, "opnorm22": op, "t_c4": c4,
              "schatten": {p: schatten(W, p) for p in p_grid}}
    checks = {
        "cn2<=opnorm22": cn2 <= op + tol,
        "c4/4<=cn2": 0.25 * c4 <= cn2 + tol,
        "cn2<=c4^(1/4)": cn2 <= c4 ** 0.25 + tol,
    }
    for p in p_grid:
        sp = values["schatten"][p]
        checks[f"opnorm22<=s{p}"] = op <= sp + tol
        checks[f"s{p}<=sqrt2*cn2^(1/2-1/{p})"] = sp <= np.sqrt(2.0) * cn2 ** (0.5 - 1.0 / p) + tol
    return {"values": values, "checks": checks, "all_pass": all(checks.values())}
