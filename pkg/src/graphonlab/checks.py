"""The acceptance suite: every pinned criterion as a callable check.

Each criterion function returns a dict with "id", "name", "passed", and a
human-readable "detail"; run_all() executes the full battery (the CLI
`check` subcommand prints it as a table, tests/test_acceptance.py asserts
each row).  All randomness is seeded here, so the suite is deterministic.
"""

import math

import numpy as np

from . import cutnorm, examples, sampling, spectral, structure
from .cutdist import Coupling, coupling_cut_norm, cut_distance
from .homdensity import (
    complete_graph,
    cycle_density,
    cycle_graph,
    hom_density,
    unlabelled_graphs,
)
from .kernels import (
    FiniteMPMap,
    StepGraphon,
    StepKernel,
    builtin,
    graphon_from_graph,
    moment,
    pullback,
)


def _random_symmetric(rng, m, lo=-1.0, hi=1.0, zero_diag=False):
    V = rng.uniform(lo, hi, (m, m))
    V = (V + V.T) / 2.0
    if zero_diag:
        np.fill_diagonal(V, 0.0)
    return V


def _random_weights(rng, m):
    w = rng.uniform(0.2, 1.0, m)
    return w / w.sum()


def _random_graphon(rng, m, weights=None):
    V = rng.uniform(0.0, 1.0, (m, m))
    V = (V + V.T) / 2.0
    w = _random_weights(rng, m) if weights is None else weights
    return StepGraphon(w, V)


def _random_pullback_pair(rng):
    """Graphon W plus a refining measure-preserving map with exact 1/m_s weights."""
    m_t = int(rng.integers(2, 5))
    m_s = int(rng.choice([4, 6, 8]))
    counts = np.ones(m_t, dtype=int)
    for _ in range(m_s - m_t):
        counts[rng.integers(0, m_t)] += 1
    sigma = np.repeat(np.arange(m_t), counts)
    rng.shuffle(sigma)
    W = _random_graphon(rng, m_t, weights=counts / m_s)
    phi = FiniteMPMap(np.full(m_s, 1.0 / m_s), W.weights, sigma)
    return W, phi, m_s


def criterion_1():
    """Two-point cut distance (the discrete-atoms example, eps = 0.1)."""
    w = [0.4, 0.6]
    W1 = StepGraphon(w, [[1.0, 0.0], [0.0, 0.0]])
    W2 = StepGraphon(w, [[0.0, 0.0], [0.0, 1.0]])
    C = Coupling([[0.0, 0.4], [0.4, 0.2]])
    v = coupling_cut_norm(W1, W2, C)
    bracket = cut_distance(W1, W2, m=10, budget=8, seed=11)
    ok = (
        abs(v - 0.2) <= 1e-9
        and bracket.lower <= 0.2 + 1e-9
        and 0.2 <= bracket.upper <= 0.2 + 1e-9
    )
    return {
        "id": 1,
        "name": "two-point cut distance",
        "passed": bool(ok),
        "detail": f"coupling value {v:.12f}, bracket [{bracket.lower:.12f}, {bracket.upper:.12f}]",
    }


def criterion_2():
    """Best-possible constants between the cut norm variants."""
    p2, p3 = [0.5, 0.5], [1 / 3] * 3
    A = StepKernel(p2, [[1.0, -1.0], [-1.0, 1.0]])
    r12 = cutnorm.cut_norm(A, "two").value / cutnorm.cut_norm(A, "one").value
    B = StepKernel(p3, [[-1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, -1.0]])
    r31 = cutnorm.cut_norm(B, "three").value / cutnorm.cut_norm(B, "one").value
    Cm = StepKernel(p3, [[0.0, 3.0, -1.0], [3.0, 0.0, -1.0], [-1.0, -1.0, 0.0]])
    r54 = cutnorm.cut_norm(Cm, "five").value / cutnorm.cut_norm(Cm, "four").value
    ok = abs(r12 - 4.0) <= 1e-9 and abs(r31 - 0.5) <= 1e-9 and abs(r54 - 2.0 / 3.0) <= 1e-9
    return {
        "id": 2,
        "name": "norm-constant extremals",
        "passed": bool(ok),
        "detail": f"cn2/cn1={r12:.12f}, cn3/cn1={r31:.12f}, cn5/cn4={r54:.12f}",
    }


def criterion_3():
    """Variant-equivalence inequalities on 200 seeded kernels (zero diagonal)."""
    rng = np.random.default_rng(3)
    failures = 0
    for _ in range(200):
        m = int(rng.integers(2, 7))
        W = StepKernel(_random_weights(rng, m), _random_symmetric(rng, m, zero_diag=True))
        if not cutnorm.check_norm_inequalities(W)["all_pass"]:
            failures += 1
    return {
        "id": 3,
        "name": "norm inequality suite",
        "passed": failures == 0,
        "detail": f"{failures} failures in 200 kernels",
    }


def criterion_4():
    """Complex and Hilbert relaxations: two-point example and 100 random instances."""
    K = StepKernel([0.5, 0.5], [[-0.5, 0.5], [0.5, 0.5]])
    cn2 = cutnorm.cut_norm(K, "two").value
    cnc = cutnorm.cut_norm_complex(K, restarts=8, seed=4).value
    ok = (
        abs(cn2 - 0.25) <= 1e-9
        and cnc >= math.sqrt(2.0) / 4.0 - 1e-6
        and cnc <= math.sqrt(2.0) * cn2 + 1e-9
    )
    rng = np.random.default_rng(44)
    bad = 0
    for t in range(100):
        m = int(rng.integers(2, 6))
        W = StepKernel(_random_weights(rng, m), _random_symmetric(rng, m))
        c2 = cutnorm.cut_norm(W, "two").value
        d_hi = int(rng.integers(1, m + 1))
        h1 = cutnorm.cut_norm_hilbert(W, 1, restarts=2, seed=t).value
        hd = cutnorm.cut_norm_hilbert(W, d_hi, restarts=4, seed=t).value
        if abs(h1 - c2) > 1e-9 or hd > 1.78222 * c2 + 1e-9:
            bad += 1
    return {
        "id": 4,
        "name": "complex/Hilbert relaxations",
        "passed": bool(ok and bad == 0),
        "detail": f"two-point cn2={cn2:.6f} cnc={cnc:.6f}; {bad} failures in 100 Hilbert instances",
    }


def criterion_5():
    """Hadamard kernels: cn2 <= n^(-1/2) while the L1 norm stays 1."""
    bad = []
    for k in range(1, 5):
        W = examples.hadamard_kernel(k)
        cn2 = cutnorm.cut_norm(W, "two").value
        if cn2 > 2.0 ** (-k / 2.0) + 1e-9 or W.l1_norm() != 1.0:
            bad.append(k)
    return {
        "id": 5,
        "name": "Hadamard cut norms",
        "passed": not bad,
        "detail": f"violations at k={bad}" if bad else "k=1..4 within n^(-1/2), L1=1",
    }


def criterion_6():
    """Paley graphs: exhaustive disjoint-subset cut norm against 1/(2 sqrt q)."""
    reports = [examples.paley_check(q) for q in (13, 17)]
    ok = all(r["ok"] for r in reports)
    detail = "; ".join(f"q={r['q']}: cn4={r['cn4']:.6f} <= {r['bound']:.6f}" for r in reports)
    return {"id": 6, "name": "Paley quasirandomness", "passed": bool(ok), "detail": detail}


def criterion_7():
    """Pull-back invariance of norms, moments, densities, and the cut distance."""
    rng = np.random.default_rng(7)
    probes = unlabelled_graphs(4)
    bad = 0
    for _ in range(100):
        W, phi, m_s = _random_pullback_pair(rng)
        Wp = pullback(W, phi)
        ok = True
        for variant in ("one", "two"):
            a = cutnorm.cut_norm(W, variant).value
            b = cutnorm.cut_norm(Wp, variant).value
            ok &= abs(a - b) <= 1e-12
        for k in range(1, 5):
            ok &= abs(moment(W, k) - moment(Wp, k)) <= 1e-12
        for F in probes:
            ok &= abs(hom_density(F, W) - hom_density(F, Wp)) <= 1e-12
        ok &= cut_distance(W, Wp, m=m_s, budget=6, seed=77).upper <= 1e-12
        bad += 0 if ok else 1
    return {
        "id": 7,
        "name": "pull-back invariance",
        "passed": bad == 0,
        "detail": f"{bad} failures in 100 (W, phi) pairs",
    }


def criterion_8():
    """Homomorphism densities, cycle traces, and the C4 sandwich."""
    t33 = hom_density(complete_graph(3), graphon_from_graph(complete_graph(3)))
    ok = abs(t33 - 2.0 / 9.0) <= 1e-12
    rng = np.random.default_rng(8)
    c4 = cycle_graph(4)
    for _ in range(50):
        m = int(rng.integers(2, 6))
        W = StepGraphon(_random_weights(rng, m), (lambda V: (V + V.T) / 2)(rng.uniform(0, 1, (m, m))))
        tc = cycle_density(4, W)
        ok &= abs(tc - hom_density(c4, W)) <= 1e-10
        ok &= abs(spectral.schatten(W, 4) ** 4 - tc) <= 1e-9
    sandwich_bad = 0
    for _ in range(100):
        m = int(rng.integers(2, 6))
        w = _random_weights(rng, m)
        D = StepKernel(w, _random_graphon(rng, m, w).values - _random_graphon(rng, m, w).values)
        cn2 = cutnorm.cut_norm(D, "two").value
        tc4 = cycle_density(4, D)
        if not (0.25 * tc4 <= cn2 + 1e-9 and cn2 <= tc4 ** 0.25 + 1e-9):
            sandwich_bad += 1
    return {
        "id": 8,
        "name": "densities and C4 sandwich",
        "passed": bool(ok and sandwich_bad == 0),
        "detail": f"t(K3,K3)={t33:.12f}; {sandwich_bad} sandwich failures in 100",
    }


def criterion_9():
    """Entropy: exact values, the per-pair gap trend, and random-free rate 0."""
    const_half = builtin("constant", 1, p=0.5)
    ok = True
    for n in range(2, 6):
        per = sampling.exact_entropy(const_half, n) / math.comb(n, 2)
        ok &= abs(per - math.log(2.0)) <= 1e-10
    bip3 = sampling.exact_entropy(builtin("bipartite", 2), 3)
    ok &= abs(bip3 - 2.0 * math.log(2.0)) <= 1e-10
    W = StepGraphon([0.5, 0.5], [[0.2, 0.8], [0.8, 0.2]])
    rate = sampling.entropy_rate(W)
    gaps = [sampling.exact_entropy(W, n) / math.comb(n, 2) - rate for n in range(2, 6)]
    ok &= all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))
    rf_rate = sampling.entropy_rate(graphon_from_graph(complete_graph(3)))
    ok &= rf_rate == 0.0
    return {
        "id": 9,
        "name": "entropy and entropy rate",
        "passed": bool(ok),
        "detail": f"bipartite n=3: {bip3:.9f}; gaps {['%.4f' % g for g in gaps]}; rf rate {rf_rate}",
    }


def criterion_10():
    """Random-free L1-vs-cut-norm inequalities on 100 seeded pairs."""
    rng = np.random.default_rng(10)
    bad = 0
    for _ in range(100):
        m = int(rng.integers(2, 7))
        w = _random_weights(rng, m)
        U = np.triu(rng.integers(0, 2, (m, m)).astype(float), 1)
        V1 = U + U.T
        np.fill_diagonal(V1, rng.integers(0, 2, m).astype(float))
        W1 = StepGraphon(w, V1)
        W2 = _random_graphon(rng, m, w)
        rep = examples.random_free_inequality_check(W1, W2)
        if not (rep["ok_n2"] and rep["ok_sqrt2n"]):
            bad += 1
    return {
        "id": 10,
        "name": "random-free inequalities",
        "passed": bad == 0,
        "detail": f"{bad} violations in 100 pairs",
    }


def criterion_11():
    """Equivalence decisions and purification certificates."""
    rng = np.random.default_rng(11)
    W = _random_graphon(rng, 4)
    counts = np.array([2, 1, 2, 1])
    sigma = np.repeat(np.arange(4), counts)
    q = np.concatenate([[W.weights[i] / c] * c for i, c in enumerate(counts)])
    perm = rng.permutation(len(sigma))
    phi = FiniteMPMap(q[perm], W.weights, sigma[perm])
    W2 = pullback(W, phi)
    verdict, cert = structure.equivalent(W, W2)
    ok = verdict is True and "bijection" in cert
    v2, cert2 = structure.equivalent(builtin("constant", 1, p=0.5), builtin("bipartite", 2))
    ok &= v2 is False and cert2.get("reason") == "moment" and cert2.get("k") == 2
    zero_fail = 0
    for s in range(100):
        rng_s = np.random.default_rng(1100 + s)
        base = _random_graphon(rng_s, int(rng_s.integers(2, 5)))
        counts = rng_s.integers(1, 3, base.m)
        sigma_s = np.repeat(np.arange(base.m), counts)
        q_s = np.concatenate([[base.weights[i] / c] * c for i, c in enumerate(counts)])
        Wd = pullback(base, FiniteMPMap(q_s, base.weights, sigma_s))
        pur = structure.purify(Wd, tol=0.0)
        again = structure.purify(pur.pure, tol=0.0)
        if again.pure.m != pur.pure.m or not np.array_equal(again.pure.values, pur.pure.values):
            zero_fail += 1
            continue
        val = coupling_cut_norm(Wd, pur.pure, Coupling.from_map(pur.quotient_map))
        if val != 0.0:
            zero_fail += 1
    return {
        "id": 11,
        "name": "equivalence and purification",
        "passed": bool(ok and zero_fail == 0),
        "detail": f"certificates ok={ok}; {zero_fail} purification failures in 100 seeds",
    }


def criterion_12():
    """Weak-topology demo: equivalent pull-backs versus the weak limit 1/2."""
    demo = examples.weak_topology_demo([1, 2, 3, 4], budget=6, seed=12)
    ok = abs(demo["t_k3_weak_limit"] - 0.125) <= 1e-12
    for row in demo["rows"]:
        ok &= row["t_k3"] == 0.0 and row["dcut_upper_to_W1"] == 0.0
    return {
        "id": 12,
        "name": "weak-topology discontinuity",
        "passed": bool(ok),
        "detail": f"t(K3,W_n)=0 and dcut upper=0 for n<=4; weak limit t(K3)={demo['t_k3_weak_limit']}",
    }


def criterion_13():
    """Sampling convergence at n=40 and byte-identical replay."""
    W = builtin("constant", 1, p=0.5)
    K3 = complete_graph(3)
    table = sampling.convergence_experiment(W, K3, [40], reps=50, seed=13)
    row = table["rows"][0]
    ok = abs(row["mean"] - 0.125) <= 4.0 * row["stderr"]
    replay = sampling.convergence_experiment(W, K3, [40], reps=50, seed=13)
    ok &= replay == table
    g1 = sampling.sample_graph(W, 40, 13)
    g2 = sampling.sample_graph(W, 40, 13)
    ok &= g1.graph == g2.graph and np.array_equal(g1.types, g2.types)
    return {
        "id": 13,
        "name": "sampling convergence and replay",
        "passed": bool(ok),
        "detail": f"mean={row['mean']:.6f} stderr={row['stderr']:.6f} target 0.125",
    }


ALL_CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
    criterion_13,
)


def run_all():
    return [fn() for fn in ALL_CRITERIA]
