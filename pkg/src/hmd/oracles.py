"""Brute-force reference computations for tests and acceptance checks.

None of these call the production code they are used to check. Densest
subsets and conductance are enumerated directly, the graph spectrum comes
from an in-repo Jacobi eigensolver, and the Rayleigh minimum is searched
with the quadratic form alone, without the diffusion operator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .core import Hypergraph
from .errors import NotTwoUniform, TooLarge
from .forms import discrepancy_ratio


class Method(str, Enum):
    ENUMERATION = "enumeration"
    DENSE_EIGENSOLVE = "dense_eigensolve"
    RANDOM_DESCENT = "random_descent"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass
class OracleResult:
    value: float
    witness: Any = None
    method: Method = Method.ENUMERATION


def brute_densest_subset(inst, limit: int = 20):
    """Union of all subsets of ``inst.U`` with maximal C(X)/w(X), and that maximum."""
    U = list(inst.U)
    if len(U) > limit:
        raise TooLarge(f"|U|={len(U)} exceeds {limit}")
    results = []
    for k in range(1, len(U) + 1):
        for X in itertools.combinations(U, k):
            Xs = set(X)
            rate = sum(inst.cJ[j] for j in X)
            for e, I in inst.I_sets.items():
                if I and set(I).issubset(Xs):
                    rate += inst.cI[e]
            for e, S in inst.S_sets.items():
                if Xs.intersection(S):
                    rate -= inst.cS[e]
            results.append((rate / sum(inst.weights[u] for u in X), Xs))
    best = max(d for d, _ in results)
    P = set()
    for d, X in results:
        if d >= best - 1e-12 * max(1.0, abs(best)):
            P |= X
    # correctly rounded sums so the reported maximum does not depend on term order
    terms = [inst.cJ[j] for j in P]
    terms += [inst.cI[e] for e, I in inst.I_sets.items() if I and set(I).issubset(P)]
    terms += [-inst.cS[e] for e, S in inst.S_sets.items() if P.intersection(S)]
    return frozenset(P), math.fsum(terms) / math.fsum(inst.weights[u] for u in P)


def brute_conductance(H: Hypergraph, limit: int = 20) -> OracleResult:
    """min over nonempty proper S of max{phi(S), phi(V \\ S)} by plain enumeration."""
    n = H.n
    if n > limit:
        raise TooLarge(f"n={n} exceeds {limit}")
    if n < 2:
        raise TooLarge("conductance needs at least two vertices")
    w = [0.0] * n
    for e in H.edges:
        for v in e.vertices:
            w[v] += e.weight
    total = sum(w)
    best, witness = math.inf, None
    for mask in range(1, (1 << n) - 1):
        inside = [bool(mask >> v & 1) for v in range(n)]
        cut = 0.0
        for e in H.edges:
            hits = sum(inside[v] for v in e.vertices)
            if 0 < hits < len(e.vertices):
                cut += e.weight
        ws = sum(w[v] for v in range(n) if inside[v])
        val = max(cut / ws, cut / (total - ws))
        if val < best:
            best, witness = val, frozenset(v for v in range(n) if inside[v])
    return OracleResult(best, witness, Method.ENUMERATION)


def jacobi_eigenvalues(A, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted ascending."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max()))
    for _ in range(max_sweeps):
        off = math.sqrt(sum(A[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                for k in range(n):
                    akp, akq = A[k, p], A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = A[p, k], A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
    return np.sort(np.diag(A))


def normalized_laplacian_2graph(H: Hypergraph, limit: int = 50) -> np.ndarray:
    """I - W^{-1/2} A W^{-1/2} for a hypergraph whose edges are all plain pairs."""
    if H.n > limit:
        raise TooLarge(f"n={H.n} exceeds {limit}")
    A = np.zeros((H.n, H.n))
    for k, e in enumerate(H.edges):
        if len(e.vertices) != 2 or e.beta0 != 1.0:
            raise NotTwoUniform(f"edge {k} is not a plain pair with beta0 = 1")
        u, v = e.vertices
        A[u, v] += e.weight
        A[v, u] += e.weight
    d = A.sum(axis=1)
    s = 1.0 / np.sqrt(d)
    return np.eye(H.n) - s[:, None] * A * s[None, :]


def dense_eigensolve_2graph(H: Hypergraph) -> np.ndarray:
    """All eigenvalues of the normalized Laplacian of a 2-uniform, beta0 = 1 hypergraph."""
    return jacobi_eigenvalues(normalized_laplacian_2graph(H))


def _golden(fn, lo, hi, iters=60):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


def brute_rayleigh_min(
    H: Hypergraph,
    samples: int = 8,
    iters: int = 200,
    seed: int = 0,
    limit: int = 12,
    q0: bool = False,
) -> OracleResult:
    """Random-restart direction descent on the discrepancy ratio over f perpendicular to 1.

    Each sweep line-searches along every coordinate, along every pair
    e_i + e_j (so tied vertices can move together) and along a few random
    directions. The best value found is an upper bound on gamma_2.
    """
    if H.n > limit:
        raise TooLarge(f"n={H.n} exceeds {limit}")
    n = H.n
    w = H.vertex_weights
    W = float(w.sum())
    rng = np.random.default_rng(seed)

    def proj(f):
        return f - float(np.dot(w, f)) / W

    def D(f):
        f = proj(f)
        if float(np.dot(w * f, f)) < 1e-300:
            return math.inf
        return discrepancy_ratio(H, f, q0=q0)

    eye = np.eye(n)
    fixed_dirs = [eye[i] for i in range(n)]
    fixed_dirs += [eye[i] + eye[j] for i in range(n) for j in range(i + 1, n)]
    fixed_dirs += [eye[i] - eye[j] for i in range(n) for j in range(i + 1, n)]
    best_val, best_f = math.inf, None
    for _ in range(samples):
        f = proj(rng.normal(size=n))
        f /= math.sqrt(float(np.dot(w * f, f)))
        val = D(f)
        for _ in range(iters):
            prev = val
            dirs = fixed_dirs + [rng.normal(size=n) for _ in range(n)]
            for d in dirs:
                d = proj(d)
                nd = math.sqrt(float(np.dot(w * d, d)))
                if nd == 0.0:
                    continue
                d = d / nd
                s = _golden(lambda s: D(f + s * d), -1.0, 1.0, iters=40)
                cand = proj(f + s * d)
                cv = D(cand)
                if cv < val:
                    f = cand / math.sqrt(float(np.dot(w * cand, cand)))
                    val = cv
            if prev - val < 1e-13:
                break
        # report the value of the returned vector itself
        val = discrepancy_ratio(H, f, q0=q0)
        if val < best_val:
            best_val, best_f = val, f
    return OracleResult(best_val, best_f, Method.RANDOM_DESCENT)
