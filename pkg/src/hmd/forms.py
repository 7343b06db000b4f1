"""Quadratic forms, discrepancy ratio, set conductance and pairwise interaction matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Hypergraph, as_vector, edge_extrema
from .errors import TrivialSet, ZeroVector


@dataclass(frozen=True)
class CutResult:
    set: frozenset
    cut_weight: float
    set_weight: float
    conductance: float
    threshold: float | None = None
    complement_conductance: float | None = None

    @property
    def objective(self) -> float:
        """max{phi(S), phi(V \\ S)}, the quantity minimized by the hypergraph conductance."""
        if self.complement_conductance is None:
            return self.conductance
        return max(self.conductance, self.complement_conductance)

    def to_json(self, H: Hypergraph | None = None) -> dict:
        members = sorted(self.set)
        if H is not None:
            members = [H.label(v) for v in members]
        return {
            "set": members,
            "cut_weight": self.cut_weight,
            "set_weight": self.set_weight,
            "conductance": self.conductance,
            "complement_conductance": self.complement_conductance,
            "objective": self.objective,
            "threshold": self.threshold,
        }


def _edge_energy(vals, beta0, betas, q0=False):
    hi, lo = max(vals), min(vals)
    span = hi - lo
    if q0:
        return span * span
    acc = beta0 * span * span
    for b, x in zip(betas, vals):
        if b:
            acc += b * ((hi - x) ** 2 + (x - lo) ** 2)
    return acc


def _form(H: Hypergraph, f, q0: bool) -> float:
    f = as_vector(H, f)
    c = H.compiled
    fl = f.tolist()
    terms = [
        w * _edge_energy([fl[v] for v in vs], b0, bs, q0)
        for vs, w, b0, bs in zip(c.verts, c.w, c.beta0, c.beta)
    ]
    return math.fsum(terms)


def quadratic_form(H: Hypergraph, f) -> float:
    """Mediator-weighted edge energy Q(f)."""
    return _form(H, f, q0=False)


def quadratic_form_q0(H: Hypergraph, f) -> float:
    """Q(f) with every edge treated as pure max-min flow."""
    return _form(H, f, q0=True)


def discrepancy_ratio(H: Hypergraph, f, q0: bool = False) -> float:
    f = as_vector(H, f)
    denom = float(np.dot(H.vertex_weights * f, f))
    if denom == 0.0:
        raise ZeroVector("discrepancy ratio of the zero vector")
    return _form(H, f, q0) / denom


def cut_weight(H: Hypergraph, S) -> float:
    S = set(S)
    return math.fsum(
        e.weight for e in H.edges
        if any(v in S for v in e.vertices) and any(v not in S for v in e.vertices)
    )


def set_weight(H: Hypergraph, S) -> float:
    w = H.vertex_weights
    return math.fsum(w[v] for v in S)


def conductance(H: Hypergraph, S, threshold: float | None = None) -> CutResult:
    """phi(S) together with phi of the complement."""
    S = frozenset(int(v) for v in S)
    if not S or len(S) >= H.n or any(not 0 <= v < H.n for v in S):
        raise TrivialSet("conductance needs a nonempty proper subset of V")
    cut = cut_weight(H, S)
    ws = set_weight(H, S)
    wc = set_weight(H, set(range(H.n)) - S)
    return CutResult(S, cut, ws, cut / ws, threshold, cut / wc)


@dataclass
class InteractionMatrix:
    """Symmetric pairwise interaction matrix A_f.

    ``offdiag`` holds a_uv for u < v; ``diag`` is chosen so that every row
    sums to the vertex weight. Diagonal entries can be negative when a
    mediator carries more than half its edge's mass.
    """

    n: int
    offdiag: dict
    diag: np.ndarray

    def get(self, u: int, v: int) -> float:
        if u == v:
            return float(self.diag[u])
        return self.offdiag.get((min(u, v), max(u, v)), 0.0)

    def dense(self) -> np.ndarray:
        A = np.diag(self.diag.astype(float))
        for (u, v), a in self.offdiag.items():
            A[u, v] = A[v, u] = a
        return A

    def row_sums(self) -> np.ndarray:
        s = self.diag.astype(float).copy()
        for (u, v), a in self.offdiag.items():
            s[u] += a
            s[v] += a
        return s


def _split(rng, k):
    if rng is None:
        return np.full(k, 1.0 / k)
    p = rng.random(k) + 1e-3
    return p / p.sum()


def interaction_matrix(H: Hypergraph, f, rng: np.random.Generator | None = None) -> InteractionMatrix:
    """A feasible pairwise interaction matrix for ``f``.

    With ``rng=None`` each (e, j) mass is split uniformly over its allowed
    pairs (the canonical choice); with a generator the split is random but
    still feasible.
    """
    f = as_vector(H, f)
    off: dict = {}

    def add(u, v, a):
        if u == v or a == 0.0:
            return
        key = (u, v) if u < v else (v, u)
        off[key] = off.get(key, 0.0) + a

    for e in H.edges:
        ext = edge_extrema(e, f)
        if ext.fmax == ext.fmin:
            continue
        S, I = sorted(ext.max_set), sorted(ext.min_set)
        if e.beta0:
            pairs = [(s, i) for s in S for i in I]
            for (s, i), p in zip(pairs, _split(rng, len(pairs))):
                add(s, i, e.weight * e.beta0 * p)
        for j, b in e.beta.items():
            if not b:
                continue
            for s, p in zip(S, _split(rng, len(S))):
                add(s, j, e.weight * b * p)
            for i, p in zip(I, _split(rng, len(I))):
                add(j, i, e.weight * b * p)
    A = InteractionMatrix(H.n, off, np.zeros(H.n))
    A.diag = H.vertex_weights - (A.row_sums())
    return A


def pairwise_energy(A: InteractionMatrix, f) -> float:
    """f^T (W - A) f evaluated as a sum over pairs of a_uv (f_u - f_v)^2."""
    return math.fsum(a * (f[u] - f[v]) ** 2 for (u, v), a in A.offdiag.items())


def verify_quadratic_identity(H: Hypergraph, f, rng: np.random.Generator | None = None) -> float:
    """|f^T (W - A_f) f - Q(f)| for the canonical (or a random feasible) A_f."""
    f = as_vector(H, f)
    A = interaction_matrix(H, f, rng)
    dense = A.dense()
    lhs = float(f @ (H.vertex_weights * f) - f @ dense @ f)
    return abs(lhs - quadratic_form(H, f))
