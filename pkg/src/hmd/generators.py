"""Random hypergraphs and vectors for property tests and experiment scripts."""
from __future__ import annotations

import numpy as np

from .core import Edge, Hypergraph, build


def random_beta(rng: np.random.Generator, verts, mode: str | None = None):
    """Mediator coefficients for one edge.

    ``mode`` is one of ``"direct"`` (beta0 = 1), ``"single"`` (one mediator
    carries everything), ``"uniform"`` (1/|e| each), ``"random"`` or None
    to pick one at random.
    """
    modes = ("direct", "single", "uniform", "random", "random")
    mode = mode or modes[rng.integers(len(modes))]
    k = len(verts)
    if mode == "direct":
        return 1.0, {}
    if mode == "single":
        return 0.0, {int(verts[rng.integers(k)]): 1.0}
    if mode == "uniform":
        return 0.0, {int(v): 1.0 / k for v in verts}
    p = rng.dirichlet(np.ones(k + 1))
    p[rng.random(k + 1) < 0.3] = 0.0
    if p.sum() == 0.0:
        p[0] = 1.0
    p /= p.sum()
    beta = {int(v): float(b) for v, b in zip(verts, p[1:]) if b > 0}
    return float(p[0]), beta


def random_hypergraph(
    rng: np.random.Generator,
    n: int | None = None,
    m: int | None = None,
    max_n: int = 10,
    max_m: int = 15,
    max_edge: int = 4,
    beta_mode: str | None = None,
    integer_weights: bool = False,
) -> Hypergraph:
    """Random hypergraph without isolated vertices (extra edges patch any gaps)."""
    n = n if n is not None else int(rng.integers(2, max_n + 1))
    m = m if m is not None else int(rng.integers(1, max_m + 1))
    edges = []
    for _ in range(m):
        k = int(rng.integers(2, min(max_edge, n) + 1))
        verts = sorted(int(v) for v in rng.choice(n, size=k, replace=False))
        w = float(rng.integers(1, 4)) if integer_weights else float(rng.uniform(0.2, 2.0))
        b0, beta = random_beta(rng, verts, beta_mode)
        edges.append({"vertices": verts, "w": w, "beta0": b0, "beta": beta})
    covered = {v for e in edges for v in e["vertices"]}
    for v in range(n):
        if v not in covered:
            u = int(rng.choice([x for x in range(n) if x != v]))
            verts = sorted((u, v))
            b0, beta = random_beta(rng, verts, beta_mode)
            edges.append({"vertices": verts, "w": 1.0, "beta0": b0, "beta": beta})
    return build({"n": n, "edges": edges})


def random_graph(rng: np.random.Generator, n: int | None = None, max_n: int = 8, p: float = 0.5) -> Hypergraph:
    """Random connected 2-uniform hypergraph with pure direct flow on each edge."""
    n = n if n is not None else int(rng.integers(3, max_n + 1))
    order = rng.permutation(n)
    pairs = {tuple(sorted((int(order[k]), int(order[rng.integers(k)])))) for k in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                pairs.add((u, v))
    edges = [Edge((u, v), float(rng.uniform(0.5, 2.0))) for u, v in sorted(pairs)]
    return Hypergraph.from_edges(n, edges)


def random_vector(rng: np.random.Generator, n: int, ties: bool | None = None) -> np.ndarray:
    """Random density vector; with ``ties`` the values come from a small grid so classes collide."""
    ties = bool(rng.integers(2)) if ties is None else ties
    if ties:
        return rng.integers(-2, 3, size=n).astype(float)
    return rng.normal(size=n)


def random_orthogonal(rng: np.random.Generator, H: Hypergraph, ties: bool = False) -> np.ndarray:
    """Random nonzero f with <f, 1>_w = 0."""
    w = H.vertex_weights
    while True:
        f = random_vector(rng, H.n, ties)
        f = f - np.dot(w, f) / w.sum()
        if np.dot(w * f, f) > 1e-12:
            return f
