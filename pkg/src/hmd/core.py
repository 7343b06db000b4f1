"""Hypergraph model, validation and the density / measure / normalized transforms.

Vectors are plain 1-d float arrays of length ``n``. A density vector ``f``
maps to the measure vector ``phi = W f`` and the normalized vector
``x = W^{1/2} f`` where ``W`` is the diagonal matrix of vertex weights.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BetaSumMismatch,
    EmptyEdge,
    IsolatedVertex,
    LengthMismatch,
    NegativeBeta,
    NonPositiveEdgeWeight,
    ValidationError,
)

BETA_TOL = 1e-9


@dataclass(frozen=True)
class Edge:
    vertices: tuple[int, ...]
    weight: float = 1.0
    beta0: float = 1.0
    beta: Mapping[int, float] = field(default_factory=dict)

    def beta_of(self, v: int) -> float:
        return self.beta.get(v, 0.0)


@dataclass(frozen=True)
class EdgeExtrema:
    max_set: frozenset
    min_set: frozenset
    fmax: float
    fmin: float


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable edge-weighted hypergraph with mediator coefficients.

    Use :func:`build` (or :meth:`from_edges`) rather than the constructor so
    the invariants get checked.
    """

    n: int
    edges: tuple[Edge, ...]
    labels: tuple[str, ...] | None = None

    @cached_property
    def vertex_weights(self) -> np.ndarray:
        w = np.zeros(self.n)
        for e in self.edges:
            for v in e.vertices:
                w[v] += e.weight
        w.flags.writeable = False
        return w

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return float(self.vertex_weights.sum())

    @cached_property
    def compiled(self) -> "_Compiled":
        return _Compiled.from_hypergraph(self)

    def label(self, v: int) -> str | int:
        return self.labels[v] if self.labels is not None else v

    def index_of(self, token: str) -> int:
        """Resolve a vertex label (or decimal index) to its integer id."""
        if self.labels is not None and token in self.labels:
            return self.labels.index(token)
        try:
            v = int(token)
        except ValueError:
            raise ValidationError(f"unknown vertex {token!r}") from None
        if not 0 <= v < self.n:
            raise ValidationError(f"vertex {v} out of range")
        return v

    def with_beta0_one(self) -> "Hypergraph":
        """Same edges and weights with every edge set to pure S->I flow."""
        return Hypergraph(
            self.n,
            tuple(Edge(e.vertices, e.weight, 1.0, {}) for e in self.edges),
            self.labels,
        )

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "n": self.n,
            "edges": [
                {
                    "vertices": list(e.vertices),
                    "w": e.weight,
                    "beta0": e.beta0,
                    "beta": {str(k): v for k, v in e.beta.items()},
                }
                for e in self.edges
            ],
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, labels: Sequence[str] | None = None) -> "Hypergraph":
        """Build from ``(vertices, w[, beta0[, beta]])`` tuples or :class:`Edge` objects."""
        raw = []
        for e in edges:
            if isinstance(e, Edge):
                raw.append(e)
                continue
            verts, *rest = e
            w = rest[0] if len(rest) > 0 else 1.0
            b0 = rest[1] if len(rest) > 1 else 1.0
            b = rest[2] if len(rest) > 2 else {}
            raw.append({"vertices": list(verts), "w": w, "beta0": b0, "beta": b})
        return build({"n": n, "edges": raw, "labels": labels})


class _Compiled:
    """Flat per-edge arrays for the hot loops in diffusion and forms."""

    __slots__ = ("verts", "w", "beta0", "beta", "incident", "pairs")

    def __init__(self, verts, w, beta0, beta, incident):
        self.verts = verts
        self.w = w
        self.beta0 = beta0
        self.beta = beta
        self.incident = incident
        # vertex pairs that share at least one edge, as two index arrays
        uniq = sorted({(a, b) for vs in verts for i, a in enumerate(vs) for b in vs[i + 1:]})
        self.pairs = (
            np.array([a for a, _ in uniq], dtype=np.intp),
            np.array([b for _, b in uniq], dtype=np.intp),
        )

    @classmethod
    def from_hypergraph(cls, H: Hypergraph) -> "_Compiled":
        verts = [list(e.vertices) for e in H.edges]
        incident = [[] for _ in range(H.n)]
        for k, vs in enumerate(verts):
            for v in vs:
                incident[v].append(k)
        return cls(
            verts,
            [e.weight for e in H.edges],
            [e.beta0 for e in H.edges],
            [[e.beta_of(v) for v in e.vertices] for e in H.edges],
            incident,
        )


def _edge_from_raw(k: int, raw: Any, n: int) -> Edge:
    if isinstance(raw, Edge):
        verts = list(raw.vertices)
        w, b0, beta = raw.weight, raw.beta0, dict(raw.beta)
    else:
        verts = list(raw.get("vertices", []))
        w = float(raw.get("w", raw.get("weight", 1.0)))
        beta = {int(j): float(b) for j, b in dict(raw.get("beta") or {}).items()}
        b0 = raw.get("beta0")
        b0 = float(b0) if b0 is not None else 1.0 - sum(beta.values())
    if not verts:
        raise EmptyEdge(f"edge {k} has no vertices")
    if len(set(verts)) != len(verts):
        raise ValidationError(f"edge {k} repeats a vertex")
    for v in verts:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < n:
            raise ValidationError(f"edge {k}: vertex {v!r} not in 0..{n - 1}")
    if not (math.isfinite(w) and w > 0):
        raise NonPositiveEdgeWeight(f"edge {k} has weight {w}")
    for j in beta:
        if j not in verts:
            raise ValidationError(f"edge {k}: beta given for non-member vertex {j}")
    coeffs = [b0, *beta.values()]
    if any(not math.isfinite(b) or b < 0 for b in coeffs):
        raise NegativeBeta(f"edge {k} has a negative beta coefficient")
    total = math.fsum(coeffs)
    if abs(total - 1.0) > BETA_TOL:
        raise BetaSumMismatch(f"edge {k}: beta coefficients sum to {total}")
    beta = {int(j): b for j, b in beta.items() if b != 0.0}
    return Edge(tuple(sorted(int(v) for v in verts)), w, float(b0), beta)


def build(raw: Mapping | str) -> Hypergraph:
    """Validate a raw description (dict or JSON text) and return a hypergraph.

    ``beta0`` defaults to ``1 - sum(beta)`` when omitted. Labels, if
    present, must be ``n`` distinct strings.
    """
    if isinstance(raw, str):
        raw = json.loads(raw)
    try:
        n = int(raw["n"])
        raw_edges = raw["edges"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"hypergraph needs 'n' and 'edges': {exc}") from None
    if n < 1:
        raise ValidationError("n must be positive")
    labels = raw.get("labels")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n or len(set(labels)) != n:
            raise ValidationError("labels must be n distinct strings")
    edges = tuple(_edge_from_raw(k, e, n) for k, e in enumerate(raw_edges))
    H = Hypergraph(n, edges, labels)
    isolated = np.flatnonzero(H.vertex_weights <= 0)
    if isolated.size:
        raise IsolatedVertex(f"vertices {isolated.tolist()} lie in no edge")
    return H


def as_vector(H: Hypergraph, f: Any) -> np.ndarray:
    if isinstance(f, Mapping):
        f = f["values"]
    a = np.asarray(f, dtype=float)
    if a.ndim != 1 or a.shape[0] != H.n:
        raise LengthMismatch(f"expected a vector of length {H.n}, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("vector has non-finite entries")
    return a


def to_measure(H: Hypergraph, f) -> np.ndarray:
    return H.vertex_weights * as_vector(H, f)


def to_density(H: Hypergraph, phi) -> np.ndarray:
    return as_vector(H, phi) / H.vertex_weights


def to_normalized(H: Hypergraph, f) -> np.ndarray:
    return np.sqrt(H.vertex_weights) * as_vector(H, f)


def from_normalized(H: Hypergraph, x) -> np.ndarray:
    return as_vector(H, x) / np.sqrt(H.vertex_weights)


def inner_w(H: Hypergraph, f, g) -> float:
    return float(np.dot(H.vertex_weights * as_vector(H, f), as_vector(H, g)))


def norm_w(H: Hypergraph, f) -> float:
    return math.sqrt(max(inner_w(H, f, f), 0.0))


def edge_extrema(e: Edge | Sequence[int], f) -> EdgeExtrema:
    """Argmax / argmin sets of ``f`` on ``e`` under exact comparison.

    When ``f`` is constant on the edge both sets are the whole edge.
    """
    verts = e.vertices if isinstance(e, Edge) else tuple(e)
    vals = [float(f[v]) for v in verts]
    hi, lo = max(vals), min(vals)
    if hi == lo:
        s = frozenset(verts)
        return EdgeExtrema(s, s, hi, lo)
    return EdgeExtrema(
        frozenset(v for v, x in zip(verts, vals) if x == hi),
        frozenset(v for v, x in zip(verts, vals) if x == lo),
        hi,
        lo,
    )


def read_json(source) -> Any:
    """Load JSON from a path, ``-`` (stdin), or an open file."""
    import sys

    if source is None or source == "-":
        return json.load(sys.stdin)
    if hasattr(source, "read"):
        return json.load(source)
    with open(source) as fh:
        return json.load(fh)


def load_hypergraph(source) -> Hypergraph:
    try:
        return build(read_json(source))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad JSON: {exc}") from None


def load_vector(H: Hypergraph, source) -> np.ndarray:
    try:
        return as_vector(H, read_json(source))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad JSON: {exc}") from None
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"vector JSON needs a 'values' list: {exc}") from None
