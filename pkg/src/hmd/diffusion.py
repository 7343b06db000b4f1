"""First-order derivative r = df/dt of the mediator diffusion.

Vertices are grouped into equivalence classes of equal density. Inside a
class the derivative is fixed by repeatedly peeling off the maximal densest
subset, where the density of X is the net measure rate C(X) it receives
divided by its weight w(X).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .core import Hypergraph, as_vector
from .errors import EmptyClass

DEFAULT_EPS_EQ = 1e-9
ENUMERATION_LIMIT = 20
DELTA_RTOL = 1e-12


@dataclass(frozen=True)
class EdgeConstants:
    cI: np.ndarray
    cS: np.ndarray
    cJ: np.ndarray

    def to_json(self) -> dict:
        return {"cI": self.cI.tolist(), "cS": self.cS.tolist(), "c": self.cJ.tolist()}


@dataclass
class DensestSubsetInstance:
    """One densest-subset problem on a (remaining) equivalence class.

    ``I_sets[e]`` / ``S_sets[e]`` are the parts of I_e(f) / S_e(f) inside ``U``
    for every active edge ``e``. An edge rewards X with ``cI[e]`` when its
    (nonempty) I-part lies inside X and charges ``cS[e]`` when X touches its
    S-part.
    """

    U: tuple
    weights: dict
    cJ: dict
    I_sets: dict = field(default_factory=dict)
    S_sets: dict = field(default_factory=dict)
    cI: dict = field(default_factory=dict)
    cS: dict = field(default_factory=dict)

    @property
    def active_edges(self) -> frozenset:
        return frozenset(self.I_sets) | frozenset(self.S_sets)

    def rate(self, X) -> float:
        """Net incoming measure rate C(X)."""
        X = set(X)
        acc = [self.cJ[j] for j in X]
        acc += [self.cI[e] for e, I in self.I_sets.items() if I and I <= X]
        acc += [-self.cS[e] for e, S in self.S_sets.items() if S & X]
        return math.fsum(acc)

    def density(self, X) -> float:
        return self.rate(X) / math.fsum(self.weights[u] for u in X)


@dataclass
class DerivativeReport:
    r: np.ndarray
    classes: list
    per_class: list
    constants: EdgeConstants
    S_sets: list
    I_sets: list

    @property
    def operator(self) -> np.ndarray:
        return -self.r

    def to_json(self, H: Hypergraph | None = None, full: bool = True) -> dict:
        lab = (lambda v: H.label(v)) if H is not None else (lambda v: v)
        d = {"r": self.r.tolist()}
        if full:
            d["constants"] = self.constants.to_json()
            d["classes"] = [
                {
                    "class": [lab(v) for v in sorted(U)],
                    "peel": [{"P": [lab(v) for v in sorted(P)], "delta": delta} for P, delta in peel],
                }
                for U, peel in self.per_class
            ]
        return d


def equivalence_classes(f, eps_eq: float = 0.0) -> list[list[int]]:
    """Group vertices of (nearly) equal density.

    Values are sorted and split wherever consecutive gaps exceed
    ``eps_eq * span(f)``; ``eps_eq = 0`` gives exact-equality classes.
    Classes come out in increasing order of value.
    """
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        return []
    order = np.argsort(f, kind="stable").tolist()
    vals = f[order].tolist()
    tol = eps_eq * (vals[-1] - vals[0])
    classes = [[order[0]]]
    for k in range(1, len(order)):
        if vals[k] - vals[k - 1] > tol:
            classes.append([])
        classes[-1].append(order[k])
    return classes


def _snap(f: np.ndarray, classes) -> np.ndarray:
    fl = f.tolist()
    for U in classes:
        if len(U) > 1:
            m = math.fsum(fl[i] for i in U) / len(U)
            for i in U:
                fl[i] = m
    return np.array(fl)


def _extrema(H: Hypergraph, f):
    c = H.compiled
    fl = f.tolist()
    his, los, S, I = [], [], [], []
    for vs in c.verts:
        vals = [fl[v] for v in vs]
        hi, lo = max(vals), min(vals)
        his.append(hi)
        los.append(lo)
        if hi == lo:
            s = frozenset(vs)
            S.append(s)
            I.append(s)
        else:
            S.append(frozenset(v for v, x in zip(vs, vals) if x == hi))
            I.append(frozenset(v for v, x in zip(vs, vals) if x == lo))
    return his, los, S, I


def _constants(H: Hypergraph, f, his, los) -> EdgeConstants:
    c = H.compiled
    fl = f.tolist()
    cI = np.zeros(H.m)
    cS = np.zeros(H.m)
    cJ = np.zeros(H.n)
    for k, (vs, w, b0, bs) in enumerate(zip(c.verts, c.w, c.beta0, c.beta)):
        hi, lo = his[k], los[k]
        if hi == lo:
            continue
        direct = b0 * (hi - lo)
        up = down = 0.0
        for v, b in zip(vs, bs):
            if b:
                x = fl[v]
                up += b * (x - lo)
                down += b * (hi - x)
                cJ[v] += b * w * (hi + lo - 2.0 * x)
        cI[k] = w * (direct + up)
        cS[k] = w * (direct + down)
    return EdgeConstants(cI, cS, cJ)


def edge_constants(H: Hypergraph, f) -> EdgeConstants:
    """Per-edge rates c^I_e, c^S_e and per-vertex mediator rates c_j."""
    f = as_vector(H, f)
    his, los, _, _ = _extrema(H, f)
    return _constants(H, f, his, los)


# -- densest subset ----------------------------------------------------------

def _densest_enumerate_small(inst: DensestSubsetInstance):
    U = list(inst.U)
    pos = {u: i for i, u in enumerate(U)}
    rewards = [
        (sum(1 << pos[u] for u in I), inst.cI[e]) for e, I in inst.I_sets.items() if I and inst.cI.get(e, 0.0)
    ]
    charges = [
        (sum(1 << pos[u] for u in S), inst.cS[e]) for e, S in inst.S_sets.items() if S and inst.cS.get(e, 0.0)
    ]
    ws = [inst.weights[u] for u in U]
    cs = [inst.cJ[u] for u in U]
    dens = []
    for mask in range(1, 1 << len(U)):
        rate = wt = 0.0
        for i in range(len(U)):
            if mask >> i & 1:
                rate += cs[i]
                wt += ws[i]
        for m, c in rewards:
            if mask & m == m:
                rate += c
        for m, c in charges:
            if mask & m:
                rate -= c
        dens.append(rate / wt)
    best = max(dens)
    cut = best - DELTA_RTOL * max(1.0, abs(best))
    union = 0
    for mask, d in enumerate(dens, start=1):
        if d >= cut:
            union |= mask
    P = frozenset(u for i, u in enumerate(U) if union >> i & 1)
    return P, inst.density(P)


def _densest_enumerate(inst: DensestSubsetInstance):
    U = list(inst.U)
    k = len(U)
    if k <= 4:
        return _densest_enumerate_small(inst)
    pos = {u: i for i, u in enumerate(U)}
    masks = np.arange(1, 1 << k, dtype=np.int64)
    bits = [(masks >> i) & 1 for i in range(k)]
    weight = sum(b * inst.weights[u] for b, u in zip(bits, U))
    rate = sum(b * inst.cJ[u] for b, u in zip(bits, U)).astype(float)
    for e, I in inst.I_sets.items():
        if I and inst.cI.get(e, 0.0):
            m = sum(1 << pos[u] for u in I)
            rate = rate + np.where((masks & m) == m, inst.cI[e], 0.0)
    for e, S in inst.S_sets.items():
        if S and inst.cS.get(e, 0.0):
            m = sum(1 << pos[u] for u in S)
            rate = rate - np.where((masks & m) != 0, inst.cS[e], 0.0)
    dens = rate / weight
    best = float(dens.max())
    winners = masks[dens >= best - DELTA_RTOL * max(1.0, abs(best))]
    union = int(np.bitwise_or.reduce(winners))
    P = frozenset(u for i, u in enumerate(U) if union >> i & 1)
    return P, inst.density(P)


def _max_closure(inst: DensestSubsetInstance, lam: float):
    """Maximize C(X) - lam * w(X); return (value, maximal maximizer)."""
    G = nx.DiGraph()
    s, t = ("src",), ("sink",)
    G.add_node(s)
    G.add_node(t)
    positive = 0.0
    for u in inst.U:
        a = inst.cJ[u] - lam * inst.weights[u]
        G.add_node(("v", u))
        if a > 0:
            G.add_edge(s, ("v", u), capacity=a)
            positive += a
        elif a < 0:
            G.add_edge(("v", u), t, capacity=-a)
    for e, I in inst.I_sets.items():
        c = inst.cI.get(e, 0.0)
        if I and c > 0:
            G.add_edge(s, ("I", e), capacity=c)
            positive += c
            for u in I:
                G.add_edge(("I", e), ("v", u))
    for e, S in inst.S_sets.items():
        c = inst.cS.get(e, 0.0)
        if S and c > 0:
            G.add_edge(("S", e), t, capacity=c)
            for u in S:
                G.add_edge(("v", u), ("S", e))
    R = nx.algorithms.flow.preflow_push(G, s, t)
    value = positive - R.graph["flow_value"]
    tol = 1e-12 * max(1.0, positive)
    # nodes that can still reach the sink in the residual graph lie outside every maximal closure
    reach = {t}
    stack = [t]
    while stack:
        v = stack.pop()
        for u in R.predecessors(v):
            if u not in reach and R[u][v]["capacity"] - R[u][v]["flow"] > tol:
                reach.add(u)
                stack.append(u)
    X = frozenset(node[1] for node in G if node[0] == "v" and node not in reach)
    return value, X


def _densest_mincut(inst: DensestSubsetInstance):
    lam = inst.density(inst.U)
    for _ in range(10 * len(inst.U) + 100):
        value, X = _max_closure(inst, lam)
        scale = max(1.0, abs(lam)) * math.fsum(inst.weights.values())
        if value <= DELTA_RTOL * scale or not X:
            break
        new = inst.density(X)
        if new <= lam:
            break
        lam = new
    _, P = _max_closure(inst, lam)
    if not P:
        P = frozenset(inst.U)
    return P, inst.density(P)


def densest_subset(inst: DensestSubsetInstance, method: str = "auto"):
    """Maximal subset of ``inst.U`` with the largest density C(X)/w(X).

    ``method`` is ``"enumerate"`` (exhaustive over 2^|U| subsets),
    ``"mincut"`` (Dinkelbach iteration on a project-selection min cut) or
    ``"auto"`` which enumerates up to 20 vertices.
    """
    if not inst.U:
        raise EmptyClass("densest subset of an empty class")
    if len(inst.U) == 1:
        P = frozenset(inst.U)
        return P, inst.density(P)
    if method == "auto":
        method = "enumerate" if len(inst.U) <= ENUMERATION_LIMIT else "mincut"
    if method == "enumerate":
        return _densest_enumerate(inst)
    if method == "mincut":
        return _densest_mincut(inst)
    raise ValueError(f"unknown densest-subset method {method!r}")


# -- derivative --------------------------------------------------------------

def _class_instance(H, U, active, S, I, consts):
    Uset = set(U)
    w = H.vertex_weights
    inst = DensestSubsetInstance(
        U=tuple(sorted(U)),
        weights={u: float(w[u]) for u in U},
        cJ={u: float(consts.cJ[u]) for u in U},
    )
    for e in active:
        Ie, Se = I[e] & Uset, S[e] & Uset
        if Ie:
            inst.I_sets[e] = frozenset(Ie)
            inst.cI[e] = float(consts.cI[e])
        if Se:
            inst.S_sets[e] = frozenset(Se)
            inst.cS[e] = float(consts.cS[e])
    return inst


def _peel(H, U, S, I, consts, method):
    inc = H.compiled.incident
    Uset = set(U)
    active = {e for u in U for e in inc[u] if (I[e] | S[e]) & Uset}
    remaining = sorted(U)
    peel = []
    while remaining:
        inst = _class_instance(H, remaining, active, S, I, consts)
        P, delta = densest_subset(inst, method)
        peel.append((P, delta))
        done = {e for e, Ie in inst.I_sets.items() if Ie <= P}
        done |= {e for e, Se in inst.S_sets.items() if Se & P}
        active -= done
        remaining = [u for u in remaining if u not in P]
    return peel


def derivative(H: Hypergraph, f, eps_eq: float = DEFAULT_EPS_EQ, method: str = "auto") -> DerivativeReport:
    """Compute r = df/dt together with its densest-subset certificate.

    Values within ``eps_eq * span(f)`` of each other are merged into one
    class and snapped to a common value before anything else is computed.
    """
    return _derivative(H, as_vector(H, f), eps_eq, method)


def _derivative(H: Hypergraph, f: np.ndarray, eps_eq: float, method: str = "auto") -> DerivativeReport:
    classes = equivalence_classes(f, eps_eq)
    g = _snap(f, classes) if eps_eq > 0 else f
    his, los, S, I = _extrema(H, g)
    consts = _constants(H, g, his, los)
    w = H.vertex_weights
    inc = H.compiled.incident
    cI, cS, cJ = consts.cI.tolist(), consts.cS.tolist(), consts.cJ.tolist()
    r = np.zeros(H.n)
    per_class = []
    for U in classes:
        if len(U) == 1:
            u = U[0]
            acc = [cJ[u]]
            for e in inc[u]:
                if u in S[e] and cS[e]:
                    acc.append(-cS[e])
                if u in I[e] and cI[e]:
                    acc.append(cI[e])
            delta = math.fsum(acc) / w[u]
            r[u] = delta
            per_class.append((frozenset(U), [(frozenset(U), delta)]))
            continue
        peel = _peel(H, U, S, I, consts, method)
        for P, delta in peel:
            r[list(P)] = delta
        per_class.append((frozenset(U), peel))
    return DerivativeReport(r, classes, per_class, consts, S, I)


def apply_operator(H: Hypergraph, f, eps_eq: float = DEFAULT_EPS_EQ) -> np.ndarray:
    """L_w f = -df/dt on the density space."""
    return -derivative(H, f, eps_eq).r + 0.0


def apply_measure_operator(H: Hypergraph, phi, eps_eq: float = DEFAULT_EPS_EQ) -> np.ndarray:
    w = H.vertex_weights
    return w * apply_operator(H, as_vector(H, phi) / w, eps_eq)


def apply_normalized_operator(H: Hypergraph, x, eps_eq: float = DEFAULT_EPS_EQ) -> np.ndarray:
    sw = np.sqrt(H.vertex_weights)
    return sw * apply_operator(H, as_vector(H, x) / sw, eps_eq)


def lemma_identity_terms(H: Hypergraph, rep: DerivativeReport) -> tuple[float, float]:
    """(sum cI r_I - sum cS r_S + sum c_j r_j, ||r||_w^2) for a report."""
    r = rep.r
    c = rep.constants
    terms = [float(x) for x in c.cJ * r]
    for e in range(H.m):
        if c.cI[e]:
            terms.append(c.cI[e] * min(r[u] for u in rep.I_sets[e]))
        if c.cS[e]:
            terms.append(-c.cS[e] * max(r[u] for u in rep.S_sets[e]))
    return math.fsum(terms), float(np.dot(H.vertex_weights * r, r))
