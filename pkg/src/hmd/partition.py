"""Rounding vectors to low-conductance cuts and the end-to-end spectral partitioner."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Hypergraph, as_vector
from .errors import AllZero, NotOrthogonal, TooLarge, ZeroVector
from .forms import CutResult, conductance, quadratic_form_q0
from .spectral import FlowConfig, SpectralEstimate, estimate_gamma2

EXACT_LIMIT = 20
ORTHO_TOL = 1e-6


@dataclass
class CenteredSplit:
    c: float
    g: np.ndarray
    g_plus: np.ndarray
    g_minus: np.ndarray

    def supports(self) -> tuple[frozenset, frozenset]:
        return (
            frozenset(np.flatnonzero(self.g_plus).tolist()),
            frozenset(np.flatnonzero(self.g_minus).tolist()),
        )


@dataclass
class CheegerCertificate:
    gamma2_hat: float
    gamma2_0_hat: float
    phi_cut: float
    lower: float
    upper2: float
    upper_sqrt2: float
    phi_H: float | None = None
    satisfied: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "gamma2_hat": self.gamma2_hat,
            "gamma2_0_hat": self.gamma2_0_hat,
            "phi_cut": self.phi_cut,
            "lower": self.lower,
            "upper2": self.upper2,
            "upper_sqrt2": self.upper_sqrt2,
            "phi_H": self.phi_H,
            "satisfied": self.satisfied,
        }


def sweep_bound(H: Hypergraph, f) -> float:
    """sqrt(2 Q0(f) / ||f||_w^2), the guarantee a sweep over f meets."""
    f = as_vector(H, f)
    nf2 = float(np.dot(H.vertex_weights * f, f))
    if nf2 == 0.0:
        raise ZeroVector("sweep bound of the zero vector")
    return math.sqrt(2.0 * quadratic_form_q0(H, f) / nf2)


def center_vector(H: Hypergraph, f) -> CenteredSplit:
    """Shift f by its lower weighted median and split into signed parts.

    The shift ``c`` is the smallest value of ``f`` with at most half of the
    total weight strictly above it, so each of supp(g+) and supp(g-) carries
    at most half the weight.
    """
    f = as_vector(H, f)
    if not np.any(f):
        raise ZeroVector("cannot center the zero vector")
    w = H.vertex_weights
    half = float(w.sum()) / 2.0
    order = np.argsort(f, kind="stable")
    vals = f[order]
    above = float(w.sum())
    c = float(vals[-1])  # always qualifies: nothing lies above the maximum
    k = 0
    while k < len(vals):
        v = vals[k]
        j = k
        while j < len(vals) and vals[j] == v:
            above -= w[order[j]]
            j += 1
        if above <= half:
            c = float(v)
            break
        k = j
    g = f - c
    return CenteredSplit(c, g, np.maximum(g, 0.0), np.minimum(g, 0.0))


def sweep_cut(H: Hypergraph, f) -> CutResult:
    """Best level set {u : f_u^2 >= t} over the thresholds t in {f_u^2 : f_u != 0}.

    Level sets equal to all of V are skipped since they are not cuts.
    """
    f = as_vector(H, f)
    if not np.any(f):
        raise ZeroVector("sweep over the zero vector")
    sq = f * f
    best = None
    for t in sorted(set(sq[sq > 0].tolist()), reverse=True):
        S = np.flatnonzero(sq >= t)
        if len(S) == H.n:
            continue
        res = conductance(H, S.tolist(), threshold=t)
        if best is None or res.conductance < best.conductance:
            best = res
    if best is None:
        raise AllZero("no proper level set to sweep")
    return best


def two_sided_sweep(H: Hypergraph, f) -> CutResult:
    """Center f, sweep g+ and |g-| separately and keep the better cut.

    ``f`` must be w-orthogonal to the ones vector up to 1e-6 relative. The
    returned set never holds more than half of the total vertex weight.
    """
    f = as_vector(H, f)
    w = H.vertex_weights
    nf = math.sqrt(float(np.dot(w * f, f)))
    if nf == 0.0:
        raise ZeroVector("two-sided sweep of the zero vector")
    along_one = abs(float(np.dot(w, f))) / math.sqrt(float(w.sum()))
    if along_one > ORTHO_TOL * nf:
        raise NotOrthogonal(f"<f,1>_w component {along_one:.3g} exceeds {ORTHO_TOL} * ||f||_w")
    split = center_vector(H, f)
    best = None
    for side in (split.g_plus, -split.g_minus):
        if not np.any(side):
            continue
        res = sweep_cut(H, side)
        if best is None or res.conductance < best.conductance:
            best = res
    if best is None:
        raise AllZero("both halves of the centered vector vanish")
    return best


def exact_conductance(H: Hypergraph) -> tuple[CutResult, float]:
    """Hypergraph conductance by enumerating every nonempty proper subset.

    Returns the first minimizer (in bitmask order) of max{phi(S), phi(V\\S)}.
    """
    n = H.n
    if n > EXACT_LIMIT:
        raise TooLarge(f"exact conductance enumerates 2^n subsets; n={n} > {EXACT_LIMIT}")
    if n < 2:
        raise TooLarge("conductance needs at least two vertices")
    masks = np.arange(1, (1 << n) - 1, dtype=np.int64)
    w = H.vertex_weights
    ws = np.zeros(masks.shape)
    for v in range(n):
        ws += np.where((masks >> v) & 1, w[v], 0.0)
    cut = np.zeros(masks.shape)
    for e in H.edges:
        em = sum(1 << v for v in e.vertices)
        inside = masks & em
        cut += np.where((inside != 0) & (inside != em), e.weight, 0.0)
    obj = np.maximum(cut / ws, cut / (float(w.sum()) - ws))
    k = int(np.argmin(obj))
    mask = int(masks[k])
    res = conductance(H, [v for v in range(n) if mask >> v & 1])
    return res, res.objective


def spectral_partition(H: Hypergraph, cfg: FlowConfig = FlowConfig(), exact: bool | None = None):
    """Estimate gamma_2 (and its beta0 = 1 counterpart), sweep, and certify.

    Both eigenvector estimates are swept and the better cut is returned, so
    the cut meets 2 sqrt(gamma2_hat) and sqrt(2 gamma2_0_hat) at once. With
    ``exact`` (default: n <= 12) the true conductance is enumerated too.
    """
    est: SpectralEstimate = estimate_gamma2(H, cfg)
    H0 = H.with_beta0_one()
    est0: SpectralEstimate = estimate_gamma2(H0, cfg)
    cut = None
    for vec in (est.eigvec, est0.eigvec):
        res = two_sided_sweep(H, vec)
        if cut is None or res.conductance < cut.conductance:
            cut = res
    g, g0 = est.gamma2, est0.gamma2
    cert = CheegerCertificate(
        gamma2_hat=g,
        gamma2_0_hat=g0,
        phi_cut=cut.conductance,
        lower=g / 2.0,
        upper2=2.0 * math.sqrt(max(g, 0.0)),
        upper_sqrt2=math.sqrt(2.0 * max(g0, 0.0)),
    )
    slack = 1e-9
    cert.satisfied = {
        "cut_le_2sqrt_gamma2": cut.objective <= cert.upper2 + slack,
        "cut_le_sqrt_2gamma2_0": cut.objective <= cert.upper_sqrt2 + slack,
        "lower_le_cut": cert.lower <= cut.objective + slack,
        "gamma2_le_gamma2_0_le_2gamma2": g - 1e-2 <= g0 <= 2.0 * g + 1e-2,
    }
    if exact is None:
        exact = H.n <= 12
    if exact:
        _, phi_H = exact_conductance(H)
        cert.phi_H = phi_H
        cert.satisfied["lower_le_phi_H"] = cert.lower <= phi_H + 1e-2
        cert.satisfied["phi_H_le_2sqrt_gamma2"] = phi_H <= cert.upper2 + slack
        cert.satisfied["phi_H_le_sqrt_2gamma2_0"] = phi_H <= cert.upper_sqrt2 + 1e-2
    return cut, cert
