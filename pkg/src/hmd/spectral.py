"""Gradient flow of the Rayleigh quotient and second-eigenvalue estimation.

The flow ``df/dt = -L_w f`` is integrated with explicit Euler steps. After
every step the iterate is projected back onto the w-orthogonal complement
of the all-ones vector and (optionally) rescaled to unit w-norm, which
leaves the Rayleigh quotient unchanged.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Hypergraph, as_vector
from .diffusion import DEFAULT_EPS_EQ, _derivative, derivative, equivalence_classes
from .errors import NotDifferentiableHere, SingleVertex, StepTooLarge, ZeroVector

log = logging.getLogger(__name__)

LAMBDA_BOUND = 2.0


def monotone_slack(dt: float) -> float:
    """Allowed per-step increase of the Rayleigh quotient."""
    return 1e-9 + 10.0 * dt * dt


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 0.01 / LAMBDA_BOUND
    t_max: float = 60.0
    tol_residual: float = 1e-6
    restarts: int = 8
    seed: int = 0
    renormalize: bool = True
    project: bool = True
    eps_eq: float = DEFAULT_EPS_EQ
    halve_on_violation: bool = True
    snap_ties: bool = True
    max_halvings: int = 40
    regrow_after: int = 50
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass
class FlowResult:
    f: np.ndarray
    rayleigh: float
    residual: float
    t: float
    steps: int
    halvings: int
    converged: bool
    trajectory: list = field(default_factory=list)
    events: int = 0


@dataclass
class SpectralEstimate:
    gamma2: float
    eigvec: np.ndarray
    residual: float
    trajectory: list
    restarts_used: int
    converged: bool
    seed: int = 0
    finals: list = field(default_factory=list)
    runs: list = field(default_factory=list, repr=False)

    def to_json(self, with_trajectory: bool = False) -> dict:
        d = {
            "gamma2": self.gamma2,
            "eigvec": self.eigvec.tolist(),
            "residual": self.residual,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "seed": self.seed,
            "restart_rayleigh": self.finals,
        }
        if with_trajectory:
            d["trajectory"] = [list(p) for p in self.trajectory]
        return d


def project_orthogonal(H: Hypergraph, f) -> np.ndarray:
    """Remove the w-weighted mean: f - (<f,1>_w / <1,1>_w) 1."""
    f = as_vector(H, f)
    w = H.vertex_weights
    return f - float(np.dot(w, f)) / float(w.sum())


def rayleigh(H: Hypergraph, f, eps_eq: float = DEFAULT_EPS_EQ) -> float:
    """<f, L_w f>_w / <f, f>_w using the diffusion operator."""
    f = as_vector(H, f)
    w = H.vertex_weights
    nf2 = float(np.dot(w * f, f))
    if nf2 == 0.0:
        raise ZeroVector("Rayleigh quotient of the zero vector")
    r = derivative(H, f, eps_eq).r
    return float(np.dot(w * f, -r)) / nf2


@dataclass
class _State:
    f: np.ndarray
    r: np.ndarray
    norm2: float
    rayleigh: float
    residual: float


def _state(H: Hypergraph, f: np.ndarray, eps_eq: float) -> _State:
    w = H.vertex_weights
    r = _derivative(H, f, eps_eq).r
    wf = w * f
    nf2 = float(np.dot(wf, f))
    R = -float(np.dot(wf, r)) / nf2
    res = -r - R * f
    return _State(f, r, nf2, R, math.sqrt(max(float(np.dot(w * res, res)) / nf2, 0.0)))


def _next_collision(H: Hypergraph, f: np.ndarray, r: np.ndarray, h: float):
    """Earliest time in (0, h) at which two vertices sharing an edge meet.

    Returns ``(step, pairs)`` where ``pairs`` lists the colliding vertex
    pairs, or ``(h, [])`` when nothing collides within the step.
    """
    pu, pv = H.compiled.pairs
    if pu.size == 0:
        return h, []
    d = f[pu] - f[pv]
    c = r[pu] - r[pv]
    closing = d * c < 0
    if not closing.any():
        return h, []
    tau = -d[closing] / c[closing]
    first = float(tau.min())
    if first >= h:
        return h, []
    hit = tau <= first * (1.0 + 1e-9)
    return first, list(zip(pu[closing][hit].tolist(), pv[closing][hit].tolist()))


def _snap_pairs(H: Hypergraph, g: np.ndarray, pairs) -> np.ndarray:
    """Give every colliding pair (and anything exactly tied with it) one common value."""
    w = H.vertex_weights
    parent = list(range(H.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_value: dict = {}
    for v, x in enumerate(g.tolist()):
        by_value.setdefault(x, []).append(v)
    for group in by_value.values():
        for v in group[1:]:
            parent[find(v)] = find(group[0])
    for a, b in pairs:
        parent[find(a)] = find(b)
    groups: dict = {}
    for v in range(H.n):
        groups.setdefault(find(v), []).append(v)
    g = g.copy()
    for members in groups.values():
        if len(members) > 1:
            g[members] = float(np.dot(w[members], g[members]) / w[members].sum())
    return g


def integrate(H: Hypergraph, f0, cfg: FlowConfig = FlowConfig()) -> FlowResult:
    """Explicit Euler integration of the diffusion from ``f0``.

    Stops at ``cfg.t_max`` or once the eigen-residual
    ||L_w f - R(f) f||_w / ||f||_w drops to ``cfg.tol_residual``. A step that
    raises the Rayleigh quotient by more than ``1e-9 + 10 dt^2`` is rejected
    and retried with half the step (or raises :class:`StepTooLarge` when
    ``halve_on_violation`` is off). With ``snap_ties`` a step is cut short
    where two vertices of a common edge meet, and the pair is snapped to one
    value so the tie is seen exactly by the next derivative. Trajectory rows
    are ``(t, rayleigh, norm_w)``.
    """
    f = as_vector(H, f0).copy()
    w = H.vertex_weights
    if cfg.project:
        f = project_orthogonal(H, f)
    nf = math.sqrt(float(np.dot(w * f, f)))
    if nf == 0.0 or nf <= 1e-14 * max(1.0, float(np.abs(as_vector(H, f0)).max())):
        raise ZeroVector("flow needs a nonzero start (after projection)")
    if cfg.renormalize:
        f = f / nf
    st = _state(H, f, cfg.eps_eq)
    traj = [(0.0, st.rayleigh, math.sqrt(st.norm2))]
    t, steps, halvings, clean, events = 0.0, 0, 0, 0, 0
    dt = cfg.dt
    dt_min = cfg.dt * 2.0 ** -cfg.max_halvings
    while t < cfg.t_max - 1e-12 and st.residual > cfg.tol_residual:
        h = min(dt, cfg.t_max - t)
        pairs = []
        if cfg.snap_ties:
            h, pairs = _next_collision(H, st.f, st.r, h)
        g = st.f + h * st.r
        if pairs:
            g = _snap_pairs(H, g, pairs)
        if cfg.project:
            g = g - float(np.dot(w, g)) / float(w.sum())
        if cfg.renormalize:
            ng = math.sqrt(float(np.dot(w * g, g)))
            if ng == 0.0:
                raise ZeroVector("flow collapsed to zero")
            g = g / ng
        new = _state(H, g, cfg.eps_eq)
        if new.rayleigh > st.rayleigh + monotone_slack(h):
            if not cfg.halve_on_violation:
                raise StepTooLarge(
                    f"Rayleigh quotient rose by {new.rayleigh - st.rayleigh:.3g} at t={t:.4g}; shrink dt"
                )
            dt = h / 2.0
            halvings += 1
            clean = 0
            if dt < dt_min:
                raise StepTooLarge(f"step halving exhausted at t={t:.4g}")
            continue
        st = new
        t += h
        steps += 1
        events += bool(pairs)
        clean += 1
        if dt < cfg.dt and clean >= cfg.regrow_after:
            dt = min(cfg.dt, 2.0 * dt)
            clean = 0
        if steps % cfg.record_every == 0 or st.residual <= cfg.tol_residual:
            traj.append((t, st.rayleigh, math.sqrt(st.norm2)))
    if traj[-1][0] != t:
        traj.append((t, st.rayleigh, math.sqrt(st.norm2)))
    return FlowResult(
        f=st.f,
        rayleigh=st.rayleigh,
        residual=st.residual,
        t=t,
        steps=steps,
        halvings=halvings,
        converged=st.residual <= cfg.tol_residual,
        trajectory=traj,
        events=events,
    )


def _starts(H: Hypergraph, cfg: FlowConfig):
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for child in children:
        rng = np.random.default_rng(child)
        while True:
            f = project_orthogonal(H, rng.normal(size=H.n))
            if np.dot(H.vertex_weights * f, f) > 1e-12:
                yield f
                break


def estimate_gamma2(H: Hypergraph, cfg: FlowConfig = FlowConfig()) -> SpectralEstimate:
    """Upper estimate of gamma_2 from the best of ``cfg.restarts`` flows.

    Each run starts from a seeded random vector w-orthogonal to the ones
    vector; the run with the smallest final Rayleigh quotient wins (ties go
    to the earlier run). Every final value is attained by a feasible vector,
    so the estimate never undershoots gamma_2 beyond rounding.
    """
    if H.n < 2:
        raise SingleVertex("gamma_2 needs at least two vertices")
    cfg = replace(cfg, project=True, renormalize=True)
    best = None
    finals, runs = [], []
    for k, f0 in enumerate(_starts(H, cfg)):
        run = integrate(H, f0, cfg)
        finals.append(run.rayleigh)
        runs.append(run)
        log.debug("restart %d: R=%.12g residual=%.3g t=%.3g", k, run.rayleigh, run.residual, run.t)
        if best is None or run.rayleigh < best.rayleigh:
            best = run
    f2 = project_orthogonal(H, best.f)
    f2 = f2 / math.sqrt(float(np.dot(H.vertex_weights * f2, f2)))
    return SpectralEstimate(
        gamma2=best.rayleigh,
        eigvec=f2,
        residual=best.residual,
        trajectory=best.trajectory,
        restarts_used=cfg.restarts,
        converged=best.converged,
        seed=cfg.seed,
        finals=finals,
        runs=runs,
    )


# -- derivative identities ---------------------------------------------------

@dataclass
class FDCheck:
    analytic: float
    fd_h: float
    fd_half: float

    @property
    def err_h(self) -> float:
        return abs(self.fd_h - self.analytic)

    @property
    def err_half(self) -> float:
        return abs(self.fd_half - self.analytic)

    @property
    def ratio(self) -> float:
        return self.err_h / self.err_half if self.err_half > 0 else math.inf


@dataclass
class DerivativeIdentities:
    h: float
    norm: FDCheck
    energy: FDCheck
    rayleigh: FDCheck

    def to_json(self) -> dict:
        return {
            name: {
                "analytic": c.analytic,
                "err_h": c.err_h,
                "err_half": c.err_half,
                "ratio": c.ratio,
            }
            for name, c in (("norm", self.norm), ("energy", self.energy), ("rayleigh", self.rayleigh))
        } | {"h": self.h}


def derivative_identities(H: Hypergraph, f, h: float = 1e-4, eps_eq: float = DEFAULT_EPS_EQ) -> DerivativeIdentities:
    """Forward-difference checks of the first-order derivative formulas.

    Along ``f + s r`` (r = df/dt) compares difference quotients at ``s = h``
    and ``h/2`` with: d||f||^2/dt = -2<f,Lf>, d<f,Lf>/dt = -2||Lf||^2 and
    the Rayleigh derivative. Raises :class:`NotDifferentiableHere` when a
    step of size h could reorder two distinct density levels.
    """
    f = as_vector(H, f)
    w = H.vertex_weights
    nf2 = float(np.dot(w * f, f))
    if nf2 == 0.0:
        raise ZeroVector("derivative identities at the zero vector")
    r = derivative(H, f, eps_eq).r
    Lf = -r
    levels = sorted({float(f[U[0]]) for U in equivalence_classes(f, eps_eq)})
    gap = min((b - a for a, b in zip(levels, levels[1:])), default=math.inf)
    if gap <= 2.0 * h * float(np.abs(r).max()):
        raise NotDifferentiableHere(f"density levels {gap:.3g} apart move {h * np.abs(r).max():.3g} per step")

    def energy(g):
        return float(np.dot(w * g, -derivative(H, g, eps_eq).r))

    def norm2(g):
        return float(np.dot(w * g, g))

    E0 = float(np.dot(w * f, Lf))
    nLf2 = float(np.dot(w * Lf, Lf))
    checks = []
    for fn, analytic in (
        (norm2, -2.0 * E0),
        (energy, -2.0 * nLf2),
        (lambda g: energy(g) / norm2(g), -2.0 / nf2**2 * (nf2 * nLf2 - E0 * E0)),
    ):
        base = fn(f)
        fds = [(fn(f + s * r) - base) / s for s in (h, h / 2.0)]
        checks.append(FDCheck(analytic, *fds))
    return DerivativeIdentities(h, *checks)
