"""``hmd`` command line: JSON in via files or stdin, JSON out on stdout.

Exit codes: 0 success, 1 a ``verify`` check failed, 2 bad input or unknown
command, 3 numerical failure (non-convergence under ``--strict``).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import oracles
from .core import Hypergraph, load_hypergraph, load_vector
from .diffusion import (
    DEFAULT_EPS_EQ,
    _class_instance,
    densest_subset,
    derivative,
    equivalence_classes,
    lemma_identity_terms,
)
from .errors import HMDError, NotDifferentiableHere, NumericalError, ValidationError
from .forms import conductance, quadratic_form, quadratic_form_q0, verify_quadratic_identity
from .generators import random_orthogonal, random_vector
from .partition import center_vector, exact_conductance, spectral_partition, sweep_bound, sweep_cut, two_sided_sweep
from .spectral import FlowConfig, derivative_identities, estimate_gamma2, integrate

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to exit 2."""

    def error(self, message):
        raise ValidationError(message)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("HMD_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"HMD_SEED must be an integer, got {env!r}") from None


def _flow_config(args) -> FlowConfig:
    kw = {"seed": _seed(args)}
    for name in ("dt", "t_max", "restarts"):
        if getattr(args, name, None) is not None:
            kw[name] = getattr(args, name)
    if getattr(args, "tol", None) is not None:
        kw["tol_residual"] = args.tol
    try:
        return FlowConfig(**kw)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _write_trace(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "rayleigh", "norm_w"])
        for t, R, nw in rows:
            out.writerow([repr(float(t)), repr(float(R)), repr(float(nw))])


def _labels(H: Hypergraph, S):
    return [H.label(v) for v in sorted(S)]


# -- commands ----------------------------------------------------------------

def cmd_info(H, args):
    return {
        "n": H.n,
        "m": H.m,
        "vertex_weights": H.vertex_weights.tolist(),
        "total_weight": H.total_weight,
        "labels": list(H.labels) if H.labels is not None else None,
    }


def cmd_quadratic(H, args):
    f = load_vector(H, args.vector)
    fn = quadratic_form if args.variant == "q" else quadratic_form_q0
    return {"value": fn(H, f)}


def cmd_derivative(H, args):
    f = load_vector(H, args.vector)
    rep = derivative(H, f, args.eps_eq)
    return rep.to_json(H, full=args.report)


def cmd_diffuse(H, args):
    f = load_vector(H, args.vector)
    cfg = _flow_config(args)
    if not args.normalize:
        cfg = replace(cfg, project=False, renormalize=False)
    run = integrate(H, f, cfg)
    if args.trace:
        _write_trace(args.trace, run.trajectory)
    return {
        "values": run.f.tolist(),
        "rayleigh": run.rayleigh,
        "residual": run.residual,
        "t": run.t,
        "steps": run.steps,
        "halvings": run.halvings,
        "converged": run.converged,
    }


def cmd_eig2(H, args):
    est = estimate_gamma2(H, _flow_config(args))
    if args.trace:
        _write_trace(args.trace, est.trajectory)
    if args.strict and not est.converged:
        print(json.dumps(est.to_json()))
        raise _Exit(EXIT_NUMERICAL, f"residual {est.residual:.3g} above tolerance")
    return est.to_json()


def cmd_sweep(H, args):
    f = load_vector(H, args.vector)
    cut = sweep_cut(H, f) if args.one_sided else two_sided_sweep(H, f)
    out = cut.to_json(H)
    out["bound"] = sweep_bound(H, f)
    return out


def cmd_partition(H, args):
    cut, cert = spectral_partition(H, _flow_config(args), exact=args.exact)
    return {"cut": cut.to_json(H), "certificate": cert.to_json()}


def cmd_conductance(H, args):
    S = [H.index_of(tok.strip()) for tok in args.set.split(",") if tok.strip()]
    return conductance(H, S).to_json(H)


def cmd_conductance_exact(H, args):
    cut, phi = exact_conductance(H)
    return {"phi_H": phi, "witness": _labels(H, cut.set)}


def cmd_oracle(H, args):
    if args.which == "conductance":
        res = oracles.brute_conductance(H)
        return {"value": res.value, "witness": _labels(H, res.witness), "method": res.method.value}
    if args.which == "eig":
        vals = oracles.dense_eigensolve_2graph(H)
        return {"eigenvalues": vals.tolist(), "method": oracles.Method.DENSE_EIGENSOLVE.value}
    if args.which == "rayleigh":
        res = oracles.brute_rayleigh_min(H, seed=_seed(args))
        return {"value": res.value, "witness": res.witness.tolist(), "method": res.method.value}
    # densest: first peel of every nontrivial class, production vs oracle
    if args.vector is None:
        raise ValidationError("oracle densest needs --vector")
    f = load_vector(H, args.vector)
    rep = derivative(H, f, DEFAULT_EPS_EQ)
    out = []
    for U in equivalence_classes(f, DEFAULT_EPS_EQ):
        inst = _class_instance(H, U, range(H.m), rep.S_sets, rep.I_sets, rep.constants)
        P, d = oracles.brute_densest_subset(inst)
        Pp, dp = densest_subset(inst)
        out.append({
            "class": _labels(H, U),
            "oracle": {"P": _labels(H, P), "delta": d},
            "production": {"P": _labels(H, Pp), "delta": dp},
            "agree": P == Pp and abs(d - dp) <= 1e-12 * max(1.0, abs(d)),
        })
    return {"classes": out, "method": oracles.Method.ENUMERATION.value}


# -- verify ------------------------------------------------------------------

def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def verify_suite(H: Hypergraph, seed: int = 0, samples: int = 5, cfg: FlowConfig | None = None) -> list[dict]:
    """Run the invariant checks on ``H``; one dict per check with name, pass and worst value."""
    rng = np.random.default_rng(seed)
    w = H.vertex_weights
    worst = {k: 0.0 for k in ("quadratic_identity", "rayleigh_equals_discrepancy", "flow_rate_identity",
                              "conservation", "homogeneity")}
    sandwich_ok = True
    for _ in range(samples):
        f = random_vector(rng, H.n)
        worst["quadratic_identity"] = max(
            worst["quadratic_identity"],
            verify_quadratic_identity(H, f) / max(1.0, quadratic_form(H, f)),
            verify_quadratic_identity(H, f, rng) / max(1.0, quadratic_form(H, f)),
        )
        rep = derivative(H, f)
        g = f
        if any(len(U) > 1 for U in rep.classes):
            # compare against the snapped vector the derivative actually used
            g = f.copy()
            for U in rep.classes:
                g[U] = f[U[0]]
        Q = quadratic_form(H, g)
        worst["rayleigh_equals_discrepancy"] = max(
            worst["rayleigh_equals_discrepancy"], abs(float(np.dot(w * g, -rep.r)) - Q) / max(1.0, Q)
        )
        lhs, rhs = lemma_identity_terms(H, rep)
        worst["flow_rate_identity"] = max(worst["flow_rate_identity"], _rel(lhs, rhs))
        scale = max(1.0, float(np.dot(w, np.abs(rep.r))))
        worst["conservation"] = max(worst["conservation"], abs(float(np.dot(w, rep.r))) / scale)
        Lf = -rep.r
        for a in (-1.0, 0.0, 3.0):
            for b in (-2.0, 0.5, 1.0):
                Lg = -derivative(H, a + b * g).r
                err = float(np.abs(Lg - b * Lf).max()) / max(1.0, float(np.abs(b * Lf).max()))
                worst["homogeneity"] = max(worst["homogeneity"], err)
        Q0 = quadratic_form_q0(H, f)
        Qf = quadratic_form(H, f)
        sandwich_ok &= Qf <= Q0 * (1 + 1e-12) + 1e-300 and Q0 <= 2 * Qf * (1 + 1e-12) + 1e-300

    checks = [{"name": k, "pass": v <= 1e-9, "worst": v} for k, v in worst.items()]
    checks.append({"name": "q_le_q0_le_2q", "pass": bool(sandwich_ok), "worst": None})

    # finite-difference check of the first-order derivative formulas
    fd = None
    for _ in range(20):
        f = random_vector(rng, H.n, ties=False)
        try:
            fd = derivative_identities(H, f)
            break
        except NotDifferentiableHere:
            continue
    if fd is None:
        checks.append({"name": "derivative_fd", "pass": False, "worst": "no differentiable sample"})
    else:
        ratios = [c.ratio for c in (fd.norm, fd.energy)]
        # errors at roundoff level carry no halving information
        ok = all(0.8 * 2 <= q <= 1.2 * 2 or c.err_h < 1e-10
                 for q, c in zip(ratios, (fd.norm, fd.energy)))
        checks.append({"name": "derivative_fd", "pass": ok, "worst": ratios})

    if H.n >= 2:
        sweep_ok, center_ok = True, True
        for _ in range(samples):
            f = random_orthogonal(rng, H)
            cut = two_sided_sweep(H, f)
            sweep_ok &= cut.conductance <= sweep_bound(H, f) + 1e-12
            split = center_vector(H, f)
            center_ok &= float(np.dot(w * split.g, split.g)) >= float(np.dot(w * f, f)) * (1 - 1e-9)
            center_ok &= _rel(quadratic_form_q0(H, split.g), quadratic_form_q0(H, f)) <= 1e-9
        checks.append({"name": "sweep_guarantee", "pass": bool(sweep_ok), "worst": None})
        checks.append({"name": "centering", "pass": bool(center_ok), "worst": None})
        _, cert = spectral_partition(H, cfg or FlowConfig(seed=seed), exact=False)
        names = ("cut_le_2sqrt_gamma2", "cut_le_sqrt_2gamma2_0", "lower_le_cut", "gamma2_le_gamma2_0_le_2gamma2")
        for k in names:
            checks.append({"name": k, "pass": bool(cert.satisfied[k]), "worst": None})
        if H.n <= 12:
            phi = oracles.brute_conductance(H).value
            g2, g20 = cert.gamma2_hat, cert.gamma2_0_hat
            checks.append({"name": "cheeger_lower", "pass": g2 / 2 <= phi + 1e-2, "worst": g2 / 2 - phi})
            checks.append({"name": "cheeger_upper", "pass": phi <= 2 * math.sqrt(g2) + 1e-9,
                           "worst": phi - 2 * math.sqrt(g2)})
            checks.append({"name": "cheeger_upper_q0", "pass": phi <= math.sqrt(2 * g20) + 1e-2,
                           "worst": phi - math.sqrt(2 * g20)})
    return checks


def cmd_verify(H, args):
    checks = verify_suite(H, _seed(args))
    ok = all(c["pass"] for c in checks)
    payload = {"checks": checks, "all_pass": ok}
    if not ok:
        print(json.dumps(payload))
        raise _Exit(EXIT_CHECK_FAILED, "some checks failed")
    return payload


# -- plumbing ----------------------------------------------------------------

class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _flow_flags(p, restarts=True):
    p.add_argument("--dt", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    if restarts:
        p.add_argument("--restarts", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hmd", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def add(name, fn, vector=False, help=None):
        p = sub.add_parser(name, help=help)
        p.add_argument("graph", help="hypergraph JSON file, or - for stdin")
        if vector:
            p.add_argument("--vector", required=True, help="vector JSON file")
        p.set_defaults(fn=fn)
        return p

    add("info", cmd_info, help="sizes and vertex weights")
    p = add("quadratic", cmd_quadratic, vector=True, help="Q(f) or Q0(f)")
    p.add_argument("--variant", choices=("q", "q0"), default="q")
    p = add("derivative", cmd_derivative, vector=True, help="r = df/dt")
    p.add_argument("--eps-eq", dest="eps_eq", type=float, default=DEFAULT_EPS_EQ)
    p.add_argument("--report", action="store_true", help="include constants and the peel certificate")
    p = add("diffuse", cmd_diffuse, vector=True, help="integrate the diffusion from f")
    _flow_flags(p, restarts=False)
    p.add_argument("--trace", help="CSV output with columns t,rayleigh,norm_w")
    p.add_argument("--normalize", action="store_true", help="project out 1 and renormalize each step")
    p = add("eig2", cmd_eig2, help="estimate gamma_2 by restarted gradient flow")
    _flow_flags(p)
    p.add_argument("--trace", help="CSV trajectory of the winning run")
    p.add_argument("--strict", action="store_true", help="exit 3 if the residual tolerance is missed")
    p = add("sweep", cmd_sweep, vector=True, help="sweep-cut rounding of f")
    p.add_argument("--one-sided", action="store_true", help="sweep f^2 directly without centering")
    p = add("partition", cmd_partition, help="spectral partition with Cheeger certificate")
    _flow_flags(p)
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=None)
    p = add("conductance", cmd_conductance, help="conductance of a given set")
    p.add_argument("--set", required=True, help="comma separated labels or indices")
    add("conductance-exact", cmd_conductance_exact, help="phi_H by enumeration")
    p = add("verify", cmd_verify, help="run the invariant checks")
    p.add_argument("--seed", type=int)
    p = sub.add_parser("oracle")
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    p.add_argument("which", choices=("conductance", "densest", "eig", "rayleigh"))
    p.add_argument("graph")
    p.add_argument("--vector")
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_oracle)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "fn", None) is None:
            raise ValidationError("no command given")
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        H = load_hypergraph(args.graph)
        payload = args.fn(H, args)
    except _Exit as exc:
        print(f"hmd: {exc}", file=sys.stderr)
        return exc.code
    except (ValidationError, OSError) as exc:
        print(f"hmd: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, HMDError) as exc:
        print(f"hmd: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(payload))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
