"""Command-line front end.

Every command except ``gen`` prints a JSON report (schema ``loewner-lab/1``).
Exit status: 0 when every property passes, 1 on a property failure (the
report carries a witness), 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from . import algebra as alg
from . import campaigns as cp
from . import io
from . import lemmas as lm
from . import order_iso as oi
from .algebra import FiniteVNA
from .campaigns import Property
from .errors import LoewnerLabError
from .frac import MidpointParams
from .jordan import random_jordan

SEED_ENV = "LOEWNER_LAB_SEED"


class UsageError(Exception):
    pass


def _dims(text: str) -> tuple:
    try:
        dims = tuple(int(t) for t in text.split(",") if t.strip())
        FiniteVNA(dims)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated positive block sizes, got {text!r}") from None
    return dims


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _report(command: str, seed, tolerance, props: list[Property], result=None) -> dict:
    return {
        "schema": io.SCHEMA,
        "version": __version__,
        "command": command,
        "seed": seed,
        "tolerance": tolerance,
        "trials": {p.name: p.trials for p in props},
        "properties": [p.to_json() for p in props],
        "passed": all(p.passed for p in props),
        "result": result,
    }


# commands


def cmd_check_order(args):
    a = io.load_element(args.a, not args.no_validate)
    b = io.load_element(args.b, not args.no_validate)
    if a.alg != b.alg:
        raise UsageError(f"elements live in different algebras: {a.alg} vs {b.alg}")
    holds = alg.loewner_leq(a, b, args.tol)
    margin = alg.order_margin(a, b)
    witness = None
    if not holds:
        # rank-one projection onto the most negative eigenvector of b - a witnesses the failure
        blocks = []
        for x, y in zip(a.blocks, b.blocks):
            lam, v = np.linalg.eigh(y - x)
            blocks.append((lam[0], v[:, :1]))
        i = int(np.argmin([lam for lam, _ in blocks]))
        proj = [np.zeros((n, n), dtype=complex) for n in a.alg.block_dims]
        v = blocks[i][1]
        proj[i] = v @ v.conj().T
        witness = {"direction": io.element_to_json(alg.AlgElement(a.alg, tuple(proj))), "min_eigenvalue": margin}
    prop = Property("a <= b", 1, 0 if holds else 1, witness, {"min_eigenvalue_of_b_minus_a": margin})
    return _report("check-order", None, args.tol, [prop], {"leq": holds, "text": "true" if holds else "false"})


def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    return io.element_to_json(alg.sample(FiniteVNA(args.alg), args.kind, rng))


def cmd_make_iso(args):
    M = FiniteVNA(args.alg)
    b = io.load_element(args.midpoint, not args.no_validate)
    if b.alg != M:
        raise UsageError(f"midpoint lives in {b.alg}, not {M}")
    rng = np.random.default_rng(args.seed)
    J = random_jordan(M, rng)
    beta = args.beta if args.beta is not None else oi.choose_beta(b)
    iso = oi.build_from_midpoint(J, b, MidpointParams(args.alpha, beta))
    mid_err = alg.distance(iso(M.scalar(0.5)), b)
    pairs = [oi.effect_pair(M, rng) for _ in range(args.trials)]
    bad, w = oi.order_fuzz(iso, pairs)
    props = [
        Property("midpoint reproduced", 1, int(mid_err > 1e-9),
                 {"residual": mid_err} if mid_err > 1e-9 else None, {"residual": mid_err}),
        Property("order equivalence on sampled pairs", args.trials, bad,
                 None if w is None else {"a": io.element_to_json(w[0]), "b": io.element_to_json(w[1])}),
    ]
    graph = []
    for _ in range(args.samples):
        a = alg.sample(M, "effect", rng)
        graph.append({"a": io.element_to_json(a), "phi_a": io.element_to_json(iso(a))})
    return _report("make-iso", args.seed, 1e-9, props, {"params": io.canonical_to_json(iso), "graph": graph})


def cmd_decompose(args):
    rng = np.random.default_rng(args.seed)
    if args.iso_params:
        kind, iso = io.iso_from_json(io.read_json(args.iso_params))
        kind = {"canonical": "effect", "affine": "sa"}.get(kind, kind)
        phi = oi.as_blackbox(iso.blackbox() if kind == "effect" else
                             oi.BlackBoxIso(iso, iso.J.source, iso.J.target, iso.inverse))
        origin = {"iso_params": str(args.iso_params)}
    else:
        M = FiniteVNA(args.alg or ((1, 1) if args.builtin == "cubic" else (2, 2)))
        kind, phi = cp.builtin_iso(args.builtin, M, rng)
        origin = {"builtin": args.builtin, "alg": io.alg_to_json(M), "seed": args.seed}
    rec, residual, err = cp.safe_decompose(kind, phi, args.samples, args.seed)
    if err is not None:
        prop = Property("decomposition", 1, 1, {**origin, "error": type(err).__name__, "message": str(err)})
        return _report("decompose", args.seed, args.tol, [prop], {"kind": kind})
    params = io.canonical_to_json(rec) if kind == "effect" else io.affine_to_json(rec, kind == "cone")
    prop = Property("agreement with the black box", args.samples, int(residual > args.tol),
                    {**origin, "residual": residual} if residual > args.tol else None, {"max_residual": residual})
    return _report("decompose", args.seed, args.tol, [prop], {"kind": kind, "params": params, "residual": residual})


def cmd_halmos(args):
    p = io.load_element(args.p, not args.no_validate)
    q = io.load_element(args.q, not args.no_validate)
    if p.alg != q.alg:
        raise UsageError(f"projections live in different algebras: {p.alg} vs {q.alg}")
    blocks, worst = [], 0.0
    for i, (pb, qb) in enumerate(zip(p.blocks, q.blocks)):
        form = lm.halmos_decompose(pb, qb)
        r = lm.halmos_residual(form, pb, qb)
        worst = max(worst, r)
        blocks.append({
            "block": i,
            "ran_p_ran_q": form.h1_in_q, "ran_p_ker_q": form.h1.shape[1] - form.h1_in_q,
            "ker_p_ran_q": form.h2_in_q, "ker_p_ker_q": form.h2.shape[1] - form.h2_in_q,
            "generic": form.generic_dim,
            "a_squared": [float(t) for t in np.diag(form.a) ** 2],
            "residual": r,
        })
    prop = Property("reconstruction", p.alg.k, int(worst > 1e-10),
                    {"p": io.element_to_json(p), "q": io.element_to_json(q), "residual": worst} if worst > 1e-10 else None,
                    {"max_residual": worst})
    return _report("halmos", None, 1e-10, [prop], {"blocks": blocks})


def cmd_lemmas(args):
    props = cp.run_suite(args.suite, args.trials, args.seed)
    return _report("lemmas", args.seed, alg.ORDER_TOL, props, {"suite": args.suite})


def cmd_fuzz_order(args):
    cfg = cp.FuzzConfig(args.family, args.configs, args.trials, args.seed, tuple(args.alg) if args.alg else None,
                        args.tol)
    props = cfg.run()
    return _report("fuzz-order", args.seed, args.tol, props, {"family": args.family})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loewner-lab", description="Order isomorphisms of operator intervals.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--out", help="write the report to this file instead of standard output")
    sub = ap.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")

    p = sub.add_parser("check-order", help="test a <= b in the Loewner order")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=alg.ORDER_TOL)
    p.add_argument("--no-validate", action="store_true")
    p.set_defaults(fn=cmd_check_order)

    p = sub.add_parser("gen", help="sample an element")
    p.add_argument("--alg", type=_dims, required=True)
    p.add_argument("--kind", choices=alg.SAMPLE_KINDS, default="effect")
    seeded(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("make-iso", help="canonical effect isomorphism with a prescribed midpoint")
    p.add_argument("--alg", type=_dims, required=True)
    p.add_argument("--midpoint", required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--no-validate", action="store_true")
    seeded(p)
    p.set_defaults(fn=cmd_make_iso)

    p = sub.add_parser("decompose", help="recover canonical or affine parameters of a black box")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--iso-params")
    src.add_argument("--builtin", choices=cp.BUILTINS)
    p.add_argument("--alg", type=_dims)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-7)
    seeded(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("halmos", help="two-projection canonical form")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--no-validate", action="store_true")
    p.set_defaults(fn=cmd_halmos)

    p = sub.add_parser("lemmas", help="run lemma verification suites")
    p.add_argument("--suite", choices=cp.SUITES + ("all",), default="all")
    p.add_argument("--trials", type=int, default=200)
    seeded(p)
    p.set_defaults(fn=cmd_lemmas)

    p = sub.add_parser("fuzz-order", help="order-equivalence fuzz of random isomorphisms")
    p.add_argument("--family", choices=cp.FAMILIES, required=True)
    p.add_argument("--trials", type=int, default=1000, help="pairs per configuration")
    p.add_argument("--configs", type=int, default=5)
    p.add_argument("--alg", type=_dims)
    p.add_argument("--tol", type=float, default=1e-9)
    seeded(p)
    p.set_defaults(fn=cmd_fuzz_order)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    start = time.perf_counter()
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        for name in ("trials", "samples", "configs"):
            if getattr(args, name, 1) < 0:
                raise UsageError(f"--{name} must be non-negative")
        out = args.fn(args)
    except (UsageError, LoewnerLabError) as e:
        print(f"loewner-lab: error: {e}", file=sys.stderr)
        return 2
    code = 0
    if "schema" in out:
        out["wall_time"] = round(time.perf_counter() - start, 6)
        code = 0 if out["passed"] else 1
    text = io.dumps(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())
