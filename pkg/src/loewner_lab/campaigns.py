"""Seeded verification campaigns shared by the CLI, scripts and tests.

Each campaign returns ``Property`` records.  Trial ``i`` of a campaign with
seed ``s`` draws from ``default_rng([s, i])``, so any single trial can be
replayed in isolation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import algebra as alg
from . import frac
from . import io
from . import lemmas as lm
from . import order_iso as oi
from .algebra import FiniteVNA
from .errors import LoewnerLabError
from .jordan import JordanIso, random_jordan

FAMILIES = ("canonical", "affine", "cone", "flip")
SUITES = ("lem1", "lem3", "lem4", "falpha", "abel")


class Property(NamedTuple):
    name: str
    trials: int
    failures: int
    witness: dict | None = None
    detail: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        out = {"name": self.name, "trials": self.trials, "failures": self.failures, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        return out


def trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(i)])


def random_dims(rng, choices=(2, 3, 4), max_blocks: int = 2) -> tuple:
    return tuple(int(d) for d in rng.choice(choices, int(rng.integers(1, max_blocks + 1))))


# order fuzz


@dataclass(frozen=True)
class FuzzConfig:
    family: str = "canonical"
    configs: int = 5
    trials: int = 1000
    seed: int = 0
    dims: tuple | None = None
    tol: float = 1e-9

    def run(self) -> list[Property]:
        return fuzz_order(self.family, self.configs, self.trials, self.seed, self.dims, self.tol)


def family_iso(family: str, M: FiniteVNA, rng):
    """A random isomorphism of the family together with its pair sampler."""
    if family == "canonical":
        return oi.random_canonical(M, rng), lambda r: oi.effect_pair(M, r)
    if family == "flip":
        return oi.flip(oi.random_canonical(M, rng)), lambda r: oi.effect_pair(M, r)
    if family == "affine":
        return oi.random_affine(M, rng), lambda r: oi.sa_pair(M, r)
    if family == "cone":
        return oi.random_affine(M, rng, cone=True), lambda r: oi.sa_pair(M, r, "positive")
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def fuzz_order(family: str, configs: int, trials: int, seed: int, dims: tuple | None = None,
               tol: float = 1e-9) -> list[Property]:
    failures, witness, comparable = 0, None, 0
    for c in range(configs):
        rng = trial_rng(seed, c)
        M = FiniteVNA(dims) if dims else FiniteVNA(random_dims(rng))
        phi, pairs = family_iso(family, M, rng)
        batch = [pairs(rng) for _ in range(trials)]
        comparable += sum(alg.loewner_leq(a, b, tol) for a, b in batch)
        n_bad, w = oi.order_fuzz(phi, batch, tol)
        failures += n_bad
        if w is not None and witness is None:
            witness = {"config": c, "alg": io.alg_to_json(M),
                       "a": io.element_to_json(w[0]), "b": io.element_to_json(w[1])}
    return [Property(f"order equivalence ({family})", configs * trials, failures, witness,
                     {"configs": configs, "comparable_pairs": comparable})]


# lemma suites


def suite_lem1(trials: int, seed: int) -> list[Property]:
    failures, witness, accepted = 0, None, 0
    inner = 20
    for i in range(trials):
        rng = trial_rng(seed, i)
        M = FiniteVNA(random_dims(rng, (1, 2, 3)))
        p, a = lm.random_lem1_pair(M, rng)
        res = lm.lem1_run(p, a, inner, rng)
        accepted += res.accepted
        if not res.ok:
            failures += 1
            witness = witness or {"trial": i, "p": io.element_to_json(p), "a": io.element_to_json(a),
                                  "x": io.element_to_json(res.counterexample)}
    return [Property("lem1: p + a is the minimum upper bound", trials, failures, witness,
                     {"sampled_upper_bounds": accepted, "candidates_per_trial": inner})]


def suite_lem3(trials: int, seed: int) -> list[Property]:
    props = []
    worst, bad, w = 0.0, 0, None
    for i in range(trials):
        rng = trial_rng(seed, i)
        p, q = lm.random_projection_pair(int(rng.integers(1, 7)), rng)
        r = lm.halmos_residual(lm.halmos_decompose(p, q), p, q)
        worst = max(worst, r)
        if r > 1e-10:
            bad += 1
            w = w or {"trial": i, "p": io._cmat_to_json(p), "q": io._cmat_to_json(q), "residual": r}
    props.append(Property("halmos reconstruction", trials, bad, w, {"max_residual": worst}))

    for kind, expect_half in (("generic", False), ("complement", True)):
        bad, w, extreme = 0, None, (-np.inf if not expect_half else np.inf)
        for i in range(trials):
            rng = trial_rng(seed + 1 if kind == "generic" else seed + 2, i)
            p, q = lm.random_projection_pair(int(rng.integers(2, 7)), rng, kind)
            r = lm.lem3_witness(p, q)
            if expect_half:
                ok = r.ge_p and r.ge_half_q and r.ge_half
                extreme = min(extreme, r.min_eig_gap)
            else:
                ok = r.ge_p and r.ge_half_q and not r.ge_half and r.min_eig_gap <= -1e-6
                extreme = max(extreme, r.min_eig_gap)
            if not ok:
                bad += 1
                w = w or {"trial": i, "p": io._cmat_to_json(p), "q": io._cmat_to_json(q),
                          "verdicts": [r.ge_p, r.ge_half_q, r.ge_half], "min_eig_gap": r.min_eig_gap}
        label = "x0 >= 1/2 fails" if not expect_half else "x0 >= 1/2 holds"
        props.append(Property(f"lem3 {kind} pairs: {label}", trials, bad, w, {"extreme_min_eig_gap": float(extreme)}))
    return props


def suite_lem4(trials: int, seed: int) -> list[Property]:
    bad, w, resampled, true_count = 0, None, 0, 0
    for i in range(trials):
        rng = trial_rng(seed, i)
        inst, tries = lm.sample_lem4_nonboundary(rng)
        resampled += tries
        lhs, rhs = lm.lem4_check(inst)
        true_count += lhs
        if lhs != rhs:
            bad += 1
            w = w or {"trial": i, "lambda": inst.lam, "a": io.element_to_json(inst.a),
                      "b": io.element_to_json(inst.b), "u": io.element_to_json(inst.u),
                      "x": io.element_to_json(inst.x), "lhs": lhs, "rhs": rhs}
    return [Property("lem4: block inequality <=> Schur form", trials, bad, w,
                     {"equivalences": trials - bad, "both_true": true_count, "boundary_resamples": resampled})]


def suite_falpha(trials: int, seed: int) -> list[Property]:
    props = []
    for alpha in (0.5, -3.0):
        bad, w = 0, None
        for i in range(trials):
            rng = trial_rng(seed, i)
            a = lm.fuzz_effect_for_projection_test(FiniteVNA(random_dims(rng, (1, 2, 3))), rng)
            if lm.projection_via_falpha(a, alpha) != alg.is_projection(a):
                bad += 1
                w = w or {"trial": i, "a": io.element_to_json(a)}
        props.append(Property(f"fixed points of f_alpha are projections (alpha={alpha})", trials, bad, w))
    return props


ABEL_MAPS = {
    "identity": (lambda t: t,) * 3,
    "square": (lambda t: t * t,) * 3,
    "mixed": (lambda t: t * t, np.sqrt, lambda t: frac.frac_map_scalar(t, 0.5)),
}


def suite_abel(trials: int, seed: int, grid_size: int = 100) -> list[Property]:
    props = []
    M = FiniteVNA((1, 1, 1))
    for name, fns in ABEL_MAPS.items():
        phi = lm.coordinatewise(fns)
        res = lm.abel_extract(phi, M, grid_size)
        exact = np.array([[f(t) for t in res.grid] for f in fns])
        grid_err = float(np.max(np.abs(res.taus - exact)))
        recon = lm.abel_reconstruction_residual(res, trials, trial_rng(seed, 0))
        bad = int(grid_err > 1e-12) + int(recon > 1e-9)
        props.append(Property(f"abel extraction ({name})", trials, bad,
                              {"grid_error": grid_err, "reconstruction": recon} if bad else None,
                              {"grid_points": int(res.grid.size), "grid_error": grid_err,
                               "reconstruction_residual": recon}))
    return props


SUITE_RUNNERS = {"lem1": suite_lem1, "lem3": suite_lem3, "lem4": suite_lem4,
                 "falpha": suite_falpha, "abel": suite_abel}


def run_suite(name: str, trials: int, seed: int) -> list[Property]:
    names = SUITES if name == "all" else (name,)
    out = []
    for n in names:
        out.extend(SUITE_RUNNERS[n](trials, seed))
    return out


# decomposition of built-in black boxes


BUILTINS = ("identity", "transpose", "canonical", "flip", "characterization", "affine", "cone", "cubic")


def builtin_iso(name: str, M: FiniteVNA, rng):
    """``(kind, black box)`` where kind is ``effect``, ``sa`` or ``cone``."""
    if name == "identity":
        return "effect", oi.BlackBoxIso(lambda a: a, M, M, lambda a: a, name="identity")
    if name == "transpose":
        J = JordanIso(M, M, tuple(range(M.k)), (True,) * M.k, tuple(np.eye(n) for n in M.block_dims))
        return "effect", oi.as_blackbox(J)
    if name == "canonical":
        return "effect", oi.random_canonical(M, rng).blackbox()
    if name == "flip":
        return "effect", oi.flip(oi.random_canonical(M, rng))
    if name == "characterization":
        b = 0.1 + 0.8 * alg.sample(M, "effect", rng)
        return "effect", oi.build_characterization_iso(random_jordan(M, rng), b)
    if name == "affine":
        iso = oi.random_affine(M, rng)
        return "sa", oi.BlackBoxIso(iso, M, iso.J.target, iso.inverse, name="affine")
    if name == "cone":
        iso = oi.random_affine(M, rng, cone=True)
        return "cone", oi.BlackBoxIso(iso, M, iso.J.target, iso.inverse, name="cone")
    if name == "cubic":
        return "sa", oi.BlackBoxIso(lambda a: alg.spectral_map(a, lambda t: t ** 3), M, M, name="cubic")
    raise ValueError(f"unknown builtin {name!r}; expected one of {BUILTINS}")


SAMPLE_OF_KIND = {"effect": "effect", "sa": "hermitian", "cone": "positive"}


def decompose(kind: str, phi: oi.BlackBoxIso, samples: int, seed: int):
    """Decompose and measure agreement; returns ``(recovered, residual)`` or raises."""
    if kind == "effect":
        rec = oi.decompose_effect_iso(phi, seed=seed)
    elif kind == "sa":
        rec = oi.decompose_sa_iso(phi, seed=seed)
    else:
        rec = oi.decompose_cone_iso(phi, seed=seed)
    rng = trial_rng(seed, 1)
    worst = 0.0
    for _ in range(samples):
        a = alg.sample(phi.source, SAMPLE_OF_KIND[kind], rng)
        worst = max(worst, alg.distance(rec(a), phi(a)))
    return rec, worst


def safe_decompose(kind, phi, samples, seed):
    try:
        rec, res = decompose(kind, phi, samples, seed)
        return rec, res, None
    except LoewnerLabError as e:
        return None, None, e

