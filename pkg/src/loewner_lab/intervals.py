"""Operator intervals, their normalization, and the cone linearization of effect isomorphisms.

Interval kinds (``reverse`` selects the mirrored variant):

    full_sa                 M_sa
    closed_pair(a1, a2)     [a1, a2]            -> E(pMp), p = support of a2 - a1
    half_closed(a1, a2)     [a1, a2)  / (a1, a2]  -> [0, inf) / (-inf, 0]
    open_pair(a1, a2)       (a1, a2)            -> (0, inf)
    ray_closed(a0)          [a0, inf) / (-inf, a0] -> [0, inf) / (-inf, 0]
    ray_open(a0)            (a0, inf) / (-inf, a0) -> (0, inf)
    cone, open_cone         [0, inf), (0, inf)

Closed pairs are parametrized *from* the corner effect algebra; every other
kind maps *to* its canonical form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra as alg
from . import order_iso as oi
from .algebra import AlgElement, FiniteVNA
from .errors import BadSpec, NotCommutative

KINDS = ("full_sa", "closed_pair", "half_closed", "open_pair", "ray_closed", "ray_open", "cone", "open_cone")
CLAMP = 1e-9
INTERIOR = 0.01


@dataclass(frozen=True, eq=False)
class IntervalSpec:
    alg: FiniteVNA
    kind: str
    lower: AlgElement | None = None
    upper: AlgElement | None = None
    reverse: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadSpec(f"unknown interval kind {self.kind!r}")
        need = {"closed_pair": 2, "half_closed": 2, "open_pair": 2, "ray_closed": 1, "ray_open": 1}.get(self.kind, 0)
        given = [e for e in (self.lower, self.upper) if e is not None]
        if len(given) != need:
            raise BadSpec(f"{self.kind} needs {need} endpoint(s), got {len(given)}")
        for e in given:
            if e.alg != self.alg or not e.is_hermitian():
                raise BadSpec("endpoints must be Hermitian elements of the interval's algebra")
        if need == 2:
            gap = self.upper - self.lower
            if not alg.is_positive(gap):
                raise BadSpec("lower endpoint must lie below the upper one")
            if self.kind == "closed_pair" and gap.max_abs() == 0.0:
                raise BadSpec("closed interval with equal endpoints")
            if self.kind != "closed_pair" and not alg.is_lm_invertible(gap)[0]:
                raise BadSpec(f"{self.kind} needs an invertible gap")

    @property
    def label(self) -> str:
        if self.kind in ("half_closed", "ray_closed", "ray_open") and self.reverse:
            return self.kind + "_reversed"
        return self.kind

    def contains(self, a: AlgElement, tol: float = alg.ORDER_TOL) -> bool:
        if a.alg != self.alg or not a.is_hermitian():
            return False
        lo, up, k = self.lower, self.upper, self.kind
        if k == "full_sa":
            return True
        if k in ("cone", "open_cone"):
            return _above(a, None, strict=k == "open_cone", tol=tol)
        if k in ("ray_closed", "ray_open"):
            strict = k == "ray_open"
            return _above(lo, a, strict, tol) if self.reverse else _above(a, lo, strict, tol)
        strict_lo = k == "open_pair" or (k == "half_closed" and self.reverse)
        strict_up = k == "open_pair" or (k == "half_closed" and not self.reverse)
        return _above(a, lo, strict_lo, tol) and _above(up, a, strict_up, tol)


def _above(a: AlgElement, b: AlgElement | None, strict: bool, tol: float) -> bool:
    d = a if b is None else a - b
    if not alg.is_positive(d, tol):
        return False
    return alg.is_lm_invertible(d, tol)[0] if strict else True


@dataclass(eq=False)
class IntervalIso:
    source: IntervalSpec
    target: IntervalSpec
    forward: Callable[[AlgElement], AlgElement]
    backward: Callable[[AlgElement], AlgElement]

    def __call__(self, a: AlgElement) -> AlgElement:
        return self.forward(a)


def effect_spec(M: FiniteVNA) -> IntervalSpec:
    return IntervalSpec(M, "closed_pair", M.zeros(), M.identity())


def _corner(M: FiniteVNA, p: AlgElement):
    """Corner algebra ``pMp`` with per-block isometries onto the range of ``p``."""
    isos, dims = [], []
    for blk in p.blocks:
        lam, v = np.linalg.eigh(blk)
        cols = v[:, lam > 0.5]
        isos.append(cols)
        if cols.shape[1]:
            dims.append(cols.shape[1])
    return FiniteVNA(tuple(dims)), isos


def _corner_embed(C: FiniteVNA, M: FiniteVNA, isos, c: AlgElement) -> AlgElement:
    it = iter(c.blocks)
    out = []
    for v in isos:
        out.append(v @ next(it) @ v.conj().T if v.shape[1] else np.zeros((v.shape[0],) * 2, dtype=complex))
    return AlgElement(M, tuple(out))


def _corner_compress(C: FiniteVNA, isos, a: AlgElement) -> AlgElement:
    out = [v.conj().T @ b @ v for v, b in zip(isos, a.blocks) if v.shape[1]]
    return AlgElement(C, tuple(out)).sym()


def _pinv_sqrt(g: AlgElement) -> AlgElement:
    cut = alg.ORDER_TOL * max(g.norm(), 1e-14)
    return alg.spectral_map(g, lambda t: np.where(t > cut, 1.0 / np.sqrt(np.maximum(t, cut)), 0.0))


def normalize_interval(spec: IntervalSpec) -> IntervalIso:
    M, k = spec.alg, spec.kind
    one = M.identity()
    if k in ("full_sa", "cone", "open_cone"):
        return IntervalIso(spec, spec, lambda a: a, lambda a: a)
    if k == "ray_closed":
        a0 = spec.lower
        target = IntervalSpec(M, "ray_closed", M.zeros(), reverse=spec.reverse)
        return IntervalIso(spec, target, lambda a: a - a0, lambda x: x + a0)
    if k == "ray_open":
        a0 = spec.lower
        target = IntervalSpec(M, "open_cone")
        if spec.reverse:
            # inversion and negation both reverse order, so their composite keeps it
            return IntervalIso(spec, target, lambda a: alg.hermitian_inverse(a0 - a),
                               lambda x: a0 - alg.hermitian_inverse(x))
        return IntervalIso(spec, target, lambda a: a - a0, lambda x: x + a0)

    a1 = spec.lower
    g = spec.upper - a1
    g_half = alg.sqrt_psd(g)
    if k == "closed_pair":
        p = alg.support_projection(g)
        C, isos = _corner(M, p)
        g_pinv = _pinv_sqrt(g)

        def fwd(c):
            return alg.congruence(g_half, _corner_embed(C, M, isos, c)) + a1

        def bwd(a):
            return _corner_compress(C, isos, alg.congruence(g_pinv, a - a1))

        return IntervalIso(effect_spec(C), spec, fwd, bwd)

    g_inv_half = alg.hermitian_inverse(g_half)

    def to_unit(a):
        return alg.congruence(g_inv_half, a - a1)

    def from_unit(y):
        return alg.congruence(g_half, y) + a1

    if k == "half_closed" and spec.reverse:
        target = IntervalSpec(M, "ray_closed", M.zeros(), reverse=True)
        return IntervalIso(spec, target,
                           lambda a: one - alg.hermitian_inverse(to_unit(a)),
                           lambda x: from_unit(alg.hermitian_inverse(one - x)))
    target = IntervalSpec(M, "cone" if k == "half_closed" else "open_cone")
    return IntervalIso(spec, target,
                       lambda a: alg.hermitian_inverse(one - to_unit(a)) - one,
                       lambda x: from_unit(one - alg.hermitian_inverse(one + x)))


def sample_interval(spec: IntervalSpec, rng) -> AlgElement:
    """A random point of the interval, kept off its excluded boundary."""
    rng = alg.as_rng(rng)
    M, k = spec.alg, spec.kind
    if k == "full_sa":
        return alg.sample(M, "hermitian", rng)
    if k in ("cone", "open_cone", "ray_closed", "ray_open"):
        x = alg.sample(M, "positive", rng)
        if k in ("open_cone", "ray_open"):
            x = x + INTERIOR
        if k in ("cone", "open_cone"):
            return x
        return spec.lower - x if spec.reverse else spec.lower + x
    e = alg.sample(M, "effect", rng)
    if k != "closed_pair":
        e = INTERIOR + (1.0 - 2 * INTERIOR) * e
    return alg.congruence(alg.sqrt_psd(spec.upper - spec.lower), e) + spec.lower


def sample_interval_pair(spec: IntervalSpec, rng):
    """Pair of points mixing comparable, reversed and unrelated cases."""
    rng = alg.as_rng(rng)
    M, k = spec.alg, spec.kind
    if k in ("closed_pair", "half_closed", "open_pair"):
        e, f = oi.effect_pair(M, rng)
        if k != "closed_pair":
            e, f = (INTERIOR + (1.0 - 2 * INTERIOR) * x for x in (e, f))
        g = alg.sqrt_psd(spec.upper - spec.lower)
        return alg.congruence(g, e) + spec.lower, alg.congruence(g, f) + spec.lower
    a = sample_interval(spec, rng)
    case = int(rng.integers(0, 3))
    if case == 2:
        return a, sample_interval(spec, rng)
    step = alg.sample(M, "positive", rng)
    downward = k in ("ray_closed", "ray_open") and spec.reverse
    b = a - step if downward else a + step
    return (a, b) if case == 0 else (b, a)


# cone linearization of effect isomorphisms


def phi_to_cone(phi, X: AlgElement) -> AlgElement:
    """``(1 - phi(1 - (1+X)^{-1}))^{-1} - 1``."""
    one_in = X.alg.identity()
    y = phi(one_in - alg.hermitian_inverse(one_in + X))
    one_out = y.alg.identity()
    return alg.hermitian_inverse(one_out - y) - one_out


def cone_map(phi) -> Callable[[AlgElement], AlgElement]:
    return lambda X: phi_to_cone(phi, X)


def cone_to_phi(Phi) -> Callable[[AlgElement], AlgElement]:
    """Effect isomorphism ``x -> 1 - (Phi((1-x)^{-1} - 1) + 1)^{-1}``.

    Eigenvalues of ``x`` are clamped to ``1 - 1e-9`` first so that ``1 - x``
    is invertible; the map extends continuously to the clamped part.
    """
    def phi(x: AlgElement) -> AlgElement:
        one_in = x.alg.identity()
        xc = alg.spectral_map(x, lambda t: np.minimum(t, 1.0 - CLAMP))
        Y = Phi(alg.hermitian_inverse(one_in - xc) - one_in)
        one_out = Y.alg.identity()
        return one_out - alg.hermitian_inverse(Y + one_out)

    return phi


def linear_factor(Phi, source: FiniteVNA, target: FiniteVNA | None = None, seed=0):
    """``(B, J)`` with ``Phi(X) = B J(X) B`` and ``B = Phi(1)^{1/2}``."""
    iso = oi.decompose_cone_iso(oi.BlackBoxIso(Phi, source, source if target is None else target), seed=seed)
    return iso.x, iso.J


# commutative self-adjoint part onto the strictly positive orthant


def _require_commutative(a: AlgElement):
    if not a.alg.is_commutative:
        raise NotCommutative(f"{a.alg} has a block larger than 1x1")


def commutative_sa_to_open_cone(a: AlgElement) -> AlgElement:
    """Coordinatewise ``exp``; any increasing bijection of the reals onto ``(0, inf)`` would do."""
    _require_commutative(a)
    alg.check_hermitian(a)
    return alg.spectral_map(a, np.exp)


def open_cone_to_commutative_sa(x: AlgElement) -> AlgElement:
    _require_commutative(x)
    return alg.spectral_map(x, np.log)
