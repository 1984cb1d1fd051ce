"""Order isomorphisms of effect algebras, self-adjoint parts and positive cones.

Every order isomorphism ``E(M) -> E(N)`` with invertible midpoint (and no
1x1 blocks) has the canonical form

    phi(a) = g_beta( S g_alpha(T J(a) T) S ),   S = g_alpha(T^2)^{-1/2}

with ``g`` the fractional map, ``0 < alpha < 1``, ``beta < 0``, ``T``
positive invertible and ``J`` a Jordan *-isomorphism.  Order isomorphisms of
self-adjoint parts and cones are affine: ``a -> x J(a) x^* + b``.

The decomposition routines only evaluate their input; they treat it as a
black box and validate the recovered parameters on held-out points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np

from . import algebra as alg
from . import frac
from .algebra import AlgElement, FiniteVNA
from .errors import (
    AlgebraMismatch,
    MidpointNotInvertible,
    NotAffine,
    NotCentralImage,
    NotInvertible,
    NotJordan,
    NotUnital,
    ParamInvariantViolated,
    TypeI1Summand,
)
from .frac import MidpointParams
from .jordan import (
    JordanIso,
    apply_jordan,
    compose_jordan,
    factor_unital_linear_order_iso,
    identity_jordan,
    invert_jordan,
    random_jordan,
)

DECOMPOSE_ALPHA = 0.5
BETA_MARGIN = 1.0
VALIDATION_TOL = 1e-6
AFFINE_TOL = 1e-6
ORTHO_TOL = 1e-8


@dataclass(eq=False)
class BlackBoxIso:
    """An order isomorphism known only through evaluation.

    ``serial=True`` declares that ``fn`` must not be called concurrently.
    """

    fn: Callable[[AlgElement], AlgElement]
    source: FiniteVNA
    target: FiniteVNA
    inverse: Callable[[AlgElement], AlgElement] | None = None
    name: str = "black-box"
    serial: bool = False
    parts: dict = field(default_factory=dict)

    def __call__(self, a: AlgElement) -> AlgElement:
        return self.fn(a)


def as_blackbox(phi, source: FiniteVNA | None = None, target: FiniteVNA | None = None) -> BlackBoxIso:
    if isinstance(phi, BlackBoxIso):
        return phi
    if isinstance(phi, CanonicalEffectIso):
        return phi.blackbox()
    if isinstance(phi, JordanIso):
        return BlackBoxIso(phi, phi.source, phi.target, invert_jordan(phi), name="jordan")
    if source is None:
        raise TypeError("source algebra required for a bare callable")
    return BlackBoxIso(phi, source, source if target is None else target)


# canonical effect isomorphisms


@dataclass(frozen=True, eq=False)
class CanonicalEffectIso:
    J: JordanIso
    params: MidpointParams
    T: AlgElement

    def __post_init__(self):
        if self.T.alg != self.J.target:
            raise ParamInvariantViolated("T must live in the target algebra of J")
        if not self.T.is_hermitian():
            raise ParamInvariantViolated("T must be Hermitian")
        ok, _ = alg.is_lm_invertible(self.T) if alg.is_positive(self.T) else (False, None)
        if not ok:
            raise ParamInvariantViolated("T must be positive and invertible")

    @property
    def source(self) -> FiniteVNA:
        return self.J.source

    @property
    def target(self) -> FiniteVNA:
        return self.J.target

    @cached_property
    def _scale(self):
        ft2 = frac.frac_map(alg.congruence(self.T, self.target.identity()), self.params.alpha, cone=True)
        s = alg.inv_sqrt(ft2)
        return s, alg.hermitian_inverse(s), alg.hermitian_inverse(self.T)

    def __call__(self, a: AlgElement) -> AlgElement:
        return apply_canonical(self, a)

    def inverse(self, y: AlgElement) -> AlgElement:
        return apply_canonical_inverse(self, y)

    def midpoint(self) -> AlgElement:
        return frac.midpoint_profile_operator(self.T, self.params)

    def blackbox(self) -> BlackBoxIso:
        return BlackBoxIso(self, self.source, self.target, self.inverse, name="canonical")


def apply_canonical(iso: CanonicalEffectIso, a: AlgElement) -> AlgElement:
    s, _, _ = iso._scale
    inner = frac.frac_map_unchecked(alg.congruence(iso.T, apply_jordan(iso.J, a)), iso.params.alpha)
    return frac.frac_map_unchecked(alg.congruence(s, inner), iso.params.beta)


def apply_canonical_inverse(iso: CanonicalEffectIso, y: AlgElement) -> AlgElement:
    _, s_inv, t_inv = iso._scale
    p = iso.params
    mid = frac.frac_map_unchecked(y, frac.frac_inverse_param(p.beta))
    inner = frac.frac_map_unchecked(alg.congruence(s_inv, mid), frac.frac_inverse_param(p.alpha))
    return apply_jordan(invert_jordan(iso.J), alg.congruence(t_inv, inner))


def _check_two_sided_invertible(b: AlgElement, exc=NotInvertible):
    ok_b, _ = alg.is_lm_invertible(b) if alg.is_positive(b) else (False, None)
    one_minus = b.alg.identity() - b
    ok_c, _ = alg.is_lm_invertible(one_minus) if alg.is_positive(one_minus) else (False, None)
    if not (ok_b and ok_c):
        raise exc("both b and 1 - b must be invertible effects")


def choose_beta(m: AlgElement, margin: float = BETA_MARGIN) -> float:
    """A beta with ``1/(2 - beta) <= min spectrum of m``, pushed a further ``margin`` below the tight value."""
    lam_min = float(m.eigvals()[0])
    if not lam_min > 0.0:
        raise NotInvertible(f"midpoint has smallest eigenvalue {lam_min:.3g}")
    return min(-1.0, 2.0 - 1.0 / lam_min) - margin


def build_from_midpoint(J: JordanIso, b: AlgElement, params: MidpointParams) -> CanonicalEffectIso:
    """Canonical isomorphism with Jordan part ``J`` sending ``1/2`` to ``b``."""
    if b.alg != J.target:
        raise AlgebraMismatch("midpoint must live in the target algebra")
    _check_two_sided_invertible(b)
    T = frac.midpoint_profile_operator_inverse(b, params)
    return CanonicalEffectIso(J, params, T)


def random_canonical(source: FiniteVNA, rng, target: FiniteVNA | None = None,
                     t_range=(0.4, 2.5)) -> CanonicalEffectIso:
    rng = alg.as_rng(rng)
    J = random_jordan(source, rng, target)
    params = MidpointParams(rng.uniform(0.1, 0.9), rng.uniform(-3.0, -0.2))
    T = alg.AlgElement(J.target, tuple(
        alg.with_spectrum(alg.haar_unitary(n, rng), rng.uniform(*t_range, n)) for n in J.target.block_dims))
    return CanonicalEffectIso(J, params, T)


def flip(psi) -> BlackBoxIso:
    """``a -> 1 - psi(1 - a)``."""
    psi = as_blackbox(psi)

    def fn(a):
        return psi.target.identity() - psi(psi.source.identity() - a)

    inv = None
    if psi.inverse is not None:
        def inv(y):
            return psi.source.identity() - psi.inverse(psi.target.identity() - y)

    return BlackBoxIso(fn, psi.source, psi.target, inv, name=f"flip({psi.name})", parts={"inner": psi})


def compose(phi2, phi1) -> BlackBoxIso:
    """``phi2 o phi1``."""
    phi1, phi2 = as_blackbox(phi1), as_blackbox(phi2)
    if phi1.target != phi2.source:
        raise AlgebraMismatch(f"cannot compose: {phi1.target} vs {phi2.source}")
    inv = None
    if phi1.inverse is not None and phi2.inverse is not None:
        def inv(y):
            return phi1.inverse(phi2.inverse(y))
    return BlackBoxIso(lambda a: phi2(phi1(a)), phi1.source, phi2.target, inv,
                       name=f"{phi2.name}o{phi1.name}", parts={"outer": phi2, "inner": phi1})


def invert(phi) -> BlackBoxIso:
    phi = as_blackbox(phi)
    if phi.inverse is None:
        raise ValueError("black box carries no inverse")
    return BlackBoxIso(phi.inverse, phi.target, phi.source, phi.fn, name=f"inv({phi.name})")


def build_characterization_iso(J: JordanIso, b: AlgElement) -> BlackBoxIso:
    """Order isomorphism with ``phi(1/2) = b`` for any ``b`` with ``b, 1-b`` invertible.

    ``phi(a) = phi1(1 - phi2(1 - a))`` where ``phi1`` is an automorphism whose
    midpoint dominates ``b`` and ``phi2`` has midpoint ``1 - phi1^{-1}(b)``.
    """
    _check_two_sided_invertible(b)
    N = J.target
    c = 0.5 * (1.0 + float(b.eigvals()[-1]))
    mid1 = N.scalar(max(c, 0.5))
    phi1 = build_from_midpoint(identity_jordan(N), mid1, MidpointParams(DECOMPOSE_ALPHA, choose_beta(mid1)))
    b0 = phi1.inverse(b)
    mid2 = N.identity() - b0
    phi2 = build_from_midpoint(J, mid2, MidpointParams(DECOMPOSE_ALPHA, choose_beta(mid2)))
    M = J.source

    def fn(a):
        return phi1(N.identity() - phi2(M.identity() - a))

    def inv(y):
        return M.identity() - phi2.inverse(N.identity() - phi1.inverse(y))

    return BlackBoxIso(fn, M, N, inv, name="characterization", parts={"phi1": phi1, "phi2": phi2})


def decompose_effect_iso(phi, source: FiniteVNA | None = None, target: FiniteVNA | None = None,
                         validate: int = 20, seed=0) -> CanonicalEffectIso:
    """Recover canonical parameters of a black-box effect order isomorphism.

    Fixes ``alpha = 1/2`` and ``beta`` by ``choose_beta``, reads ``T`` off the
    midpoint, and factors the linear extension of ``psi^{-1} o phi`` into a
    Jordan isomorphism.  The result is checked on ``validate`` fresh effects.
    """
    phi = as_blackbox(phi, source, target)
    M, N = phi.source, phi.target
    if any(n == 1 for n in M.block_dims):
        raise TypeI1Summand(
            f"{M} has 1x1 blocks; coordinatewise isomorphisms there need not be canonical "
            "(use lemmas.abel_extract on commutative algebras)")
    m = phi(M.scalar(0.5))
    _check_two_sided_invertible(m, MidpointNotInvertible)
    params = MidpointParams(DECOMPOSE_ALPHA, choose_beta(m))
    psi = CanonicalEffectIso(identity_jordan(N), params, frac.midpoint_profile_operator_inverse(m, params))

    def g(x):
        return psi.inverse(phi(x))

    g_one = g(M.identity())

    def L(h):
        s = h.norm() + 1.0
        return 2.0 * s * g(h / (2.0 * s) + 0.5) - s * g_one

    try:
        J = factor_unital_linear_order_iso(L, M, N, unital_tol=1e-8)
    except NotUnital as e:
        raise NotJordan(f"linear extension of the normalized map is not unital ({e})") from None
    result = CanonicalEffectIso(J, params, psi.T)
    rng = alg.as_rng(seed)
    for _ in range(validate):
        a = alg.sample(M, "effect", rng)
        res = alg.distance(result(a), phi(a))
        if res > VALIDATION_TOL:
            raise NotJordan(f"recovered map misses the black box by {res:.3e} on a held-out effect")
    return result


# affine isomorphisms of self-adjoint parts and cones


@dataclass(frozen=True, eq=False)
class AffineSaIso:
    J: JordanIso
    x: AlgElement
    b: AlgElement

    def __call__(self, a: AlgElement) -> AlgElement:
        return apply_affine_sa(self, a)

    def inverse(self, y: AlgElement) -> AlgElement:
        xi = alg.inverse(self.x)
        return apply_jordan(invert_jordan(self.J), alg.congruence(xi, y - self.b))


def apply_affine_sa(iso: AffineSaIso, a: AlgElement) -> AlgElement:
    return alg.congruence(iso.x, apply_jordan(iso.J, a)) + iso.b


def random_affine(source: FiniteVNA, rng, cone: bool = False) -> AffineSaIso:
    rng = alg.as_rng(rng)
    J = random_jordan(source, rng)
    blocks = []
    for n in J.target.block_dims:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        blocks.append(g / np.sqrt(n) + 1.5 * np.eye(n))
    x = AlgElement(J.target, tuple(blocks))
    b = J.target.zeros() if cone else alg.sample(J.target, "hermitian", rng)
    return AffineSaIso(J, x, b)


def _affinity_probe(phi, points, scale_ref: float) -> float:
    worst = 0.0
    for a1, a2, w in points:
        lhs = phi(w * a1 + (1.0 - w) * a2)
        rhs = w * phi(a1) + (1.0 - w) * phi(a2)
        worst = max(worst, alg.distance(lhs, rhs) / scale_ref)
    return worst


def _decompose_affine(phi, M: FiniteVNA, N: FiniteVNA, cone: bool, probes: int, seed) -> AffineSaIso:
    rng = alg.as_rng(seed)
    kind = "positive" if cone else "hermitian"
    b = N.zeros() if cone else phi(M.zeros())
    c = phi(M.identity()) - b
    points = [(alg.sample(M, kind, rng), alg.sample(M, kind, rng), w)
              for w in np.linspace(0.2, 0.8, probes)]
    ref = max(1.0, c.norm(), b.norm())
    res = _affinity_probe(phi, points, ref)
    if res > AFFINE_TOL:
        raise NotAffine(f"convex-combination residual {res:.3e}; map is not affine")
    if not alg.is_positive(c) or not alg.is_lm_invertible(c)[0]:
        raise NotAffine("phi(1) - phi(0) is not positive invertible")
    x = alg.sqrt_psd(c)
    xi = alg.hermitian_inverse(x)
    one = M.identity()

    if cone:
        def L(h):
            s = h.norm()
            return alg.congruence(xi, phi(h + s * one) - s * phi(one))
    else:
        def L(h):
            return alg.congruence(xi, phi(h) - b)

    try:
        J = factor_unital_linear_order_iso(L, M, N, unital_tol=1e-8)
    except (NotUnital, NotJordan) as e:
        raise NotAffine(f"normalized map is not a Jordan isomorphism ({e})") from None
    iso = AffineSaIso(J, x, b)
    for a1, a2, _ in points:
        for a in (a1, a2):
            r = alg.distance(iso(a), phi(a)) / ref
            if r > AFFINE_TOL:
                raise NotAffine(f"recovered affine map misses by {r:.3e}")
    return iso


def decompose_sa_iso(phi, source: FiniteVNA | None = None, target: FiniteVNA | None = None,
                     probes: int = 10, seed=0) -> AffineSaIso:
    """``b = phi(0)``, ``x = (phi(1) - b)^{1/2}``, Jordan part from the normalized map."""
    phi = as_blackbox(phi, source, target)
    return _decompose_affine(phi, phi.source, phi.target, False, probes, seed)


def decompose_cone_iso(phi, source: FiniteVNA | None = None, target: FiniteVNA | None = None,
                       probes: int = 10, seed=0) -> AffineSaIso:
    phi = as_blackbox(phi, source, target)
    return _decompose_affine(phi, phi.source, phi.target, True, probes, seed)


# structural checks


class OrthoWitness(NamedTuple):
    p: AlgElement
    q: AlgElement
    reason: str
    residual: float


def _random_orthogonal_pair(M: FiniteVNA, rng):
    """Random projection ``p`` and a random projection ``q`` below ``1 - p``."""
    p_blocks, q_blocks = [], []
    for n in M.block_dims:
        u = alg.haar_unitary(n, rng)
        r = int(rng.integers(0, n + 1))
        lam_p = np.array([1.0] * r + [0.0] * (n - r))
        lam_q = np.zeros(n)
        lam_q[r:] = rng.integers(0, 2, n - r)
        p_blocks.append(alg.with_spectrum(u, lam_p))
        q_blocks.append(alg.with_spectrum(u, lam_q))
    return AlgElement(M, tuple(p_blocks)), AlgElement(M, tuple(q_blocks))


def check_orthoiso(phi, trials: int = 500, seed=0, tol: float = ORTHO_TOL,
                   source: FiniteVNA | None = None) -> tuple[bool, OrthoWitness | None]:
    """Sample orthogonal projection pairs and test that images are orthogonal projections.

    Non-orthogonal pairs (``|pq| > 1e-3``) are also sampled; their images must
    not be orthogonal.  Returns the first violating pair as a witness.
    """
    phi = as_blackbox(phi, source)
    M = phi.source
    rng = alg.as_rng(seed)
    for _ in range(trials):
        p, q = _random_orthogonal_pair(M, rng)
        fp, fq = phi(p), phi(q)
        for img, name in ((fp, "p"), (fq, "q")):
            r = alg.idempotence_residual(img)
            if r > tol:
                return False, OrthoWitness(p, q, f"phi({name}) is not a projection", r)
        r = (fp @ fq).norm()
        if r > tol:
            return False, OrthoWitness(p, q, "phi(p) phi(q) != 0 for orthogonal p, q", r)
        q2 = alg.sample(M, "projection", rng)
        overlap = (p @ q2).norm()
        if overlap > 1e-3:
            r = (fp @ phi(q2)).norm()
            if r <= tol:
                return False, OrthoWitness(p, q2, "non-orthogonal pair mapped to orthogonal images", r)
    return True, None


def direct_sum_split(phi, p: AlgElement, tol: float = 1e-9) -> tuple[BlackBoxIso, BlackBoxIso]:
    """Split along a central projection ``p`` whose image and complement image are central."""
    phi = as_blackbox(phi)
    M, N = phi.source, phi.target
    if p.alg != M:
        raise AlgebraMismatch("p must live in the source algebra")
    if not (alg.is_projection(p) and alg.is_central(p)):
        raise NotCentralImage("p is not a central projection")
    pc = M.identity() - p
    q, qc = phi(p), phi(pc)
    for img in (q, qc):
        if not (alg.is_projection(img, tol) and alg.is_central(img, tol)):
            raise NotCentralImage("image of p is not a central projection")
    if alg.distance(q + qc, N.identity()) > tol:
        raise NotCentralImage("images of p and 1 - p do not sum to 1")
    phi1 = BlackBoxIso(lambda x: phi(x @ p), M, N, name="split1", parts={"p": p, "q": q})
    phi2 = BlackBoxIso(lambda x: phi(x @ pc), M, N, name="split2", parts={"p": pc, "q": qc})
    return phi1, phi2


# order fuzzing


def effect_pair(M: FiniteVNA, rng):
    """Effect pair drawn from a mix of comparable, reversed and unrelated cases."""
    rng = alg.as_rng(rng)
    a = alg.sample(M, "effect", rng)
    kind = int(rng.integers(0, 4))
    if kind == 3:
        return a, alg.sample(M, "effect", rng)
    e = alg.sample(M, "effect", rng)
    room = alg.sqrt_psd(M.identity() - a)
    b = a + rng.uniform(0.05, 1.0) * alg.congruence(room, e)
    if kind == 1:
        return b, a
    if kind == 2:
        # near miss: push b below a along a random rank-one direction
        v = alg.sample_projection_rank(M, [1] * M.k, rng)
        c = b - 1e-2 * v
        if alg.is_effect(c):
            return a, c
    return a, b


def sa_pair(M: FiniteVNA, rng, kind: str = "hermitian"):
    rng = alg.as_rng(rng)
    a = alg.sample(M, kind, rng)
    case = int(rng.integers(0, 3))
    if case == 2:
        return a, alg.sample(M, kind, rng)
    b = a + alg.sample(M, "positive", rng)
    return (a, b) if case == 0 else (b, a)


def order_fuzz(phi, pairs, tol: float = 1e-9):
    """Count pairs where ``a <= b`` and ``phi(a) <= phi(b)`` disagree.

    Returns ``(failures, first_witness)``; the witness is ``(a, b)``.
    """
    failures, witness = 0, None
    for a, b in pairs:
        if alg.loewner_leq(a, b, tol) != alg.loewner_leq(phi(a), phi(b), tol):
            failures += 1
            if witness is None:
                witness = (a, b)
    return failures, witness
