"""Brute-force oracles for the order-theoretic lemmas behind the classification.

Covers the two-projection canonical form and its ``x0`` witness, the 2x2
block inequality versus its Schur-complement form, the minimum of the upper
set of ``{p, a}`` when ``pa = 0``, the fixed-point criterion for projections,
and coordinatewise extraction of commutative effect automorphisms.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, NamedTuple

import numpy as np

from . import algebra as alg
from . import frac
from . import matrix as mx
from .algebra import AlgElement, FiniteVNA
from .errors import (
    HypothesisViolated,
    InvariantViolated,
    NotCommutative,
    NotProjection,
    ParamOutOfRange,
    ProjectionNotFixed,
)

HALMOS_TOL = 1e-8
LEM4_BOUNDARY = 1e-8
FALPHA_TOL = 1e-9
ABEL_TOL = 1e-9
ABEL_EXHAUSTIVE_K = 12


# two-projection canonical form


@dataclass(frozen=True, eq=False)
class HalmosForm:
    """Orthonormal column bases of the four parts and the generic-position angles.

    ``h1`` spans where ``p = 1`` (first ``h1_in_q`` columns in ran q, the rest
    in ker q); ``h2`` spans where ``p = 0`` (first ``h2_in_q`` columns in ran q).
    Column ``j`` of ``k2`` is identified with column ``j`` of ``k1``; ``a`` and
    ``b`` are diagonal in that basis with ``a^2 + b^2 = 1``.
    """

    h1: np.ndarray
    h2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    h1_in_q: int
    h2_in_q: int
    a: np.ndarray
    b: np.ndarray
    p_reconstructed: np.ndarray
    q_reconstructed: np.ndarray

    @property
    def generic_dim(self) -> int:
        return self.k1.shape[1]

    def basis(self) -> np.ndarray:
        return np.column_stack([self.h1, self.h2, self.k1, self.k2])

    def model(self) -> tuple[np.ndarray, np.ndarray]:
        """``p`` and ``q`` written in the assembled basis."""
        d1, d2, m = self.h1.shape[1], self.h2.shape[1], self.generic_dim
        n = d1 + d2 + 2 * m
        p, q = np.zeros((n, n)), np.zeros((n, n))
        p[:d1, :d1] = np.eye(d1)
        q[:self.h1_in_q, :self.h1_in_q] = np.eye(self.h1_in_q)
        s = slice(d1, d1 + self.h2_in_q)
        q[s, s] = np.eye(self.h2_in_q)
        k, l = slice(d1 + d2, d1 + d2 + m), slice(d1 + d2 + m, n)
        p[k, k] = np.eye(m)
        q[k, k] = self.a @ self.a
        q[k, l] = q[l, k] = self.a @ self.b
        q[l, l] = self.b @ self.b
        return p, q


def _as_block(x) -> np.ndarray:
    if isinstance(x, AlgElement):
        if x.alg.k != 1:
            raise ValueError("two-projection decomposition works on one block at a time")
        return x.blocks[0]
    return mx.as_cmat(x)


def _check_projection(m: np.ndarray, name: str, tol: float = alg.PROJ_TOL):
    if not mx.is_hermitian(m) or np.max(np.abs(m @ m - m)) > tol:
        raise NotProjection(f"{name} is not a projection")


def _split(vecs: np.ndarray, lam: np.ndarray, tol: float):
    hi, lo = lam >= 1.0 - tol, lam <= tol
    return vecs[:, hi], vecs[:, lo], vecs[:, ~(hi | lo)], lam[~(hi | lo)]


def _complement(basis: np.ndarray, sub: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(basis) minus span(sub), where sub lies inside span(basis)."""
    if sub.shape[1] == 0:
        return basis
    coords = basis.conj().T @ sub
    u, _, _ = np.linalg.svd(coords, full_matrices=True)
    return basis @ u[:, sub.shape[1]:]


def halmos_decompose(p, q, tol: float = HALMOS_TOL) -> HalmosForm:
    P, Q = _as_block(p), _as_block(q)
    _check_projection(P, "p")
    _check_projection(Q, "q")
    n = P.shape[0]
    dp = mx.eigh(P)
    ran_p = dp.eigenvectors[:, dp.eigenvalues > 0.5]
    ker_p = dp.eigenvectors[:, dp.eigenvalues <= 0.5]

    dc = mx.eigh(ran_p.conj().T @ Q @ ran_p)
    xs = ran_p @ dc.eigenvectors
    pq_in, pq_out, k1, mu = _split(xs, dc.eigenvalues, tol)
    a = np.sqrt(mu)
    b = np.sqrt(1.0 - mu)
    k2 = ((np.eye(n) - P) @ Q @ k1) / (a * b) if k1.shape[1] else np.zeros((n, 0), dtype=complex)

    rest = _complement(ker_p, k2)
    dr = mx.eigh(rest.conj().T @ Q @ rest) if rest.shape[1] else mx.EigDecomp(np.zeros(0), np.zeros((0, 0)))
    ys = rest @ dr.eigenvectors
    q_in, q_out, stray, _ = _split(ys, dr.eigenvalues, 1e-6)
    if stray.shape[1]:
        raise InvariantViolated("compression of q off the generic part is not a projection")

    form = HalmosForm(
        h1=np.column_stack([pq_in, pq_out]), h2=np.column_stack([q_in, q_out]),
        k1=k1, k2=k2, h1_in_q=pq_in.shape[1], h2_in_q=q_in.shape[1],
        a=np.diag(a), b=np.diag(b),
        p_reconstructed=np.zeros((n, n)), q_reconstructed=np.zeros((n, n)))
    u = form.basis()
    pm, qm = form.model()
    object.__setattr__(form, "p_reconstructed", u @ pm @ u.conj().T)
    object.__setattr__(form, "q_reconstructed", u @ qm @ u.conj().T)
    return form


def halmos_residual(form: HalmosForm, p, q) -> float:
    return max(float(np.max(np.abs(form.p_reconstructed - _as_block(p)))),
               float(np.max(np.abs(form.q_reconstructed - _as_block(q)))))


def random_projection_pair(n: int, rng, kind: str = "random"):
    """Projection pair on C^n.

    ``random``: independent random ranks.  ``generic``: ranks ``r`` and
    ``n - r`` in general position, so ``p ^ q = 0`` and ``p v q = 1``.
    ``complement``: ``q = 1 - p``.
    """
    rng = alg.as_rng(rng)

    def proj(r):
        u = alg.haar_unitary(n, rng)
        return alg.with_spectrum(u, np.array([1.0] * r + [0.0] * (n - r)))

    if kind == "random":
        return proj(int(rng.integers(0, n + 1))), proj(int(rng.integers(0, n + 1)))
    if n < 2:
        raise ValueError(f"{kind} pairs need n >= 2")
    r = int(rng.integers(1, n))
    p = proj(r)
    if kind == "complement":
        return p, np.eye(n) - p
    if kind == "generic":
        return p, proj(n - r)
    raise ValueError(f"unknown pair kind {kind!r}")


class Lem3Result(NamedTuple):
    x0: np.ndarray
    ge_p: bool
    ge_half_q: bool
    ge_half: bool
    min_eig_gap: float


def lem3_witness(p, q, tol: float = alg.ORDER_TOL) -> Lem3Result:
    """Build ``x0 = p + f(p^perp q p^perp)`` with ``f(t) = t/(1+t)`` and test it.

    ``min_eig_gap`` is the smallest eigenvalue of ``x0 - 1/2``; it is strictly
    negative exactly when ``p`` and ``q`` have a generic part.
    """
    P, Q = _as_block(p), _as_block(q)
    form = halmos_decompose(P, Q)
    if form.h1_in_q:
        raise HypothesisViolated("ranges of p and q intersect (p meet q is not 0)")
    if form.h2.shape[1] > form.h2_in_q:
        raise HypothesisViolated("kernels of p and q intersect (p join q is not 1)")
    n = P.shape[0]
    perp = np.eye(n) - P
    x0 = P + mx.apply_spectral_fn(perp @ Q @ perp, lambda t: t / (1.0 + t))
    x0 = 0.5 * (x0 + x0.conj().T)
    gap = float(mx.min_eigenvalue(x0 - 0.5 * np.eye(n)))
    return Lem3Result(
        x0=x0,
        ge_p=mx.is_psd(x0 - P, tol),
        ge_half_q=mx.is_psd(x0 - 0.5 * Q, tol),
        ge_half=mx.is_psd(x0 - 0.5 * np.eye(n), tol),
        min_eig_gap=gap,
    )


# block inequality versus its Schur-complement form


@dataclass(frozen=True, eq=False)
class Lem4Instance:
    a: AlgElement
    b: AlgElement
    u: AlgElement
    lam: float
    x: AlgElement

    def __post_init__(self):
        M = self.a.alg
        if any(e.alg != M for e in (self.b, self.u, self.x)):
            raise InvariantViolated("all elements must live in one algebra")
        one = M.identity()
        if alg.distance(self.a @ self.a + self.b @ self.b, one) > 1e-10:
            raise InvariantViolated("a^2 + b^2 != 1")
        if alg.commutator_norm(self.a, self.b) > 1e-10:
            raise InvariantViolated("a and b do not commute")
        if not (alg.is_positive(self.a) and alg.is_positive(self.b) and alg.is_positive(self.x)):
            raise InvariantViolated("a, b and x must be positive")
        if not (alg.is_unitary(self.u) and alg.is_central(self.u)):
            raise InvariantViolated("u must be a central unitary")
        if not self.lam > 1.0:
            raise InvariantViolated(f"lambda must exceed 1, got {self.lam}")


def _lem4_blocks(inst: Lem4Instance):
    """Per block: the doubled matrix ``lam diag(x, 1) - [[a^2, abu], [abu^*, b^2]]`` and the
    Schur form ``lam x - a^2 b^2 (lam - b^2)^{-1} - a^2``."""
    lam = inst.lam
    out = []
    for a, b, u, x in zip(inst.a.blocks, inst.b.blocks, inst.u.blocks, inst.x.blocks):
        n = a.shape[0]
        a2, b2, ab = a @ a, b @ b, a @ b
        big = np.block([[lam * x - a2, -ab @ u], [-(ab @ u).conj().T, lam * np.eye(n) - b2]])
        schur = lam * x - a2 @ b2 @ np.linalg.inv(lam * np.eye(n) - b2) - a2
        out.append((0.5 * (big + big.conj().T), 0.5 * (schur + schur.conj().T)))
    return out


def lem4_margins(inst: Lem4Instance) -> tuple[float, float]:
    """Smallest eigenvalues of the block-inequality gap and the Schur-form gap."""
    blocks = _lem4_blocks(inst)
    return (min(mx.min_eigenvalue(big) for big, _ in blocks),
            min(mx.min_eigenvalue(s) for _, s in blocks))


def lem4_check(inst: Lem4Instance, tol: float = alg.ORDER_TOL) -> tuple[bool, bool]:
    blocks = _lem4_blocks(inst)
    return (all(mx.is_psd(big, tol) for big, _ in blocks),
            all(mx.is_psd(s, tol) for _, s in blocks))


def scalar_lem4_instance(a2: float, lam: float, x: float) -> Lem4Instance:
    M = FiniteVNA((1,))
    return Lem4Instance(M.scalar(np.sqrt(a2)), M.scalar(np.sqrt(1.0 - a2)), M.identity(), lam, M.scalar(x))


def random_lem4_instance(rng, max_dim: int = 3, max_blocks: int = 2) -> Lem4Instance:
    rng = alg.as_rng(rng)
    dims = tuple(int(d) for d in rng.integers(1, max_dim + 1, int(rng.integers(1, max_blocks + 1))))
    M = FiniteVNA(dims)
    a_blocks, b_blocks = [], []
    for n in dims:
        u = alg.haar_unitary(n, rng)
        theta = rng.uniform(0.0, np.pi / 2, n)
        a_blocks.append(alg.with_spectrum(u, np.cos(theta)))
        b_blocks.append(alg.with_spectrum(u, np.sin(theta)))
    a, b = AlgElement(M, tuple(a_blocks)), AlgElement(M, tuple(b_blocks))
    lam = float(rng.uniform(1.0, 5.0))
    while lam <= 1.0:
        lam = float(rng.uniform(1.0, 5.0))
    one = M.identity()
    a2, b2 = a @ a, b @ b
    threshold = (a2 @ b2 @ alg.inverse(lam * one - b2) + a2).sym() / lam
    if rng.uniform() < 0.5:
        x = float(rng.uniform(0.05, 3.0)) * threshold.norm() * alg.sample(M, "positive", rng) / 1.5
    else:
        h = alg.sample(M, "hermitian", rng) / 2.0
        x = alg.spectral_map(threshold + float(rng.uniform(-0.3, 0.3)) * h, lambda t: np.maximum(t, 0.0))
    return Lem4Instance(a, b, alg.sample(M, "central_unitary", rng), lam, x)


def sample_lem4_nonboundary(rng, boundary: float = LEM4_BOUNDARY, max_tries: int = 100, **kw):
    """Random instance whose margins both clear ``boundary``; returns ``(instance, resamples)``."""
    rng = alg.as_rng(rng)
    for tries in range(max_tries):
        inst = random_lem4_instance(rng, **kw)
        lhs, rhs = lem4_margins(inst)
        if min(abs(lhs), abs(rhs)) >= boundary:
            return inst, tries
    raise RuntimeError("could not draw a non-boundary instance")


# upper set of {p, a} with pa = 0


class Lem1Result(NamedTuple):
    ok: bool
    accepted: int
    counterexample: AlgElement | None


def _lem1_candidates(p: AlgElement, a: AlgElement, rng):
    M = p.alg
    perp = M.identity() - p
    room = alg.sqrt_psd(perp - a)
    e = alg.sample(M, "effect", rng)
    member = p + a + alg.congruence(room, e)
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return member
    if kind == 1:
        # pull a member towards a random effect; survives the filter only sometimes
        w = float(rng.uniform(0.0, 0.2))
        return (1.0 - w) * member + w * alg.sample(M, "effect", rng)
    return alg.sample(M, "effect", rng)


def lem1_run(p: AlgElement, a: AlgElement, trials: int = 500, rng=0, tol: float = alg.ORDER_TOL) -> Lem1Result:
    if not alg.is_projection(p):
        raise HypothesisViolated("p is not a projection")
    if not alg.is_effect(a):
        raise HypothesisViolated("a is not an effect")
    if (p @ a).norm() > 1e-10:
        raise HypothesisViolated("pa != 0")
    rng = alg.as_rng(rng)
    top = p + a
    if not (alg.loewner_leq(p, top, tol) and alg.loewner_leq(a, top, tol)):
        return Lem1Result(False, 0, top)
    accepted = 0
    for _ in range(trials):
        x = _lem1_candidates(p, a, rng)
        if not (alg.is_effect(x, tol) and alg.loewner_leq(p, x, tol) and alg.loewner_leq(a, x, tol)):
            continue
        accepted += 1
        if not alg.loewner_leq(top, x, 1e-8):
            return Lem1Result(False, accepted, x)
    return Lem1Result(True, accepted, None)


def lem1_check(p: AlgElement, a: AlgElement, trials: int = 500, rng=0) -> bool:
    return lem1_run(p, a, trials, rng).ok


def random_lem1_pair(M: FiniteVNA, rng):
    """Projection ``p`` and an effect ``a`` living under ``1 - p``."""
    rng = alg.as_rng(rng)
    p_blocks, a_blocks = [], []
    for n in M.block_dims:
        u = alg.haar_unitary(n, rng)
        r = int(rng.integers(0, n + 1))
        p_blocks.append(alg.with_spectrum(u, np.array([1.0] * r + [0.0] * (n - r))))
        a_blocks.append(alg.with_spectrum(u, np.concatenate([np.zeros(r), rng.uniform(0, 1, n - r)])))
    return AlgElement(M, tuple(p_blocks)), AlgElement(M, tuple(a_blocks))


# projections as fixed points of the fractional map


def projection_via_falpha(a: AlgElement, alpha: float, tol: float = FALPHA_TOL) -> bool:
    alpha = float(alpha)
    if alpha == 0.0 or not alpha < 1.0:
        raise ParamOutOfRange(f"need alpha < 1 and alpha != 0, got {alpha}")
    return alg.distance(frac.frac_map(a, alpha), a) <= tol


def fuzz_effect_for_projection_test(M: FiniteVNA, rng) -> AlgElement:
    """Exact projections, projections with 1e-12 noise, and generic effects in equal shares."""
    rng = alg.as_rng(rng)
    kind = int(rng.integers(0, 3))
    if kind == 2:
        return alg.sample(M, "effect", rng)
    p = alg.sample(M, "projection", rng)
    if kind == 0:
        return p
    noise = alg.sample(M, "hermitian", rng) * 5e-13
    return alg.spectral_map(p + noise, lambda t: np.clip(t, 0.0, 1.0))


# commutative effect automorphisms


@dataclass(eq=False)
class AbelResult:
    """``taus[i, j]`` is coordinate ``i`` of ``phi(grid[j] e_i)``."""

    phi: Callable
    alg: FiniteVNA
    grid: np.ndarray
    taus: np.ndarray
    projections_checked: int

    def tau(self, i: int, t: float) -> float:
        e = np.zeros(self.alg.k)
        e[i] = t
        return float(self.phi(self.alg.central(e)).blocks[i][0, 0].real)

    def predict(self, v: np.ndarray) -> np.ndarray:
        return np.array([self.tau(i, t) for i, t in enumerate(v)])


def _vector(M: FiniteVNA, v) -> AlgElement:
    return M.central(list(v))


def _coords(x: AlgElement) -> np.ndarray:
    return np.array([b[0, 0].real for b in x.blocks])


def abel_extract(phi: Callable, M: FiniteVNA, grid_size: int = 100, rng=0) -> AbelResult:
    """Sample the coordinate functions of an automorphism of a commutative effect algebra.

    Every 0/1 vector must be fixed; all ``2^k`` are checked when ``k <= 12``,
    otherwise 4096 random ones.
    """
    if not M.is_commutative:
        raise NotCommutative(f"{M} has a block larger than 1x1")
    k = M.k
    rng = alg.as_rng(rng)
    if k <= ABEL_EXHAUSTIVE_K:
        vecs = product((0.0, 1.0), repeat=k)
    else:
        vecs = (rng.integers(0, 2, k).astype(float) for _ in range(4096))
    checked = 0
    for v in vecs:
        v = np.array(v)
        img = _coords(phi(_vector(M, v)))
        checked += 1
        if np.max(np.abs(img - v)) > ABEL_TOL:
            raise ProjectionNotFixed(f"0/1 vector {v.astype(int).tolist()} moved to {img.tolist()}")
    grid = np.arange(grid_size + 1) / grid_size
    taus = np.zeros((k, grid.size))
    for i in range(k):
        for j, t in enumerate(grid):
            e = np.zeros(k)
            e[i] = t
            taus[i, j] = _coords(phi(_vector(M, e)))[i]
    if np.any(np.diff(taus, axis=1) <= 0.0):
        i = int(np.argwhere(np.diff(taus, axis=1) <= 0.0)[0, 0])
        raise InvariantViolated(f"coordinate function {i} is not strictly increasing on the grid")
    return AbelResult(phi, M, grid, taus, checked)


def abel_reconstruction_residual(res: AbelResult, trials: int = 100, rng=0) -> float:
    """Largest gap between ``phi(v)`` and the coordinatewise prediction on random vectors."""
    rng = alg.as_rng(rng)
    worst = 0.0
    for _ in range(trials):
        v = rng.uniform(0.0, 1.0, res.alg.k)
        worst = max(worst, float(np.max(np.abs(_coords(res.phi(_vector(res.alg, v))) - res.predict(v)))))
    return worst


def coordinatewise(fns) -> Callable:
    """Effect automorphism of a commutative algebra applying ``fns[i]`` to coordinate ``i``."""
    fns = list(fns)

    def phi(x: AlgElement) -> AlgElement:
        return _vector(x.alg, [float(f(t)) for f, t in zip(fns, _coords(x))])

    return phi
