"""Jordan *-isomorphisms between finite-dimensional block algebras.

At finite dimension every Jordan *-isomorphism is a block permutation
followed, block by block, by an optional transpose and a unitary
conjugation.  ``JordanIso`` stores exactly that data; ``factor_unital_linear_order_iso``
recovers it from a black-box unital linear order isomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra as alg
from .algebra import AlgElement, FiniteVNA
from .errors import AlgebraMismatch, NotJordan, NotUnital

ANTI_RATIO = 0.5
JORDAN_TOL = 1e-6
UNITAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class JordanIso:
    """``perm[i]`` is the target block of source block ``i``; ``transpose`` is
    indexed by source block, ``unitaries`` by target block."""

    source: FiniteVNA
    target: FiniteVNA
    perm: tuple
    transpose: tuple
    unitaries: tuple

    def __post_init__(self):
        perm = tuple(int(j) for j in self.perm)
        flags = tuple(bool(t) for t in self.transpose)
        us = tuple(np.array(u, dtype=complex) for u in self.unitaries)
        k = self.source.k
        if self.target.k != k or len(perm) != k or len(flags) != k or len(us) != k:
            raise AlgebraMismatch("block counts of source, target and parameters disagree")
        if sorted(perm) != list(range(k)):
            raise AlgebraMismatch(f"{perm} is not a permutation")
        for i, j in enumerate(perm):
            n = self.source.block_dims[i]
            if self.target.block_dims[j] != n or us[j].shape != (n, n):
                raise AlgebraMismatch(f"source block {i} (dim {n}) cannot map to target block {j}")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "transpose", flags)
        object.__setattr__(self, "unitaries", us)

    def __call__(self, a: AlgElement) -> AlgElement:
        return apply_jordan(self, a)


def apply_jordan(J: JordanIso, a: AlgElement) -> AlgElement:
    if a.alg != J.source:
        raise AlgebraMismatch(f"element of {a.alg} given to a map on {J.source}")
    out = [None] * J.target.k
    for i, j in enumerate(J.perm):
        b = a.blocks[i].T if J.transpose[i] else a.blocks[i]
        u = J.unitaries[j]
        out[j] = u @ b @ u.conj().T
    return AlgElement(J.target, tuple(out))


def identity_jordan(a: FiniteVNA) -> JordanIso:
    return JordanIso(a, a, tuple(range(a.k)), (False,) * a.k,
                     tuple(np.eye(n, dtype=complex) for n in a.block_dims))


def compose_jordan(J2: JordanIso, J1: JordanIso) -> JordanIso:
    """``J2 o J1``."""
    if J1.target != J2.source:
        raise AlgebraMismatch(f"cannot compose: {J1.target} vs {J2.source}")
    k = J1.source.k
    perm, flags, us = [0] * k, [False] * k, [None] * k
    for i in range(k):
        j = J1.perm[i]
        m = J2.perm[j]
        perm[i] = m
        flags[i] = J1.transpose[i] != J2.transpose[j]
        # a transpose in J2 turns u1 (.) u1^* into conj(u1) (.)^T conj(u1)^*
        u1 = J1.unitaries[j].conj() if J2.transpose[j] else J1.unitaries[j]
        us[m] = J2.unitaries[m] @ u1
    return JordanIso(J1.source, J2.target, tuple(perm), tuple(flags), tuple(us))


def invert_jordan(J: JordanIso) -> JordanIso:
    k = J.source.k
    perm, flags, us = [0] * k, [False] * k, [None] * k
    for i, j in enumerate(J.perm):
        perm[j] = i
        flags[j] = J.transpose[i]
        u = J.unitaries[j]
        us[i] = u.T if J.transpose[i] else u.conj().T
    return JordanIso(J.target, J.source, tuple(perm), tuple(flags), tuple(us))


def random_jordan(source: FiniteVNA, rng, target: FiniteVNA | None = None,
                  allow_transpose: bool = True) -> JordanIso:
    """Random Jordan isomorphism: random permutation of equal-size blocks,
    random transpose flags and Haar unitaries."""
    rng = alg.as_rng(rng)
    target = source if target is None else target
    if sorted(source.block_dims) != sorted(target.block_dims):
        raise AlgebraMismatch(f"{source} and {target} are not Jordan isomorphic")
    free = {}
    for j, n in enumerate(target.block_dims):
        free.setdefault(n, []).append(j)
    for n in free:
        free[n] = list(rng.permutation(free[n]))
    perm = [free[n].pop() for n in source.block_dims]
    flags = [bool(allow_transpose and n > 1 and rng.integers(0, 2)) for n in source.block_dims]
    us = [None] * target.k
    for i, j in enumerate(perm):
        us[j] = alg.haar_unitary(source.block_dims[i], rng)
    return JordanIso(source, target, tuple(perm), tuple(flags), tuple(us))


def functional_distance(f: Callable, g: Callable, source: FiniteVNA) -> float:
    """Largest discrepancy of two linear maps over the Hermitian basis."""
    return max(alg.distance(f(h), g(h)) for h in alg.hermitian_basis(source))


def _complexified_block(L: Callable, source: FiniteVNA, i: int, j: int) -> Callable:
    def Lc(x: np.ndarray) -> np.ndarray:
        re = 0.5 * (x + x.conj().T)
        im = (x - x.conj().T) / 2j
        a = L(source.embed(i, re)).blocks[j]
        b = L(source.embed(i, im)).blocks[j]
        return a + 1j * b

    return Lc


def _match_blocks(L: Callable, source: FiniteVNA, target: FiniteVNA, tol: float) -> list:
    perm = []
    for i in range(source.k):
        z = L(source.block_indicator(i))
        hits = []
        for j, (b, n) in enumerate(zip(z.blocks, target.block_dims)):
            if np.max(np.abs(b - np.eye(n))) <= tol:
                hits.append(j)
            elif np.max(np.abs(b)) > tol:
                raise NotJordan(f"image of central projection {i} is not a minimal central projection")
        if len(hits) != 1:
            raise NotJordan(f"image of central projection {i} covers {len(hits)} target blocks")
        j = hits[0]
        if target.block_dims[j] != source.block_dims[i]:
            raise NotJordan(f"block {i} of dim {source.block_dims[i]} maps to block {j} of dim {target.block_dims[j]}")
        perm.append(j)
    if sorted(perm) != list(range(target.k)):
        raise NotJordan(f"block assignment {perm} is not a bijection")
    return perm


def _detect_transpose(Lc: Callable, n: int, tol: float) -> bool:
    if n == 1:
        return False
    e = np.zeros((n, n), dtype=complex)
    e[0, 0] = 1.0
    f = np.zeros((n, n), dtype=complex)
    f[0, 1] = f[1, 0] = 1.0
    Le, Lf = Lc(e), Lc(f)
    Lef = Lc(e @ f)
    scale = np.linalg.norm(Le @ Lf - Lf @ Le)
    if scale <= tol:
        raise NotJordan("image of a non-commuting pair commutes")
    hom = np.linalg.norm(Lef - Le @ Lf) / scale
    anti = np.linalg.norm(Lef - Lf @ Le) / scale
    if hom <= tol:
        return False
    if hom > ANTI_RATIO and anti <= tol:
        return True
    raise NotJordan(f"multiplicativity residual {hom:.3e} (reversed {anti:.3e}) fits neither case")


def _recover_unitary(Lc: Callable, n: int) -> np.ndarray:
    def unit(r, c):
        m = np.zeros((n, n), dtype=complex)
        m[r, c] = 1.0
        return m

    p1 = Lc(unit(0, 0))
    col = int(np.argmax(np.linalg.norm(p1, axis=0)))
    u1 = p1[:, col]
    nrm = np.linalg.norm(u1)
    if nrm == 0.0:
        raise NotJordan("image of a rank-one projection vanishes")
    u1 = u1 / nrm
    cols = [u1] + [Lc(unit(m, 0)) @ u1 for m in range(1, n)]
    u = np.column_stack(cols)
    w, _, vh = np.linalg.svd(u)
    u = w @ vh
    first = u[:, 0]
    k = int(np.argmax(np.abs(first) > 1e-8))
    ph = first[k] / abs(first[k])
    return u * ph.conjugate()


def factor_unital_linear_order_iso(L: Callable, source: FiniteVNA, target: FiniteVNA,
                         unital_tol: float = UNITAL_TOL, jordan_tol: float = JORDAN_TOL) -> JordanIso:
    """Factor a unital linear order isomorphism into Jordan parameters.

    ``L`` is evaluated on Hermitian elements of ``source`` only and extended
    complex-linearly.  Central projections fix the block permutation, the
    multiplicativity test on ``e_11`` and ``e_12 + e_21`` fixes the transpose
    flag, and the images of matrix units ``e_m1`` give the unitary columns.
    """
    if sorted(source.block_dims) != sorted(target.block_dims):
        raise NotJordan(f"{source} and {target} are not Jordan isomorphic")
    one = L(source.identity())
    if one.alg != target:
        raise AlgebraMismatch(f"map lands in {one.alg}, expected {target}")
    err = alg.distance(one, target.identity())
    if err > unital_tol:
        raise NotUnital(f"|L(1) - 1| = {err:.3e}")
    perm = _match_blocks(L, source, target, jordan_tol)
    flags, us = [False] * source.k, [None] * target.k
    for i, j in enumerate(perm):
        n = source.block_dims[i]
        Lc = _complexified_block(L, source, i, j)
        flags[i] = _detect_transpose(Lc, n, jordan_tol)
        if flags[i]:
            Lp = lambda x, Lc=Lc: Lc(x.T)  # noqa: E731
        else:
            Lp = Lc
        us[j] = _recover_unitary(Lp, n)
    J = JordanIso(source, target, tuple(perm), tuple(flags), tuple(us))
    for h in alg.hermitian_basis(source):
        res = alg.distance(L(h), apply_jordan(J, h))
        if res > jordan_tol:
            raise NotJordan(f"best Jordan fit leaves residual {res:.3e}")
    return J
