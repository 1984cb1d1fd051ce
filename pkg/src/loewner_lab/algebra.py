"""Finite-dimensional von Neumann algebras as block direct sums.

A ``FiniteVNA`` with block dimensions ``(n_1, ..., n_k)`` is the algebra of
block-diagonal matrices ``M_{n_1}(C) + ... + M_{n_k}(C)``.  Its center is the
block-scalar subalgebra.  Elements are immutable tuples of dense blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import matrix as mx
from .errors import AlgebraMismatch, NotHermitian, NotPositive

ORDER_TOL = 1e-10
PROJ_TOL = 1e-10

SAMPLE_KINDS = (
    "effect",
    "projection",
    "positive_invertible",
    "positive",
    "hermitian",
    "unitary",
    "central_unitary",
)


@dataclass(frozen=True)
class FiniteVNA:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be a non-empty list of positive ints, got {self.block_dims!r}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def of(cls, *dims) -> FiniteVNA:
        if len(dims) == 1 and not isinstance(dims[0], int):
            dims = tuple(dims[0])
        return cls(tuple(dims))

    @property
    def k(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra, sum of n_i^2."""
        return sum(n * n for n in self.block_dims)

    @property
    def hilbert_dim(self) -> int:
        return sum(self.block_dims)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    def element(self, blocks) -> AlgElement:
        return AlgElement(self, tuple(np.array(b, dtype=complex) for b in blocks))

    def zeros(self) -> AlgElement:
        return AlgElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.block_dims))

    def identity(self) -> AlgElement:
        return self.scalar(1.0)

    def scalar(self, c) -> AlgElement:
        return AlgElement(self, tuple(c * np.eye(n, dtype=complex) for n in self.block_dims))

    def central(self, values: Sequence) -> AlgElement:
        """Central element with scalar ``values[i]`` on block ``i``."""
        if len(values) != self.k:
            raise ValueError("one value per block required")
        return AlgElement(self, tuple(c * np.eye(n, dtype=complex) for c, n in zip(values, self.block_dims)))

    def block_indicator(self, i: int) -> AlgElement:
        return self.central([1.0 if j == i else 0.0 for j in range(self.k)])

    def embed(self, i: int, block) -> AlgElement:
        """Element equal to ``block`` on block ``i`` and zero elsewhere."""
        blocks = [np.zeros((n, n), dtype=complex) for n in self.block_dims]
        blocks[i] = np.array(block, dtype=complex)
        return AlgElement(self, tuple(blocks))

    def from_dense(self, m) -> AlgElement:
        m = np.asarray(m, dtype=complex)
        out, off = [], 0
        for n in self.block_dims:
            out.append(m[off:off + n, off:off + n].copy())
            off += n
        return AlgElement(self, tuple(out))

    def __str__(self):
        return "+".join(f"M{n}" for n in self.block_dims)


@dataclass(frozen=True, eq=False)
class AlgElement:
    alg: FiniteVNA
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(mx.as_cmat(b) for b in self.blocks)
        if len(blocks) != self.alg.k:
            raise AlgebraMismatch(f"{len(blocks)} blocks given for algebra {self.alg}")
        for b, n in zip(blocks, self.alg.block_dims):
            if b.shape != (n, n):
                raise AlgebraMismatch(f"block of shape {b.shape} where {n}x{n} expected")
        object.__setattr__(self, "blocks", blocks)

    def _same(self, other: AlgElement):
        if not isinstance(other, AlgElement):
            return NotImplemented
        if other.alg != self.alg:
            raise AlgebraMismatch(f"{self.alg} vs {other.alg}")
        return other

    def map_blocks(self, f: Callable) -> AlgElement:
        return AlgElement(self.alg, tuple(f(b) for b in self.blocks))

    def __add__(self, other):
        if np.isscalar(other):
            return self + self.alg.scalar(other)
        other = self._same(other)
        return AlgElement(self.alg, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    __radd__ = __add__

    def __sub__(self, other):
        if np.isscalar(other):
            return self - self.alg.scalar(other)
        other = self._same(other)
        return AlgElement(self.alg, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.map_blocks(lambda b: -b)

    def __mul__(self, c):
        if isinstance(c, AlgElement):
            raise TypeError("use @ for the algebra product")
        return self.map_blocks(lambda b: c * b)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.map_blocks(lambda b: b / c)

    def __matmul__(self, other):
        other = self._same(other)
        return AlgElement(self.alg, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    @property
    def H(self) -> AlgElement:
        return self.map_blocks(lambda b: b.conj().T)

    def sym(self) -> AlgElement:
        """Hermitian part ``(x + x^*)/2``."""
        return self.map_blocks(lambda b: 0.5 * (b + b.conj().T))

    def norm(self) -> float:
        """Operator norm: the largest block spectral norm."""
        return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in self.blocks)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(b))) for b in self.blocks)

    def dense(self) -> np.ndarray:
        n = self.alg.hilbert_dim
        out = np.zeros((n, n), dtype=complex)
        off = 0
        for b in self.blocks:
            m = b.shape[0]
            out[off:off + m, off:off + m] = b
            off += m
        return out

    def is_hermitian(self, tol: float = mx.HERMITIAN_TOL) -> bool:
        return all(mx.is_hermitian(b, tol) for b in self.blocks)

    def eigvals(self) -> np.ndarray:
        """Eigenvalues of all blocks, concatenated and sorted."""
        check_hermitian(self)
        return np.sort(np.concatenate([mx.eigvalsh(b) for b in self.blocks]))

    def __repr__(self):
        return f"AlgElement({self.alg}, {[b.tolist() for b in self.blocks]!r})"


def check_hermitian(a: AlgElement) -> AlgElement:
    if not a.is_hermitian():
        raise NotHermitian("element is not Hermitian")
    return a


def distance(a: AlgElement, b: AlgElement) -> float:
    return (a - b).norm()


def commutator_norm(a: AlgElement, b: AlgElement) -> float:
    return (a @ b - b @ a).norm()


def spectral_map(a: AlgElement, f: Callable) -> AlgElement:
    """Blockwise functional calculus of a Hermitian element."""
    check_hermitian(a)
    return a.map_blocks(lambda b: mx.apply_spectral_fn(b, f))


def sqrt_psd(a: AlgElement, tol: float = ORDER_TOL) -> AlgElement:
    """Positive square root; eigenvalues in ``[-tol*scale, 0)`` are clipped to zero."""

    def root(b):
        d = mx.eigh(b)
        lam = d.eigenvalues
        scale = max(1.0, float(np.max(np.abs(lam)))) if lam.size else 1.0
        if lam.size and lam[0] < -tol * scale:
            raise NotPositive(f"eigenvalue {lam[0]:.3e} is negative")
        return mx.apply_spectral_fn(b, lambda t: np.sqrt(np.clip(t, 0.0, None)), d)

    check_hermitian(a)
    return a.map_blocks(root)


def inverse(a: AlgElement) -> AlgElement:
    def inv(b):
        try:
            return np.linalg.inv(b)
        except np.linalg.LinAlgError as exc:
            from .errors import SingularIntermediate

            raise SingularIntermediate(str(exc)) from exc

    return a.map_blocks(inv)


def hermitian_inverse(a: AlgElement) -> AlgElement:
    return inverse(a).sym()


def inv_sqrt(a: AlgElement) -> AlgElement:
    """``a^{-1/2}`` for positive invertible ``a``."""
    return spectral_map(a, lambda t: 1.0 / np.sqrt(t))


def congruence(x: AlgElement, a: AlgElement) -> AlgElement:
    """``x a x^*``, symmetrized."""
    return (x @ a @ x.H).sym()


def loewner_leq(a: AlgElement, b: AlgElement, tol: float = ORDER_TOL) -> bool:
    """``a <= b`` in the Loewner order, i.e. ``b - a`` positive blockwise."""
    if a.alg != b.alg:
        raise AlgebraMismatch(f"{a.alg} vs {b.alg}")
    diff = b - a
    return all(mx.is_psd(blk, tol) for blk in diff.blocks)


def min_eig(a: AlgElement) -> float:
    check_hermitian(a)
    return min(mx.min_eigenvalue(b) for b in a.blocks)


def order_margin(a: AlgElement, b: AlgElement) -> float:
    """Smallest eigenvalue of ``b - a``; nonnegative iff ``a <= b``."""
    return min_eig(b - a)


def is_positive(a: AlgElement, tol: float = ORDER_TOL) -> bool:
    return loewner_leq(a.alg.zeros(), a, tol)


def is_effect(a: AlgElement, tol: float = ORDER_TOL) -> bool:
    check_hermitian(a)
    return is_positive(a, tol) and loewner_leq(a, a.alg.identity(), tol)


def idempotence_residual(a: AlgElement) -> float:
    return (a @ a - a).norm()


def is_projection(a: AlgElement, tol: float = PROJ_TOL) -> bool:
    check_hermitian(a)
    return idempotence_residual(a) <= tol


def is_unitary(u: AlgElement, tol: float = 1e-10) -> bool:
    return (u @ u.H - u.alg.identity()).norm() <= tol


def is_central(z: AlgElement, tol: float = 1e-10) -> bool:
    """Central iff every block is a scalar multiple of the identity."""
    for b in z.blocks:
        c = np.trace(b) / b.shape[0]
        if np.max(np.abs(b - c * np.eye(b.shape[0]))) > tol * max(1.0, abs(c)):
            return False
    return True


def _require_positive(a: AlgElement, tol: float):
    check_hermitian(a)
    if not is_positive(a, tol):
        raise NotPositive("element is not positive")


def support_projection(a: AlgElement, tol: float = ORDER_TOL) -> AlgElement:
    """Spectral projection onto the range of a positive element."""
    _require_positive(a, tol)
    cut = tol * max(a.norm(), mx.ABS_FLOOR)

    def supp(b):
        return mx.apply_spectral_fn(b, lambda t: (t > cut).astype(float))

    return a.map_blocks(supp)


def kernel_projection(a: AlgElement, tol: float = ORDER_TOL) -> AlgElement:
    return a.alg.identity() - support_projection(a, tol)


def minimal_central_projections(alg: FiniteVNA) -> list[AlgElement]:
    return [alg.block_indicator(i) for i in range(alg.k)]


def is_lm_invertible(a: AlgElement, tol: float = ORDER_TOL) -> tuple[bool, AlgElement | None]:
    """Invertibility with a certificate.

    At finite dimension the locally measurable inverse exists iff ``a`` is
    invertible.  Otherwise the kernel projection ``b`` is returned: any ``x``
    with ``0 <= x <= a`` and ``x <= b`` vanishes, since ``b x b <= b a b = 0``.
    """
    _require_positive(a, tol)
    nrm = a.norm()
    if nrm == 0.0:
        return False, a.alg.identity()
    if min_eig(a) > tol * nrm:
        return True, None
    return False, kernel_projection(a, tol)


def common_lower_bound_trials(a: AlgElement, b: AlgElement, trials: int, rng, tol: float = ORDER_TOL) -> tuple[int, float]:
    """Search for nonzero ``x >= 0`` with ``x <= a`` and ``x <= b``.

    Candidates are ``c a^{1/2} e a^{1/2}``, ``c b^{1/2} e b^{1/2}`` and scaled
    random effects over a ladder of scales ``c``; only candidates passing both
    order predicates are kept.  Returns (number accepted, largest accepted norm).
    """
    rng = as_rng(rng)
    ra, rb = sqrt_psd(a), sqrt_psd(b)
    scales = (1.0, 1e-3, 1e-6, 1e-9, 1e-12)
    accepted, worst = 0, 0.0
    for t in range(trials):
        e = sample(a.alg, "effect", rng)
        c = scales[t % len(scales)]
        kind = t % 3
        if kind == 0:
            x = c * congruence(ra, e)
        elif kind == 1:
            x = c * congruence(rb, e)
        else:
            x = c * e
        if loewner_leq(x, a, tol) and loewner_leq(x, b, tol):
            accepted += 1
            worst = max(worst, x.norm())
    return accepted, worst


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar unitary via QR of a complex Gaussian with phase-fixed diagonal."""
    rng = as_rng(rng)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    ph = d / np.where(np.abs(d) == 0, 1.0, np.abs(d))
    return q * ph


def with_spectrum(u: np.ndarray, lam: np.ndarray) -> np.ndarray:
    m = (u * lam) @ u.conj().T
    return 0.5 * (m + m.conj().T)


def sample(alg: FiniteVNA, kind: str, rng) -> AlgElement:
    """Random element of the given kind; deterministic in the seed."""
    rng = as_rng(rng)
    blocks = []
    for n in alg.block_dims:
        if kind == "effect":
            blocks.append(with_spectrum(haar_unitary(n, rng), rng.uniform(0.0, 1.0, n)))
        elif kind == "projection":
            lam = rng.integers(0, 2, n).astype(float)
            blocks.append(with_spectrum(haar_unitary(n, rng), lam))
        elif kind == "positive":
            blocks.append(with_spectrum(haar_unitary(n, rng), rng.uniform(0.0, 3.0, n)))
        elif kind == "positive_invertible":
            blocks.append(with_spectrum(haar_unitary(n, rng), rng.uniform(0.2, 3.0, n)))
        elif kind == "hermitian":
            blocks.append(with_spectrum(haar_unitary(n, rng), rng.uniform(-2.0, 2.0, n)))
        elif kind == "unitary":
            blocks.append(haar_unitary(n, rng))
        elif kind == "central_unitary":
            blocks.append(np.exp(2j * np.pi * rng.uniform()) * np.eye(n, dtype=complex))
        else:
            raise ValueError(f"unknown sample kind {kind!r}; expected one of {SAMPLE_KINDS}")
    return AlgElement(alg, tuple(blocks))


def sample_projection_rank(alg: FiniteVNA, ranks: Iterable[int], rng) -> AlgElement:
    rng = as_rng(rng)
    blocks = []
    for n, r in zip(alg.block_dims, ranks):
        lam = np.array([1.0] * r + [0.0] * (n - r))
        blocks.append(with_spectrum(haar_unitary(n, rng), lam))
    return AlgElement(alg, tuple(blocks))


def hermitian_basis(alg: FiniteVNA) -> list[AlgElement]:
    """Real basis of the Hermitian part: ``e_kk``, ``e_kl + e_lk``, ``i(e_kl - e_lk)``."""
    out = []
    for i, n in enumerate(alg.block_dims):
        for k in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[k, k] = 1.0
            out.append(alg.embed(i, m))
        for k in range(n):
            for l in range(k + 1, n):
                m = np.zeros((n, n), dtype=complex)
                m[k, l] = m[l, k] = 1.0
                out.append(alg.embed(i, m))
                m = np.zeros((n, n), dtype=complex)
                m[k, l] = 1j
                m[l, k] = -1j
                out.append(alg.embed(i, m))
    return out
