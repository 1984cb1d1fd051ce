"""Dense Hermitian linear algebra on single blocks.

The eigensolver is a cyclic complex Jacobi iteration: every rotation is a
phase fix ``diag(1, e^{-i phi})`` followed by a real Givens rotation, so the
accumulated eigenvector matrix stays unitary to rounding.  Blocks are small
(at most 64, in practice at most 16), which is where Jacobi is both accurate
and fast enough.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-12
ABS_FLOOR = 1e-14
MAX_SWEEPS = 100
OFF_TOL = 1e-13
MAX_DIM = 64
SMALL_DIM = 8


class EigDecomp(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_cmat(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def scale_of(h: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0


def hermitian_residual(h: np.ndarray) -> float:
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(h - h.conj().T)))


def is_hermitian(h, tol: float = HERMITIAN_TOL) -> bool:
    h = as_cmat(h)
    return h.shape[0] == h.shape[1] and hermitian_residual(h) <= tol * scale_of(h)


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate and return the symmetrized matrix ``(h + h^*)/2``."""
    h = as_cmat(h)
    if h.shape[0] != h.shape[1]:
        raise NotHermitian(f"matrix is not square: {h.shape}")
    res = hermitian_residual(h)
    if res > tol * scale_of(h):
        raise NotHermitian(f"Hermitian residual {res:.3e} exceeds tolerance")
    return 0.5 * (h + h.conj().T)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eigh(h, max_sweeps: int = MAX_SWEEPS) -> EigDecomp:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back ascending, eigenvectors as the columns of a unitary
    matrix.  Inside a degenerate cluster the eigenvector basis is arbitrary.
    """
    a = check_hermitian(h).copy()
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"block dimension {n} exceeds {MAX_DIM}")
    fro = float(np.linalg.norm(a))
    if n <= 1 or fro == 0.0:
        return EigDecomp(np.real(np.diag(a)).copy(), np.eye(n, dtype=complex))

    threshold = max(OFF_TOL * fro, ABS_FLOOR * 1e-2)
    if n <= SMALL_DIM:
        lam, v = _jacobi_lists(a, threshold, 1e-17 * fro, max_sweeps)
    else:
        lam, v = _jacobi_numpy(a, threshold, 1e-17 * fro, max_sweeps)
    order = np.argsort(lam, kind="stable")
    return EigDecomp(lam[order].copy(), v[:, order].copy())


def _rotation(app: float, aqq: float, apq: complex):
    mag = abs(apq)
    phase = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    if theta == 0.0:
        t = 1.0
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # V = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    return c, s, -s * phase.conjugate(), c * phase.conjugate()


def _jacobi_numpy(a, threshold, skip, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                if abs(apq) <= skip:
                    continue
                v00, v01, v10, v11 = _rotation(a[p, p].real, a[q, q].real, apq)
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = cp * v00 + cq * v10
                a[:, q] = cp * v01 + cq * v11
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = rp * v00 + rq * v10.conjugate()
                a[q, :] = rp * v01 + rq * v11.conjugate()
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                up = v[:, p].copy()
                uq = v[:, q]
                v[:, p] = up * v00 + uq * v10
                v[:, q] = up * v01 + uq * v11
    else:
        if _off_norm(a) > threshold:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.real(np.diag(a)).copy(), v


def _jacobi_lists(a, threshold, skip, max_sweeps):
    """Same iteration as ``_jacobi_numpy`` on nested lists (faster for tiny n)."""
    n = a.shape[0]
    m = a.tolist()
    v = np.eye(n, dtype=complex).tolist()
    thr2 = threshold * threshold

    def off2():
        return sum(abs(m[i][j]) ** 2 for i in range(n) for j in range(n) if i != j)

    for _ in range(max_sweeps):
        if off2() <= thr2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p][q]
                if abs(apq) <= skip:
                    continue
                v00, v01, v10, v11 = _rotation(m[p][p].real, m[q][q].real, apq)
                c10, c11 = v10.conjugate(), v11.conjugate()
                for row in m:
                    x, y = row[p], row[q]
                    row[p] = x * v00 + y * v10
                    row[q] = x * v01 + y * v11
                rp, rq = m[p], m[q]
                m[p] = [x * v00 + y * c10 for x, y in zip(rp, rq)]
                m[q] = [x * v01 + y * c11 for x, y in zip(rp, rq)]
                m[p][q] = 0j
                m[q][p] = 0j
                m[p][p] = complex(m[p][p].real)
                m[q][q] = complex(m[q][q].real)
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = x * v00 + y * v10
                    row[q] = x * v01 + y * v11
    else:
        if off2() > thr2:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.array([m[i][i].real for i in range(n)]), np.array(v, dtype=complex)




def eigvalsh(h) -> np.ndarray:
    return eigh(h).eigenvalues


def _evaluate(f: Callable, lam: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        try:
            out = np.asarray(f(lam), dtype=float)
            if out.shape != lam.shape:
                raise TypeError
        except (TypeError, ValueError):
            out = np.array([float(f(float(t))) for t in lam])
    bad = ~np.isfinite(out)
    if np.any(bad):
        raise DomainError(f"function undefined at eigenvalue {lam[bad][0]!r}")
    return out


def apply_spectral_fn(h, f: Callable, decomp: EigDecomp | None = None) -> np.ndarray:
    """Functional calculus ``V diag(f(lambda)) V^*``."""
    d = eigh(h) if decomp is None else decomp
    vals = _evaluate(f, d.eigenvalues)
    out = (d.eigenvectors * vals) @ d.eigenvectors.conj().T
    return 0.5 * (out + out.conj().T)


def min_eigenvalue(h) -> float:
    lam = eigvalsh(h)
    return float(lam[0]) if lam.size else 0.0


def spectral_norm_h(h) -> float:
    lam = eigvalsh(h)
    return float(np.max(np.abs(lam))) if lam.size else 0.0


def is_psd(h, tol: float = 1e-10) -> bool:
    lam = eigvalsh(h)
    if lam.size == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(lam))))
    return bool(lam[0] >= -tol * scale)
