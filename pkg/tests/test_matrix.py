import numpy as np
import pytest
from hypothesis import given, strategies as st

from loewner_lab import matrix as mx
from loewner_lab.errors import DomainError, NoConvergence, NotHermitian


def random_hermitian(n, seed, scale=1.0):
    r = np.random.default_rng(seed)
    g = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    return scale * (g + g.conj().T) / 2


def test_diagonal_input():
    d = mx.eigh(np.diag([3.0, 1.0]))
    assert np.allclose(d.eigenvalues, [1, 3])
    assert np.allclose(np.abs(d.eigenvectors), [[0, 1], [1, 0]])


def test_rank_one_projection():
    d = mx.eigh(0.5 * np.ones((2, 2)))
    assert np.allclose(d.eigenvalues, [0, 1], atol=1e-15)


@given(st.integers(1, 16), st.integers(0, 2**32 - 1), st.sampled_from([1e-6, 1.0, 1e6]))
def test_reconstruction_and_unitarity(n, seed, scale):
    h = random_hermitian(n, seed, scale)
    d = mx.eigh(h)
    fro = max(1.0, np.linalg.norm(h))
    assert np.linalg.norm(d.reconstruct() - h) <= 1e-10 * fro
    assert np.linalg.norm(d.eigenvectors.conj().T @ d.eigenvectors - np.eye(n)) <= 1e-12
    assert np.all(np.diff(d.eigenvalues) >= 0)


def test_matches_lapack_eigenvalues():
    for seed in range(20):
        h = random_hermitian(7, seed)
        assert np.allclose(mx.eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-12)


def test_degenerate_cluster():
    r = np.random.default_rng(3)
    q, _ = np.linalg.qr(r.standard_normal((5, 5)) + 1j * r.standard_normal((5, 5)))
    h = (q * np.array([1, 1, 1, 2, 2])) @ q.conj().T
    d = mx.eigh(h)
    assert np.allclose(d.eigenvalues, [1, 1, 1, 2, 2])
    assert np.linalg.norm(d.reconstruct() - h) < 1e-12


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        mx.eigh(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitian):
        mx.is_psd(np.array([[1, 2], [0, 1]]))


def test_iteration_cap():
    with pytest.raises(NoConvergence):
        mx.eigh(random_hermitian(4, 0), max_sweeps=0)


def test_dimension_limit():
    with pytest.raises(ValueError):
        mx.eigh(np.eye(65))


def test_spectral_fn_examples():
    h = random_hermitian(4, 1)
    assert np.allclose(mx.apply_spectral_fn(h, lambda t: t), h, atol=1e-12)
    assert np.allclose(mx.apply_spectral_fn(np.diag([4.0, 9.0]), np.sqrt), np.diag([2, 3]))
    p = 0.5 * np.ones((2, 2))
    out = mx.apply_spectral_fn(p, lambda t: t / (1 + t))
    # eigenvalue 1 goes to 1/2, eigenvalue 0 stays
    assert np.allclose(out, 0.5 * p, atol=1e-15)


def test_spectral_fn_against_lapack_oracle():
    h = random_hermitian(6, 2)
    lam, v = np.linalg.eigh(h)
    oracle = (v * np.exp(lam)) @ v.conj().T
    assert np.allclose(mx.apply_spectral_fn(h, np.exp), oracle, atol=1e-12)


def test_spectral_fn_domain():
    with pytest.raises(DomainError):
        mx.apply_spectral_fn(np.diag([0.0, 1.0]), lambda t: 1 / t)
    with pytest.raises(DomainError):
        mx.apply_spectral_fn(np.diag([-1.0, 1.0]), np.log)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_spectral_fn_commutes_and_composes(n, seed):
    h = random_hermitian(n, seed)
    fh = mx.apply_spectral_fn(h, np.exp)
    assert np.linalg.norm(fh @ h - h @ fh) <= 1e-9 * max(1, np.linalg.norm(h) ** 2)
    direct = mx.apply_spectral_fn(h, lambda t: np.exp(t) ** 2 + 1)
    nested = mx.apply_spectral_fn(fh, lambda t: t**2 + 1)
    assert np.linalg.norm(direct - nested) <= 1e-9 * max(1, np.linalg.norm(direct))


def test_is_psd_examples():
    assert mx.is_psd(np.eye(3))
    assert not mx.is_psd(np.array([[0.0, 1.0], [1.0, 0.0]]))
    r = np.random.default_rng(5)
    q, _ = np.linalg.qr(r.standard_normal((2, 2)) + 1j * r.standard_normal((2, 2)))
    h = (q * np.array([1.0, -1e-14])) @ q.conj().T
    assert mx.is_psd(h, 1e-10)
    assert not mx.is_psd(np.diag([1.0, -1e-6]), 1e-10)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_gram_matrices_are_psd(n, seed):
    r = np.random.default_rng(seed)
    x = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    g = x @ x.conj().T
    assert mx.is_psd(0.5 * (g + g.conj().T), 1e-10)
