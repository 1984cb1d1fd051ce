import numpy as np
import pytest
from hypothesis import given, strategies as st

from loewner_lab import algebra as alg
from loewner_lab.algebra import FiniteVNA
from loewner_lab.errors import AlgebraMismatch, NotJordan, NotUnital
from loewner_lab.jordan import (
    JordanIso,
    apply_jordan,
    compose_jordan,
    factor_unital_linear_order_iso,
    functional_distance,
    identity_jordan,
    invert_jordan,
    random_jordan,
)

dims_st = st.lists(st.integers(1, 4), min_size=1, max_size=3).map(tuple)
seed_st = st.integers(0, 2**32 - 1)


def test_identity_parameters(rng):
    M = FiniteVNA((2, 3))
    a = alg.sample(M, "hermitian", rng)
    assert alg.distance(apply_jordan(identity_jordan(M), a), a) == 0.0


def test_transpose_example():
    M = FiniteVNA((2,))
    J = JordanIso(M, M, (0,), (True,), (np.eye(2),))
    out = J(M.element([[[0, 1j], [-1j, 0]]]))
    assert np.allclose(out.blocks[0], [[0, -1j], [1j, 0]])


def test_parameter_validation():
    M, N = FiniteVNA((2, 3)), FiniteVNA((3, 2))
    with pytest.raises(AlgebraMismatch):
        JordanIso(M, N, (0, 1), (False, False), (np.eye(3), np.eye(2)))
    JordanIso(M, N, (1, 0), (False, False), (np.eye(3), np.eye(2)))
    with pytest.raises(AlgebraMismatch):
        random_jordan(M, 0, FiniteVNA((2, 2)))
    with pytest.raises(AlgebraMismatch):
        apply_jordan(identity_jordan(M), N.identity())


@given(dims_st, seed_st)
def test_jordan_structure_preserved(dims, seed):
    r = np.random.default_rng(seed)
    M = FiniteVNA(dims)
    J = random_jordan(M, r)
    a, b = alg.sample(M, "hermitian", r), alg.sample(M, "hermitian", r)
    assert np.allclose(J(a).eigvals(), a.eigvals(), atol=1e-10)
    jp = (a @ b + b @ a) * 0.5
    assert alg.distance(J(jp), (J(a) @ J(b) + J(b) @ J(a)) * 0.5) <= 1e-10
    assert alg.distance(J(a @ a), J(a) @ J(a)) <= 1e-10
    assert J(a).is_hermitian()


def test_order_preserved(rng):
    from loewner_lab.order_iso import sa_pair

    M = FiniteVNA((2, 3, 2))
    J = random_jordan(M, rng)
    for _ in range(300):
        a, b = sa_pair(M, rng)
        assert alg.loewner_leq(a, b, 1e-9) == alg.loewner_leq(J(a), J(b), 1e-9)


def test_compose_and_invert(rng):
    M = FiniteVNA((2, 2, 3))
    J1, J2, J3 = (random_jordan(M, rng) for _ in range(3))
    C = compose_jordan(J2, J1)
    for _ in range(50):
        a = alg.sample(M, "hermitian", rng)
        assert alg.distance(C(a), J2(J1(a))) <= 1e-10
        assert alg.distance(compose_jordan(J1, invert_jordan(J1))(a), a) <= 1e-10
        lhs = compose_jordan(J3, compose_jordan(J2, J1))(a)
        rhs = compose_jordan(compose_jordan(J3, J2), J1)(a)
        assert alg.distance(lhs, rhs) <= 1e-10


def test_transpose_flags_xor():
    M = FiniteVNA((2,))
    T = JordanIso(M, M, (0,), (True,), (np.eye(2),))
    assert compose_jordan(T, T).transpose == (False,)


def test_factor_transpose():
    M = FiniteVNA((2,))

    def L(h):
        return h.map_blocks(lambda b: b.T)

    J = factor_unital_linear_order_iso(L, M, M)
    assert J.transpose == (True,)
    assert np.allclose(np.abs(J.unitaries[0]), np.eye(2), atol=1e-12)


def test_factor_unitary_conjugation(rng):
    M = FiniteVNA((3,))
    u = alg.haar_unitary(3, rng)

    def L(h):
        return h.map_blocks(lambda b: u @ b @ u.conj().T)

    J = factor_unital_linear_order_iso(L, M, M)
    assert J.transpose == (False,)
    assert functional_distance(L, J, M) <= 1e-9


def test_factor_block_swap():
    M = FiniteVNA((2, 2))

    def L(h):
        return M.element([h.blocks[1], h.blocks[0]])

    assert factor_unital_linear_order_iso(L, M, M).perm == (1, 0)


@given(dims_st, seed_st)
def test_factor_round_trip(dims, seed):
    r = np.random.default_rng(seed)
    M = FiniteVNA(dims)
    J = random_jordan(M, r)
    F = factor_unital_linear_order_iso(J, M, J.target)
    assert functional_distance(J, F, M) <= 1e-8
    # gauge: the first column's leading nonzero entry is real positive
    for u in F.unitaries:
        k = int(np.argmax(np.abs(u[:, 0]) > 1e-8))
        assert abs(u[k, 0].imag) < 1e-12 and u[k, 0].real > 0


def test_factor_rejects_non_unital():
    M = FiniteVNA((2,))
    with pytest.raises(NotUnital):
        factor_unital_linear_order_iso(lambda h: 2 * h, M, M)


def test_factor_rejects_non_jordan():
    M = FiniteVNA((3,))

    def L(h):
        # unital and positive, but a mixture with the trace state is not Jordan
        b = h.blocks[0]
        return M.element([0.5 * (b + np.trace(b) / 3 * np.eye(3))])

    with pytest.raises(NotJordan):
        factor_unital_linear_order_iso(L, M, M)


def test_factor_rejects_block_mixing():
    M = FiniteVNA((1, 1))

    def L(h):
        t = 0.5 * (h.blocks[0][0, 0] + h.blocks[1][0, 0])
        return M.central([t, t])

    with pytest.raises(NotJordan):
        factor_unital_linear_order_iso(L, M, M)


def test_factor_rejects_partial_transpose_mix(rng):
    M = FiniteVNA((2,))

    def L(h):
        b = h.blocks[0]
        return M.element([0.5 * (b + b.T)])

    with pytest.raises(NotJordan):
        factor_unital_linear_order_iso(L, M, M)
