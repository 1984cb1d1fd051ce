import numpy as np
import pytest

from loewner_lab import algebra as alg, frac
from loewner_lab import order_iso as oi
from loewner_lab.algebra import FiniteVNA
from loewner_lab.errors import (
    MidpointNotInvertible,
    NotAffine,
    NotCentralImage,
    NotInvertible,
    NotJordan,
    ParamInvariantViolated,
    RangeError,
    TypeI1Summand,
)
from loewner_lab.frac import MidpointParams
from loewner_lab.jordan import JordanIso, functional_distance, identity_jordan, random_jordan

M22 = FiniteVNA((2, 2))
M23 = FiniteVNA((2, 3))


def max_gap(f, g, M, rng, n=100, kind="effect"):
    return max(alg.distance(f(a), g(a)) for a in (alg.sample(M, kind, rng) for _ in range(n)))


def test_scalar_T_collapses_to_composite_fractional_map(rng):
    M = FiniteVNA((3,))
    for _ in range(10):
        p = MidpointParams(rng.uniform(0.05, 0.95), -rng.uniform(0.1, 5))
        iso = oi.CanonicalEffectIso(identity_jordan(M), p, M.identity())
        c = frac.frac_compose_param(p.beta, p.alpha)
        assert alg.distance(iso(M.scalar(0.5)), M.scalar(frac.frac_map_scalar(0.5, c))) < 1e-14
        a = alg.sample(M, "effect", rng)
        assert alg.distance(iso(a), frac.frac_map(a, c)) < 1e-12


def test_endpoints_and_midpoint(rng):
    for _ in range(10):
        iso = oi.random_canonical(M23, rng)
        assert iso(M23.zeros()).max_abs() < 1e-14
        assert alg.distance(iso(M23.identity()), M23.identity()) < 1e-13
        assert alg.distance(iso(M23.scalar(0.5)), iso.midpoint()) < 1e-12


def test_inverse(rng):
    iso = oi.random_canonical(M23, rng)
    for _ in range(20):
        a = alg.sample(M23, "effect", rng)
        assert alg.distance(iso.inverse(iso(a)), a) < 1e-10


def test_param_invariants():
    J = identity_jordan(M22)
    with pytest.raises(ParamInvariantViolated):
        oi.CanonicalEffectIso(J, MidpointParams(0.5, -1), M22.central([1.0, 0.0]))
    with pytest.raises(ParamInvariantViolated):
        oi.CanonicalEffectIso(J, MidpointParams(0.5, -1), -M22.identity())
    with pytest.raises(ParamInvariantViolated):
        oi.CanonicalEffectIso(J, MidpointParams(0.5, -1), FiniteVNA((4,)).identity())


def test_build_from_midpoint_examples():
    M = FiniteVNA((2,))
    J = identity_jordan(M)
    iso = oi.build_from_midpoint(J, M.scalar(0.5), MidpointParams(0.5, -1.0))
    assert alg.distance(iso.T, M.identity()) < 1e-12
    assert alg.distance(iso(M.scalar(0.5)), M.scalar(0.5)) < 1e-12
    b = M.element([np.diag([0.6, 0.9])])
    iso = oi.build_from_midpoint(J, b, MidpointParams(0.5, oi.choose_beta(b)))
    assert alg.distance(iso(M.scalar(0.5)), b) <= 1e-10
    with pytest.raises(NotInvertible):
        oi.build_from_midpoint(J, M.element([np.diag([0.5, 1.0])]), MidpointParams(0.5, -1.0))
    with pytest.raises(RangeError):
        oi.build_from_midpoint(J, M.scalar(0.2), MidpointParams(0.5, -1.0))


def test_choose_beta_covers_spectrum(rng):
    for _ in range(50):
        b = 0.01 + 0.98 * alg.sample(M23, "effect", rng)
        beta = oi.choose_beta(b)
        assert beta <= -2.0 and b.eigvals()[0] >= 1 / (2 - beta)


def test_decompose_identity(rng):
    ident = oi.BlackBoxIso(lambda a: a, M22, M22)
    rec = oi.decompose_effect_iso(ident)
    assert alg.distance(frac.midpoint_profile_operator(rec.T, rec.params), M22.scalar(0.5)) < 1e-12
    assert max_gap(rec, ident, M22, rng) <= 1e-9


@pytest.mark.parametrize("flipped", [False, True])
def test_decompose_round_trip(flipped, rng):
    M = FiniteVNA((2, 3))
    for _ in range(3):
        iso = oi.random_canonical(M, rng)
        phi = oi.flip(iso) if flipped else iso
        rec = oi.decompose_effect_iso(phi)
        assert max_gap(rec, phi, M, rng) <= 1e-7


def test_decompose_between_different_algebras(rng):
    M, N = FiniteVNA((2, 3)), FiniteVNA((3, 2))
    iso = oi.random_canonical(M, rng, target=N)
    rec = oi.decompose_effect_iso(iso)
    assert rec.target == N and max_gap(rec, iso, M, rng) <= 1e-7


def test_decompose_rejects_type_one_summands():
    for dims in ((1, 1), (1, 2)):
        M = FiniteVNA(dims)
        with pytest.raises(TypeI1Summand):
            oi.decompose_effect_iso(oi.BlackBoxIso(lambda a: a, M, M))


def test_decompose_midpoint_not_invertible():
    phi = oi.BlackBoxIso(lambda a: alg.spectral_map(a, np.floor), M22, M22)
    with pytest.raises(MidpointNotInvertible):
        oi.decompose_effect_iso(phi)


def test_decompose_rejects_non_canonical():
    phi = oi.BlackBoxIso(lambda a: alg.spectral_map(a, lambda t: t * t), M22, M22)
    with pytest.raises(NotJordan):
        oi.decompose_effect_iso(phi)


def test_characterization_examples(rng):
    M = FiniteVNA((2,))
    phi = oi.build_characterization_iso(random_jordan(M, rng), M.scalar(0.5))
    assert alg.distance(phi(M.scalar(0.5)), M.scalar(0.5)) <= 1e-9
    rec = oi.decompose_effect_iso(phi)
    # midpoint fixed: the recovered map is its Jordan factor
    assert max_gap(rec, rec.J, M, rng) <= 1e-7
    b = M.element([np.diag([0.2, 0.7])])
    phi = oi.build_characterization_iso(random_jordan(M, rng), b)
    assert alg.distance(phi(M.scalar(0.5)), b) <= 1e-9
    with pytest.raises(NotInvertible):
        oi.build_characterization_iso(identity_jordan(M), M.element([np.diag([1.0, 0.0])]))


def test_characterization_inverse_and_order(rng):
    b = 0.05 + 0.9 * alg.sample(M23, "effect", rng)
    phi = oi.build_characterization_iso(random_jordan(M23, rng), b)
    a = alg.sample(M23, "effect", rng)
    assert alg.distance(phi.inverse(phi(a)), a) < 1e-9
    pairs = [oi.effect_pair(M23, rng) for _ in range(300)]
    assert oi.order_fuzz(phi, pairs)[0] == 0


@pytest.mark.parametrize("family", ["canonical", "flip", "characterization"])
def test_constructed_effect_isos_laws(family, rng):
    M = FiniteVNA((2, 2))
    for _ in range(3):
        if family == "canonical":
            phi = oi.random_canonical(M, rng)
        elif family == "flip":
            phi = oi.flip(oi.random_canonical(M, rng))
        else:
            phi = oi.build_characterization_iso(random_jordan(M, rng), 0.1 + 0.8 * alg.sample(M, "effect", rng))
        m = phi(M.scalar(0.5))
        assert alg.is_lm_invertible(m)[0] and alg.is_lm_invertible(M.identity() - m)[0]
        for _ in range(100):
            assert alg.idempotence_residual(phi(alg.sample(M, "projection", rng))) <= 1e-8


def test_affinity_propagation(rng):
    M = FiniteVNA((2, 2))
    isos = [random_jordan(M, rng) for _ in range(3)] + [oi.random_canonical(M, rng) for _ in range(3)]
    premises = []
    for phi in isos:
        a1 = alg.sample(M, "effect", rng)
        a2 = a1 + alg.congruence(alg.sqrt_psd(M.identity() - a1), 0.2 + 0.6 * alg.sample(M, "effect", rng))
        holds = alg.distance(phi((a1 + a2) * 0.5), (phi(a1) + phi(a2)) * 0.5) <= 1e-9
        premises.append(holds)
        if holds:
            for _ in range(100):
                x, y, w = alg.sample(M, "effect", rng), alg.sample(M, "effect", rng), rng.uniform()
                assert alg.distance(phi(w * x + (1 - w) * y), w * phi(x) + (1 - w) * phi(y)) <= 1e-7
    assert premises[:3] == [True] * 3 and not all(premises[3:])


def test_affine_scalar_example(rng):
    M = FiniteVNA((2,))
    phi = oi.BlackBoxIso(lambda a: 4 * a + 1, M, M)
    rec = oi.decompose_sa_iso(phi)
    assert alg.distance(alg.congruence(rec.x, M.identity()), M.scalar(4.0)) < 1e-12
    assert alg.distance(rec.b, M.identity()) < 1e-12
    assert rec.J.transpose == (False,)
    assert max_gap(rec, phi, M, rng, kind="hermitian") < 1e-12


def test_affine_transpose_example(rng):
    M = FiniteVNA((3,))
    x0 = M.element([rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) + 2 * np.eye(3)])
    phi = oi.BlackBoxIso(lambda a: alg.congruence(x0, a.map_blocks(lambda b: b.T)), M, M)
    rec = oi.decompose_cone_iso(phi)
    assert rec.J.transpose == (True,)
    assert max_gap(rec, phi, M, rng, kind="positive") <= 1e-8


@pytest.mark.parametrize("cone", [False, True])
def test_affine_round_trip(cone, rng):
    kind = "positive" if cone else "hermitian"
    for _ in range(5):
        iso = oi.random_affine(M23, rng, cone=cone)
        phi = oi.BlackBoxIso(iso, M23, iso.J.target)
        rec = oi.decompose_cone_iso(phi) if cone else oi.decompose_sa_iso(phi)
        assert max_gap(rec, phi, M23, rng, kind=kind) <= 1e-8
        a = alg.sample(M23, kind, rng)
        assert alg.distance(iso.inverse(iso(a)), a) < 1e-10
        pairs = [oi.sa_pair(M23, rng, kind) for _ in range(100)]
        assert oi.order_fuzz(iso, pairs)[0] == 0


def test_cubic_rejected():
    C = FiniteVNA((1, 1))
    phi = oi.BlackBoxIso(lambda a: alg.spectral_map(a, lambda t: t**3), C, C)
    with pytest.raises(NotAffine):
        oi.decompose_sa_iso(phi)


def test_orthoiso_checks(rng):
    ok, w = oi.check_orthoiso(random_jordan(M23, rng), trials=100)
    assert ok and w is None
    ok, _ = oi.check_orthoiso(oi.BlackBoxIso(lambda a: frac.frac_map(a, 0.5), M23, M23), trials=100)
    assert ok
    for _ in range(3):
        ok, w = oi.check_orthoiso(oi.random_canonical(M23, rng), trials=100)
        if not ok:
            assert w.reason.startswith("phi(p) phi(q)") and w.residual > 1e-8


def test_direct_sum_split(rng):
    J = random_jordan(M23, rng)
    p = M23.block_indicator(0)
    phi1, phi2 = oi.direct_sum_split(J, p)
    for _ in range(200):
        a = alg.sample(M23, "effect", rng)
        assert alg.distance(J(a), phi1(a @ p) + phi2(a @ (M23.identity() - p))) <= 1e-9
    swap = JordanIso(M22, M22, (1, 0), (False, False), (np.eye(2), np.eye(2)))
    phi1, phi2 = oi.direct_sum_split(swap, M22.block_indicator(0))
    assert alg.distance(phi1(M22.identity()), M22.block_indicator(1)) < 1e-12
    with pytest.raises(NotCentralImage):
        oi.direct_sum_split(J, M23.embed(0, np.diag([1.0, 0.0])))


def test_compose_and_invert_blackboxes(rng):
    a_iso, b_iso = oi.random_canonical(M22, rng), oi.random_canonical(M22, rng)
    c = oi.compose(b_iso, a_iso)
    x = alg.sample(M22, "effect", rng)
    assert alg.distance(c(x), b_iso(a_iso(x))) < 1e-14
    assert alg.distance(oi.invert(c)(c(x)), x) < 1e-9
    with pytest.raises(TypeError):
        oi.as_blackbox(lambda a: a)
