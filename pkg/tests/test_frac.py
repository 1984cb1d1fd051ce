import numpy as np
import pytest
from hypothesis import given, strategies as st

from loewner_lab import algebra as alg, frac
from loewner_lab.algebra import FiniteVNA
from loewner_lab.errors import ParamOutOfRange, RangeError
from loewner_lab.frac import MidpointParams

GRID = np.linspace(0.0, 1.0, 11)
alpha_st = st.floats(-5.0, 0.95)


def bisect_profile_inverse(y, params, iters=200):
    """Independent oracle: bisection on the increasing profile."""
    lo, hi = 0.0, 1.0
    while frac.midpoint_profile(hi, params) < y:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if frac.midpoint_profile(mid, params) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_scalar_examples():
    assert np.allclose(frac.frac_map_scalar(GRID, 0.0), GRID)
    assert frac.frac_map_scalar(0.5, 0.5) == pytest.approx(2 / 3, abs=1e-15)


def test_projection_fixed():
    M = FiniteVNA((3, 2))
    p = alg.sample(M, "projection", 4)
    assert alg.distance(frac.frac_map(p, 0.3), p) < 1e-12


def test_param_range():
    M = FiniteVNA((2,))
    with pytest.raises(ParamOutOfRange):
        frac.frac_map(M.identity(), 1.0)
    with pytest.raises(ParamOutOfRange):
        frac.frac_map(M.identity(), -0.5, cone=True)
    with pytest.raises(ParamOutOfRange):
        MidpointParams(0.5, 0.0)
    with pytest.raises(ParamOutOfRange):
        MidpointParams(1.0, -1.0)


def test_inverse_param_examples():
    assert frac.frac_inverse_param(0.0) == 0.0
    assert frac.frac_inverse_param(0.5) == -1.0
    assert frac.frac_inverse_param(-1.0) == 0.5
    for a in (0.5, -1.0):
        back = frac.frac_map_scalar(frac.frac_map_scalar(GRID, a), frac.frac_inverse_param(a))
        assert np.max(np.abs(back - GRID)) <= 1e-14


def test_compose_param_examples():
    assert frac.frac_compose_param(0.0, 0.3) == 0.3
    assert frac.frac_compose_param(0.5, 0.5) == 0.75
    lhs = frac.frac_map_scalar(frac.frac_map_scalar(GRID, 0.5), 0.5)
    assert np.max(np.abs(lhs - frac.frac_map_scalar(GRID, 0.75))) <= 1e-14
    assert frac.frac_compose_param(0.4, frac.frac_inverse_param(0.4)) == pytest.approx(0.0, abs=1e-16)


@given(alpha_st, alpha_st)
def test_compose_param_laws(a, g):
    c = frac.frac_compose_param(a, g)
    assert 1 - c == pytest.approx((1 - a) * (1 - g), rel=1e-12, abs=1e-14)
    lhs = frac.frac_map_scalar(frac.frac_map_scalar(GRID, g), a)
    assert np.max(np.abs(lhs - frac.frac_map_scalar(GRID, c))) <= 1e-13


def test_resolvent_form_matches_spectral_form(rng):
    M = FiniteVNA((3, 2))
    for alpha in (-2.0, -0.5, 0.002, 0.3, 0.9):
        a = alg.sample(M, "effect", rng)
        direct = alg.spectral_map(a, lambda t: t / (alpha * t + 1 - alpha))
        assert alg.distance(frac.frac_map(a, alpha), direct) < 1e-12


def test_small_alpha_branch(rng):
    a = alg.sample(FiniteVNA((3,)), "effect", rng)
    assert alg.distance(frac.frac_map(a, 1e-5), a) < 1e-4
    assert alg.distance(frac.frac_map(a, 0.0), a) == 0.0


def test_operator_laws(rng):
    M = FiniteVNA((2, 3))
    for _ in range(50):
        a = alg.sample(M, "effect", rng)
        al, ga = rng.uniform(-3, 0.9, 2)
        lhs = frac.frac_map(frac.frac_map(a, ga), al)
        assert alg.distance(lhs, frac.frac_map(a, frac.frac_compose_param(al, ga))) <= 1e-10
        back = frac.frac_map_unchecked(frac.frac_map(a, al), frac.frac_inverse_param(al))
        assert alg.distance(back, a) <= 1e-10


@pytest.mark.parametrize("alpha", [-2.0, -0.5, 0.3, 0.9])
def test_order_equivalence(alpha, rng):
    from loewner_lab.order_iso import effect_pair

    M = FiniteVNA((2, 3))
    for _ in range(500):
        a, b = effect_pair(M, rng)
        assert alg.loewner_leq(a, b, 1e-9) == alg.loewner_leq(frac.frac_map(a, alpha), frac.frac_map(b, alpha), 1e-9)


def test_cone_monotone_and_domination(rng):
    M = FiniteVNA((3,))
    for _ in range(100):
        a = 3 * alg.sample(M, "positive", rng)
        b = a + alg.sample(M, "positive", rng)
        al = rng.uniform(0.05, 0.95)
        assert alg.loewner_leq(frac.frac_map(a, al, cone=True), frac.frac_map(b, al, cone=True), 1e-9)
        e = alg.sample(M, "effect", rng)
        assert alg.loewner_leq(e, frac.frac_map(e, al), 1e-10)
        assert alg.loewner_leq(frac.frac_map(e, -al), e, 1e-10)


def test_profile_range_and_monotone(rng):
    for _ in range(20):
        p = MidpointParams(rng.uniform(0.01, 0.99), -rng.uniform(0.01, 10))
        assert frac.midpoint_profile(0.0, p) == pytest.approx(1 / (2 - p.beta), abs=1e-15)
        vals = frac.midpoint_profile(np.linspace(0, 100, 2001), p)
        assert np.all(np.diff(vals) > 0) and np.all(vals < 1)


def test_profile_examples():
    p = MidpointParams(0.5, -1.0)
    assert frac.midpoint_profile(1.0, p) == pytest.approx(0.5, abs=1e-15)
    assert frac.midpoint_profile_inverse(0.5, p) == pytest.approx(1.0, abs=1e-15)
    # closed form sqrt((3y - 1)/(1 - y)): unbounded, growing like (1 - y)^{-1/2}
    near = frac.midpoint_profile_inverse(1 - 1e-6, p)
    assert near == pytest.approx(np.sqrt((2 - 3e-6) / 1e-6), rel=1e-9)
    assert near > 300 * frac.midpoint_profile_inverse(0.9, p)
    assert frac.midpoint_profile_inverse(1 - 1e-12, p) > 1e3 * frac.midpoint_profile_inverse(0.9, p)
    with pytest.raises(RangeError):
        frac.midpoint_profile_inverse(0.2, p)
    with pytest.raises(RangeError):
        frac.midpoint_profile_inverse(1.0, p)


def test_profile_inverse_against_bisection(rng):
    worst = 0.0
    for _ in range(1000):
        p = MidpointParams(rng.uniform(0.02, 0.98), -rng.uniform(0.05, 8))
        y = rng.uniform(p.lower, 1 - 1e-3)
        t = frac.midpoint_profile_inverse(y, p)
        worst = max(worst, abs(t - bisect_profile_inverse(y, p)) / max(1, t))
        assert abs(frac.midpoint_profile(t, p) - y) <= 1e-12
    assert worst < 1e-9


def test_operator_profile_inverse(rng):
    M = FiniteVNA((2,))
    p = MidpointParams(0.5, -1.0)
    t = frac.midpoint_profile_operator_inverse(M.scalar(0.5), p)
    assert alg.distance(t, M.identity()) < 1e-12
    b = M.element([np.diag([0.6, 0.9])])
    T = frac.midpoint_profile_operator_inverse(b, p)
    assert alg.distance(frac.midpoint_profile_operator(T, p), b) <= 1e-10
    assert alg.is_lm_invertible(T)[0]
    with pytest.raises(RangeError, match="eigenvalue"):
        frac.midpoint_profile_operator_inverse(M.element([np.diag([0.2, 0.6])]), p)
