"""Fractional maps ``t -> t/(alpha t + 1 - alpha)`` and the midpoint profile.

For ``alpha < 1`` the fractional map is an order automorphism of the effect
algebra; for ``0 < alpha < 1`` it extends to an order-preserving map of the
positive cone.  The parameters form a group under
``alpha * gamma = alpha + gamma - alpha gamma`` (so ``1 - alpha`` multiplies).

The midpoint profile is what a canonical effect isomorphism does to ``1/2``
as a function of its scaling operator:

    profile(t) = (alpha t^2 + 1 - alpha) / (alpha t^2 + (2 - beta)(1 - alpha))

which increases strictly from ``1/(2 - beta)`` towards ``1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as alg
from .algebra import AlgElement
from .errors import ParamOutOfRange, RangeError

RESOLVENT_CUTOFF = 1e-3
LOWER_EDGE_SLACK = 1e-12


@dataclass(frozen=True)
class MidpointParams:
    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (0.0 < a < 1.0) or not (b < 0.0):
            raise ParamOutOfRange(f"need 0 < alpha < 1 and beta < 0, got alpha={a}, beta={b}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def lower(self) -> float:
        """Value of the profile at 0, the bottom of its range."""
        return 1.0 / (2.0 - self.beta)


def _check_alpha(alpha: float, cone: bool = False) -> float:
    alpha = float(alpha)
    if not alpha < 1.0:
        raise ParamOutOfRange(f"alpha must be < 1, got {alpha}")
    if cone and not alpha > 0.0:
        raise ParamOutOfRange(f"the positive-cone extension needs 0 < alpha < 1, got {alpha}")
    return alpha


def frac_map_scalar(t, alpha: float):
    alpha = _check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    out = t / (alpha * t + 1.0 - alpha)
    return float(out) if out.ndim == 0 else out


def _resolvent_form(a: AlgElement, alpha: float) -> AlgElement:
    # 1/alpha - ((1-alpha)/alpha^2) (a + (1-alpha)/alpha)^{-1}
    shift = (1.0 - alpha) / alpha
    coef = (1.0 - alpha) / alpha ** 2
    inv = alg.inverse(a + shift)
    return (a.alg.scalar(1.0 / alpha) - coef * inv).sym()


def _apply(a: AlgElement, alpha: float) -> AlgElement:
    if alpha == 0.0:
        return a
    if abs(alpha) > RESOLVENT_CUTOFF:
        return _resolvent_form(a, alpha)
    return alg.spectral_map(a, lambda t: t / (alpha * t + 1.0 - alpha))


def frac_map(a: AlgElement, alpha: float, cone: bool = False) -> AlgElement:
    """Operator fractional map on an effect (or, with ``cone=True``, a positive element)."""
    alpha = _check_alpha(alpha, cone)
    alg.check_hermitian(a)
    return _apply(a, alpha)


def frac_map_unchecked(a: AlgElement, alpha: float) -> AlgElement:
    """Same formula with no domain check; used to invert on ranges outside E(M)."""
    return _apply(a, float(alpha))


def frac_inverse_param(alpha: float) -> float:
    alpha = _check_alpha(alpha)
    return -alpha / (1.0 - alpha)


def frac_compose_param(alpha: float, gamma: float) -> float:
    """Parameter of ``frac(., alpha) o frac(., gamma)``."""
    alpha, gamma = _check_alpha(alpha), _check_alpha(gamma)
    return alpha + gamma - alpha * gamma


def midpoint_profile(t, params: MidpointParams):
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    t2 = t * t
    out = (a * t2 + 1.0 - a) / (a * t2 + (2.0 - b) * (1.0 - a))
    return float(out) if out.ndim == 0 else out


def midpoint_profile_inverse(y, params: MidpointParams):
    a, b = params.alpha, params.beta
    y = np.asarray(y, dtype=float)
    lo = params.lower
    bad = np.ravel(y)[(np.ravel(y) < lo - LOWER_EDGE_SLACK) | (np.ravel(y) >= 1.0)]
    if bad.size:
        raise RangeError(f"value {float(bad[0])!r} outside [{lo}, 1)")
    num = np.clip((1.0 - a) * ((2.0 - b) * y - 1.0), 0.0, None)
    out = np.sqrt(num / (a * (1.0 - y)))
    return float(out) if out.ndim == 0 else out


def midpoint_profile_operator(t: AlgElement, params: MidpointParams) -> AlgElement:
    return alg.spectral_map(t, lambda s: midpoint_profile(s, params))


def midpoint_profile_operator_inverse(b: AlgElement, params: MidpointParams) -> AlgElement:
    """Positive ``T`` with ``profile(T) = b``, by functional calculus."""
    lam = b.eigvals()
    lo = params.lower
    bad = lam[(lam < lo - LOWER_EDGE_SLACK) | (lam >= 1.0)]
    if bad.size:
        raise RangeError(f"eigenvalue {bad[0]!r} of the midpoint outside [{lo}, 1)")
    return alg.spectral_map(b, lambda y: midpoint_profile_inverse(np.clip(y, lo, None), params))
