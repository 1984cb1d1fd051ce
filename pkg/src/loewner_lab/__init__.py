"""Order isomorphisms between operator intervals of finite-dimensional von Neumann algebras."""
__version__ = "0.1.0"

from .algebra import AlgElement, FiniteVNA, loewner_leq, sample
from .errors import LoewnerLabError
from .frac import MidpointParams, frac_map, midpoint_profile, midpoint_profile_inverse
from .intervals import IntervalIso, IntervalSpec, cone_to_phi, normalize_interval, phi_to_cone
from .jordan import JordanIso, apply_jordan, factor_unital_linear_order_iso
from .lemmas import halmos_decompose, lem3_witness, lem4_check
from .order_iso import (
    AffineSaIso,
    BlackBoxIso,
    CanonicalEffectIso,
    build_characterization_iso,
    build_from_midpoint,
    decompose_cone_iso,
    decompose_effect_iso,
    decompose_sa_iso,
)

__all__ = [
    "AffineSaIso", "AlgElement", "BlackBoxIso", "CanonicalEffectIso", "FiniteVNA", "IntervalIso",
    "IntervalSpec", "JordanIso", "LoewnerLabError", "MidpointParams", "apply_jordan",
    "build_characterization_iso", "build_from_midpoint", "cone_to_phi", "decompose_cone_iso",
    "decompose_effect_iso", "decompose_sa_iso", "factor_unital_linear_order_iso", "frac_map",
    "halmos_decompose", "lem3_witness", "lem4_check", "loewner_leq", "midpoint_profile",
    "midpoint_profile_inverse", "normalize_interval", "phi_to_cone", "sample",
]
