"""JSON encoding of algebras, elements, isomorphism parameters and run reports.

Complex entries are ``[re, im]`` pairs; Python's shortest round-trip float
printing makes the encoding lossless.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import matrix as mx
from .algebra import AlgElement, FiniteVNA
from .errors import BadSpec, NotHermitian
from .frac import MidpointParams
from .jordan import JordanIso
from .order_iso import AffineSaIso, CanonicalEffectIso

SCHEMA = "loewner-lab/1"


def _cmat_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _cmat_from_json(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as e:
        raise BadSpec(f"matrix is not a rectangular array of [re, im] pairs: {e}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise BadSpec(f"matrix entries must be [re, im] pairs, got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def alg_to_json(M: FiniteVNA) -> dict:
    return {"blocks": list(M.block_dims)}


def alg_from_json(d) -> FiniteVNA:
    try:
        return FiniteVNA(tuple(d["blocks"]))
    except (KeyError, TypeError, ValueError) as e:
        raise BadSpec(f"bad algebra description {d!r}: {e}") from None


def element_to_json(a: AlgElement) -> dict:
    return {"alg": alg_to_json(a.alg), "blocks": [_cmat_to_json(b) for b in a.blocks]}


def element_from_json(d, validate: bool = True) -> AlgElement:
    if not isinstance(d, dict) or "alg" not in d or "blocks" not in d:
        raise BadSpec("element JSON needs 'alg' and 'blocks'")
    M = alg_from_json(d["alg"])
    try:
        a = AlgElement(M, tuple(_cmat_from_json(b) for b in d["blocks"]))
    except ValueError as e:
        if isinstance(e, BadSpec):
            raise
        raise BadSpec(str(e)) from None
    if validate:
        for i, b in enumerate(a.blocks):
            if not mx.is_hermitian(b):
                raise NotHermitian(f"block {i} is not Hermitian within 1e-12")
    return a


def jordan_to_json(J: JordanIso) -> dict:
    return {
        "source": alg_to_json(J.source),
        "target": alg_to_json(J.target),
        "perm": list(J.perm),
        "transpose": list(J.transpose),
        "unitaries": [_cmat_to_json(u) for u in J.unitaries],
    }


def jordan_from_json(d) -> JordanIso:
    return JordanIso(alg_from_json(d["source"]), alg_from_json(d["target"]), tuple(d["perm"]),
                     tuple(d["transpose"]), tuple(_cmat_from_json(u) for u in d["unitaries"]))


def canonical_to_json(iso: CanonicalEffectIso) -> dict:
    return {"type": "canonical", "J": jordan_to_json(iso.J), "alpha": iso.params.alpha,
            "beta": iso.params.beta, "T": element_to_json(iso.T)}


def affine_to_json(iso: AffineSaIso, cone: bool = False) -> dict:
    return {"type": "cone" if cone else "affine", "J": jordan_to_json(iso.J),
            "x": element_to_json(iso.x), "b": element_to_json(iso.b)}


def iso_from_json(d):
    """Canonical or affine parameters; returns ``(kind, iso)``."""
    try:
        kind = d["type"]
        J = jordan_from_json(d["J"])
        if kind == "canonical":
            return kind, CanonicalEffectIso(J, MidpointParams(d["alpha"], d["beta"]), element_from_json(d["T"]))
        if kind in ("affine", "cone"):
            return kind, AffineSaIso(J, element_from_json(d["x"], validate=False), element_from_json(d["b"]))
    except (KeyError, TypeError) as e:
        raise BadSpec(f"bad isomorphism parameters: {e}") from None
    raise BadSpec(f"unknown isomorphism type {kind!r}")


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise BadSpec(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise BadSpec(f"{path} is not valid JSON: {e}") from None


def load_element(path, validate: bool = True) -> AlgElement:
    return element_from_json(read_json(path), validate)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
