"""Lossless JSON encodings: rationals as "p/q" strings, field elements as {conductor, coeffs}."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .cyclotomic import CycloElement, CycloField


def rational_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def element_to_json(a: CycloElement) -> dict:
    return {"conductor": a.field.conductor, "coeffs": [rational_str(c) for c in a.coeffs]}


def element_from_json(doc: dict) -> CycloElement:
    fld = CycloField(int(doc["conductor"]))
    return fld.from_coeffs([Fraction(c) for c in doc["coeffs"]])


def matrix_to_json(mat) -> list[list[list[str]]]:
    """Exact matrix as nested coefficient vectors (conductor stored once by the caller)."""
    return [[[rational_str(c) for c in x.coeffs] for x in row] for row in mat]


def complex_matrix_to_json(arr) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def to_jsonable(obj: Any) -> Any:
    """Best-effort conversion of library values for json.dump."""
    from .cyclic_algebra import DElement
    from .iterated import AElement

    if isinstance(obj, CycloElement):
        return element_to_json(obj)
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, DElement):
        return [to_jsonable(c) for c in obj.coords]
    if isinstance(obj, AElement):
        return [to_jsonable(c) for c in obj.coords]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    return obj


def digest(payload: Any) -> str:
    """sha256 of the canonical JSON form of the inputs."""
    text = json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
