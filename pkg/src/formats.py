"""
JSON codecs for solutions, representations, ideal points and spin sidecars.
Complex numbers travel as [re, im]; floats are written with 15 significant digits.
"""
import json
import logging
from typing import Any, Dict, List, Sequence

import numpy as np

from .errors import FormatError, RepresentationError
from .fundamental_group import Representation
from .geometry import IdealPoint, Mobius, shape_triple

logger = logging.getLogger(__name__)

CYCLIC_TOL = 1e-9


def round15(x: float) -> float:
    return float(f"{float(x):.15g}")


def format_real(x: float) -> str:
    return f"{float(x):.15g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.15g}{z.imag:+.15g}i"


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2)


def loads(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed {what} JSON at line {e.lineno} column {e.colno}: {e.msg}.")


def complex_to_json(z: complex) -> List[float]:
    z = complex(z)
    return [round15(z.real), round15(z.imag)]


def complex_from_json(value: Any) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise FormatError(f"expected a complex number as [re, im], got {value!r}.")
    return complex(value[0], value[1])


def point_to_json(p: IdealPoint) -> Dict[str, List[float]]:
    p = p.normalized()
    return {"a": complex_to_json(p.a), "b": complex_to_json(p.b)}


def point_from_json(value: Any) -> IdealPoint:
    """Accepts {"a": .., "b": ..}, a finite point [re, im], or "inf"."""
    if value == "inf":
        return IdealPoint.infinity()
    if isinstance(value, dict):
        if set(value) != {"a", "b"}:
            raise FormatError(f"ideal point needs exactly the keys 'a' and 'b', got {sorted(value)}.")
        return IdealPoint(complex_from_json(value["a"]), complex_from_json(value["b"]))
    return IdealPoint(complex_from_json(value), 1.0)


def mobius_to_json(m: Mobius) -> List[List[float]]:
    return [complex_to_json(x) for x in (m.m00, m.m01, m.m10, m.m11)]


def mobius_from_json(value: Any, label: str = "matrix") -> Mobius:
    if not isinstance(value, list) or len(value) != 4:
        raise RepresentationError(f"{label}: expected 4 row-major [re, im] entries.")
    try:
        entries = [complex_from_json(x) for x in value]
    except FormatError as e:
        raise RepresentationError(f"{label}: {e}")
    det = entries[0] * entries[3] - entries[1] * entries[2]
    if abs(det) < 1e-12:
        raise RepresentationError(f"{label}: matrix is singular.")
    return Mobius.from_array(np.array(entries).reshape(2, 2))


def solution_to_json(shapes: Sequence[complex]) -> Dict[str, Any]:
    return {"shapes": [complex_to_json(z) for z in shapes]}


def parse_solution(text: str) -> List[complex]:
    """
    Slot-0 shapes, one per tetrahedron. Entries may also be given in expanded
    form [[re,im], [re,im], [re,im]], which must satisfy the cyclic relation.
    """
    data = loads(text, "solution")
    if not isinstance(data, dict) or not isinstance(data.get("shapes"), list):
        raise FormatError("solution needs a 'shapes' list.")
    shapes = []
    for t, entry in enumerate(data["shapes"]):
        if isinstance(entry, list) and len(entry) == 3:
            given = [complex_from_json(x) for x in entry]
            derived = shape_triple(given[0])
            if max(abs(g - d) for g, d in zip(given, derived)) > CYCLIC_TOL:
                raise FormatError(f"shapes of tetrahedron {t} violate the cyclic relation.")
            shapes.append(given[0])
        else:
            shapes.append(complex_from_json(entry))
    return shapes


def representation_to_json(rep: Representation) -> Dict[str, Any]:
    return {"generators": {label: mobius_to_json(m) for label, m in rep.generators.items()}}


def parse_representation(text: str) -> Representation:
    data = loads(text, "representation")
    if not isinstance(data, dict) or not isinstance(data.get("generators"), dict):
        raise RepresentationError("representation needs a 'generators' object.")
    return Representation({
        label: mobius_from_json(value, label)
        for label, value in data["generators"].items()
    })


def sidecar_to_json(seed: int, base_points: Sequence[IdealPoint], volume: float) -> Dict[str, Any]:
    return {
        "seed": seed,
        "base_points": [point_to_json(p) for p in base_points],
        "volume": round15(volume),
    }
