"""
Numerics on the Riemann sphere: ideal points in homogeneous coordinates, Mobius
transformations, cross-ratios, shape triples, the Lobachevsky function and the
volume of an ideal tetrahedron.
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import bernoulli, factorial

from .errors import DegenerateConfigurationError

logger = logging.getLogger(__name__)

COINCIDENCE_TOL = 1e-12
HALF_PI = math.pi / 2

# Clausen series Cl2(x) = x - x ln x + sum_k |B_2k| x^(2k+1) / (2k (2k+1)!), 0 < x <= pi
_CLAUSEN_TERMS = 30
_BERNOULLI = bernoulli(2 * _CLAUSEN_TERMS)
_CLAUSEN_COEFFS = np.array([
    abs(_BERNOULLI[2 * k]) / (2 * k * factorial(2 * k + 1, exact=False))
    for k in range(1, _CLAUSEN_TERMS + 1)
])
_CLAUSEN_POWERS = np.array([2 * k + 1 for k in range(1, _CLAUSEN_TERMS + 1)])


@dataclass(frozen=True)
class IdealPoint:
    """The point a/b of the Riemann sphere; b == 0 is infinity."""
    a: complex
    b: complex = 1.0

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise DegenerateConfigurationError("(0, 0) is not a point of the Riemann sphere.")

    @classmethod
    def infinity(cls) -> "IdealPoint":
        return cls(1.0, 0.0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)

    def is_infinite(self, tol: float = COINCIDENCE_TOL) -> bool:
        return abs(self.b) <= tol * abs(self.a)

    def to_complex(self) -> complex:
        if self.b == 0:
            return complex(math.inf, 0.0)
        return complex(self.a) / complex(self.b)

    def normalized(self) -> "IdealPoint":
        """Same point, scaled so the larger coordinate is 1 (finite points get b = 1)."""
        if abs(self.b) >= abs(self.a):
            return IdealPoint(complex(self.a) / complex(self.b), 1.0)
        return IdealPoint(1.0, complex(self.b) / complex(self.a))


def bracket(p: IdealPoint, q: IdealPoint) -> complex:
    """The determinant a*b' - a'*b; zero iff p == q."""
    return p.a * q.b - q.a * p.b


def normalized_bracket(p: IdealPoint, q: IdealPoint) -> float:
    """Scale-invariant separation of two points, in [0, 1]."""
    return abs(bracket(p, q)) / (np.linalg.norm(p.vector) * np.linalg.norm(q.vector))


def points_coincide(p: IdealPoint, q: IdealPoint, tol: float = COINCIDENCE_TOL) -> bool:
    return normalized_bracket(p, q) < tol


@dataclass(frozen=True)
class Mobius:
    """A 2x2 complex matrix, determinant normalized to 1. Equal up to sign means same map."""
    m00: complex
    m01: complex
    m10: complex
    m11: complex

    @classmethod
    def from_array(cls, matrix) -> "Mobius":
        arr = np.asarray(matrix, dtype=complex).reshape(2, 2)
        det = np.linalg.det(arr)
        if abs(det) < 1e-300 or not np.isfinite(det):
            raise DegenerateConfigurationError(f"matrix is singular (det = {det}).")
        arr = arr / np.sqrt(det)
        return cls(complex(arr[0, 0]), complex(arr[0, 1]), complex(arr[1, 0]), complex(arr[1, 1]))

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]], dtype=complex)

    @property
    def trace(self) -> complex:
        return self.m00 + self.m11

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius.from_array(self.matrix @ other.matrix)

    def inverse(self) -> "Mobius":
        return Mobius(self.m11, -self.m01, -self.m10, self.m00)

    def power(self, n: int) -> "Mobius":
        return Mobius.from_array(np.linalg.matrix_power(self.matrix if n >= 0 else self.inverse().matrix, abs(n)))

    def distance(self, other: "Mobius") -> float:
        """Max entry distance, minimized over the sign ambiguity."""
        diff_plus = np.max(np.abs(self.matrix - other.matrix))
        diff_minus = np.max(np.abs(self.matrix + other.matrix))
        return float(min(diff_plus, diff_minus))

    def distance_to_identity(self) -> float:
        return self.distance(Mobius.identity())


def mobius_apply(m: Mobius, p: IdealPoint) -> IdealPoint:
    return IdealPoint(m.m00 * p.a + m.m01 * p.b, m.m10 * p.a + m.m11 * p.b)


def _check_distinct(points: Sequence[IdealPoint], what: str) -> None:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points_coincide(points[i], points[j]):
                raise DegenerateConfigurationError(f"{what}: points {i} and {j} coincide.")


def cross_ratio(vi: IdealPoint, vj: IdealPoint, vk: IdealPoint, vl: IdealPoint) -> complex:
    """
    (vi - vk)(vj - vl) / ((vi - vl)(vj - vk)), computed from brackets so that
    points at infinity need no special case.

    Raises:
        DegenerateConfigurationError: two of the four points coincide.
    """
    _check_distinct((vi, vj, vk, vl), "cross-ratio")
    return (bracket(vi, vk) * bracket(vj, vl)) / (bracket(vi, vl) * bracket(vj, vk))


class ShapeTriple(NamedTuple):
    z0: complex
    z1: complex
    z2: complex


def _check_shape(z: complex, tol: float = COINCIDENCE_TOL) -> None:
    if not np.isfinite(z) or abs(z) < tol or abs(z - 1) < tol:
        raise DegenerateConfigurationError(f"degenerate shape parameter {z}.")


def shape_triple(z: complex) -> ShapeTriple:
    """(z, 1/(1-z), 1-1/z): the shapes at edge pairs {01|23}, {02|13}, {03|12}."""
    z = complex(z)
    _check_shape(z)
    return ShapeTriple(z, 1 / (1 - z), 1 - 1 / z)


def tetrahedron_shapes(points: Sequence[IdealPoint]) -> ShapeTriple:
    """Shapes of an ideal tetrahedron with corners points[0..3], one per quad slot."""
    v0, v1, v2, v3 = points
    return ShapeTriple(
        cross_ratio(v0, v1, v2, v3),
        cross_ratio(v0, v2, v3, v1),
        cross_ratio(v0, v3, v1, v2),
    )


def standard_tetrahedron(z: complex) -> Tuple[IdealPoint, IdealPoint, IdealPoint, IdealPoint]:
    """Corners 0, 1, 2 at 0, 1, infinity; corner 3 placed so the slot-0 shape is z."""
    z = complex(z)
    _check_shape(z)
    return (
        IdealPoint(0.0, 1.0),
        IdealPoint(1.0, 1.0),
        IdealPoint.infinity(),
        IdealPoint(1.0, 1 - z),
    )


def _clausen(x: float) -> float:
    """Cl2 on [0, 2*pi)."""
    if x == 0.0:
        return 0.0
    if x > math.pi:
        return -_clausen(2 * math.pi - x)
    return x - x * math.log(x) + float(np.sum(_CLAUSEN_COEFFS * x ** _CLAUSEN_POWERS))


def lobachevsky(theta: float) -> float:
    """
    Lobachevsky function -integral_0^theta ln|2 sin t| dt.

    Evaluated as Cl2(2 theta) / 2 after reducing theta to [0, pi/2] with
    Lambda(theta) = -Lambda(pi - theta), so the result is pi-periodic, odd and
    exactly zero at pi/2. Absolute error stays below 1e-13.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"lobachevsky needs a finite angle, got {theta}.")
    t = theta % math.pi
    if t >= math.pi:
        t = 0.0
    if t == HALF_PI:
        return 0.0
    if t > HALF_PI:
        return -0.5 * _clausen(2 * (math.pi - t))
    return 0.5 * _clausen(2 * t)


def ideal_volume(z: complex) -> float:
    """Signed volume of the ideal tetrahedron with shape z; positive when Im z > 0."""
    triple = shape_triple(z)
    if triple.z0.imag == 0.0:
        return 0.0
    return sum(lobachevsky(np.angle(w)) for w in triple)


def _frame(p1: IdealPoint, p2: IdealPoint, p3: IdealPoint) -> np.ndarray:
    """Matrix sending 0, infinity, 1 to p1, p2, p3."""
    basis = np.column_stack([p2.vector, p1.vector])
    x, y = np.linalg.solve(basis, p3.vector)
    return np.column_stack([x * p2.vector, y * p1.vector])


def mobius_from_correspondence(src: Sequence[IdealPoint], dst: Sequence[IdealPoint]) -> Mobius:
    """
    The unique Mobius map sending src[i] to dst[i] for i = 0, 1, 2.

    Raises:
        DegenerateConfigurationError: two points of either triple coincide.
    """
    _check_distinct(src, "source triple")
    _check_distinct(dst, "target triple")
    forward = _frame(*dst)
    backward = np.linalg.inv(_frame(*src))
    return Mobius.from_array(forward @ backward)


def fixed_points(m: Mobius) -> Tuple[IdealPoint, ...]:
    """
    Fixed points of m: the eigenlines of its matrix. One point for a parabolic,
    two otherwise.

    Raises:
        DegenerateConfigurationError: m is plus or minus the identity.
    """
    if m.distance_to_identity() < COINCIDENCE_TOL:
        raise DegenerateConfigurationError("the identity fixes every point.")
    disc = np.sqrt(complex(m.trace) ** 2 - 4)
    eigenvalues = [(m.trace + disc) / 2]
    if abs(disc) > 1e-10:
        eigenvalues.append((m.trace - disc) / 2)

    points = []
    for lam in eigenvalues:
        from_row0 = np.array([m.m01, lam - m.m00])
        from_row1 = np.array([lam - m.m11, m.m10])
        vec = from_row0 if np.linalg.norm(from_row0) >= np.linalg.norm(from_row1) else from_row1
        points.append(IdealPoint(complex(vec[0]), complex(vec[1])))
    return tuple(points)
