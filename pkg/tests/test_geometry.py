import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.errors import DegenerateConfigurationError
from src.geometry import (
    IdealPoint,
    Mobius,
    cross_ratio,
    fixed_points,
    ideal_volume,
    lobachevsky,
    mobius_apply,
    mobius_from_correspondence,
    points_coincide,
    shape_triple,
    standard_tetrahedron,
    tetrahedron_shapes,
)

REGULAR_SHAPE = complex(0.5, math.sqrt(3) / 2)


def _random_point(rng):
    return IdealPoint(complex(*rng.standard_normal(2)), 1.0)


def _random_mobius(rng):
    return Mobius.from_array(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))


def _lobachevsky_by_quadrature(theta):
    value, _ = quad(lambda t: -math.log(abs(2 * math.sin(t))), 0.0, theta, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


def test_cross_ratio_with_point_at_infinity():
    z = cross_ratio(IdealPoint(0.0), IdealPoint.infinity(), IdealPoint(1.0), IdealPoint(2.0))
    assert abs(z - 0.5) < 1e-15


def test_cross_ratio_rejects_coincident_points():
    p = IdealPoint(0.3 + 0.1j)
    with pytest.raises(DegenerateConfigurationError):
        cross_ratio(p, IdealPoint(2.0), p, IdealPoint(1.0))


def test_cross_ratio_is_mobius_invariant():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        points = [_random_point(rng) for _ in range(4)]
        m = _random_mobius(rng)
        moved = [mobius_apply(m, p) for p in points]
        before = cross_ratio(*points)
        after = cross_ratio(*moved)
        assert abs(before - after) <= 1e-9 * max(1.0, abs(before))


def test_cross_ratio_double_transposition_symmetry():
    rng = np.random.default_rng(2)
    for _ in range(200):
        a, b, c, d = (_random_point(rng) for _ in range(4))
        z = cross_ratio(a, b, c, d)
        assert abs(cross_ratio(b, a, d, c) - z) <= 1e-9 * max(1.0, abs(z))
        assert abs(cross_ratio(c, d, a, b) - z) <= 1e-9 * max(1.0, abs(z))


def test_shape_triple_values():
    assert shape_triple(2) == (2, -1, 0.5)
    triple = shape_triple(REGULAR_SHAPE)
    assert all(abs(w - REGULAR_SHAPE) < 1e-15 for w in triple)


def test_shape_triple_product_is_minus_one():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        z = complex(*rng.standard_normal(2))
        z0, z1, z2 = shape_triple(z)
        assert abs(z0 * z1 * z2 + 1) < 1e-12 * max(1.0, abs(z), abs(1 / (1 - z)))


@pytest.mark.parametrize("z", [0, 1, complex("nan")])
def test_shape_triple_rejects_degenerate_shapes(z):
    with pytest.raises(DegenerateConfigurationError):
        shape_triple(z)


def test_standard_tetrahedron_has_requested_shape():
    for z in (REGULAR_SHAPE, 2.5 - 0.7j, -3 + 1j):
        shapes = tetrahedron_shapes(standard_tetrahedron(z))
        expected = shape_triple(z)
        assert all(abs(a - b) < 1e-12 for a, b in zip(shapes, expected))


def test_tetrahedron_shapes_form_a_shape_triple():
    rng = np.random.default_rng(4)
    for _ in range(200):
        shapes = tetrahedron_shapes([_random_point(rng) for _ in range(4)])
        expected = shape_triple(shapes.z0)
        for a, b in zip(shapes, expected):
            assert abs(a - b) <= 1e-8 * max(1.0, abs(b))


def test_lobachevsky_special_values():
    assert lobachevsky(0.0) == 0.0
    assert lobachevsky(math.pi / 2) == 0.0
    assert lobachevsky(-math.pi / 2) == 0.0
    assert abs(lobachevsky(math.pi / 6) - 0.5074708) < 1e-7
    assert abs(6 * lobachevsky(math.pi / 3) - 2.0298832128) < 1e-9


def test_lobachevsky_reflects_about_half_pi():
    for eps in (1e-9, 1e-6, 1e-3, 0.1, 0.7):
        left = lobachevsky(math.pi / 2 - eps)
        right = lobachevsky(math.pi / 2 + eps)
        assert abs(left + right) < 1e-13
        assert abs(left - _lobachevsky_by_quadrature(math.pi / 2 - eps)) < 1e-9


def test_lobachevsky_matches_quadrature():
    rng = np.random.default_rng(5)
    for theta in rng.uniform(0.0, math.pi, size=1000):
        assert abs(lobachevsky(theta) - _lobachevsky_by_quadrature(theta)) < 1e-9


def test_lobachevsky_is_odd_and_pi_periodic():
    rng = np.random.default_rng(6)
    for theta in rng.uniform(-10.0, 10.0, size=200):
        assert abs(lobachevsky(-theta) + lobachevsky(theta)) < 1e-12
        assert abs(lobachevsky(theta + math.pi) - lobachevsky(theta)) < 1e-12


@pytest.mark.parametrize("theta", [math.inf, -math.inf, math.nan])
def test_lobachevsky_rejects_non_finite_angles(theta):
    with pytest.raises(ValueError):
        lobachevsky(theta)


def test_ideal_volume():
    assert abs(ideal_volume(REGULAR_SHAPE) - 1.0149416064) < 1e-9
    assert ideal_volume(2.0) == 0.0
    assert ideal_volume(-0.5) == 0.0
    z = 0.3 + 1.2j
    assert abs(ideal_volume(z.conjugate()) + ideal_volume(z)) < 1e-14
    assert ideal_volume(z) > 0


def test_mobius_composition_and_inverse():
    rng = np.random.default_rng(7)
    for _ in range(100):
        m, n = _random_mobius(rng), _random_mobius(rng)
        p = _random_point(rng)
        assert points_coincide(mobius_apply(m @ n, p), mobius_apply(m, mobius_apply(n, p)), tol=1e-9)
        assert (m @ m.inverse()).distance_to_identity() < 1e-9
        assert m.power(-2).distance(m.inverse() @ m.inverse()) < 1e-9


def test_mobius_from_correspondence():
    zero, one, inf = IdealPoint(0.0), IdealPoint(1.0), IdealPoint.infinity()
    flip = mobius_from_correspondence([zero, one, inf], [one, zero, inf])
    assert abs(mobius_apply(flip, IdealPoint(2.0)).to_complex() - (-1.0)) < 1e-12
    assert abs(mobius_apply(flip, IdealPoint(0.3 + 0.2j)).to_complex() - (0.7 - 0.2j)) < 1e-12

    rng = np.random.default_rng(8)
    for _ in range(100):
        src = [_random_point(rng) for _ in range(3)]
        dst = [_random_point(rng) for _ in range(3)]
        m = mobius_from_correspondence(src, dst)
        for s, d in zip(src, dst):
            assert points_coincide(mobius_apply(m, s), d, tol=1e-8)


def test_mobius_from_correspondence_rejects_coincident_points():
    p = IdealPoint(1.0)
    with pytest.raises(DegenerateConfigurationError):
        mobius_from_correspondence([p, p, IdealPoint(0.0)], [IdealPoint(0.0), IdealPoint(1.0), IdealPoint(2.0)])


def test_fixed_points():
    translation = Mobius(1.0, 1.0, 0.0, 1.0)
    (p,) = fixed_points(translation)
    assert p.is_infinite()

    dilation = Mobius.from_array([[2.0, 0.0], [0.0, 0.5]])
    points = fixed_points(dilation)
    assert len(points) == 2
    assert any(q.is_infinite() for q in points)
    assert any(abs(q.to_complex()) < 1e-15 for q in points if not q.is_infinite())

    rng = np.random.default_rng(9)
    for _ in range(100):
        m = _random_mobius(rng)
        for q in fixed_points(m):
            assert points_coincide(mobius_apply(m, q), q, tol=1e-8)


def test_fixed_points_of_identity_raise():
    with pytest.raises(DegenerateConfigurationError):
        fixed_points(Mobius.identity())
