import numpy as np
import pytest

from src import census
from src.errors import RepresentationError
from src.fundamental_group import (
    Presentation,
    Representation,
    abelianization,
    check_representation,
    conjugate_representation,
    cyclic_representation,
    edge_loop_word,
    evaluate_word,
    free_basis,
    free_reduce,
    integral_cocycles,
    invert_word,
    presentation,
    representation_on_free_basis,
    trivial_representation,
    word_to_string,
)
from src.geometry import Mobius
from src.triangulation import edge_classes


def _random_mobius(rng):
    return Mobius.from_array(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))


def _random_word(rng, generators, length):
    return tuple((generators[rng.integers(len(generators))], int(rng.choice([-1, 1]))) for _ in range(length))


def test_free_reduce_and_invert():
    word = (("g0", 1), ("g1", 1), ("g1", -1), ("g0", 1), ("g2", -1))
    assert free_reduce(word) == (("g0", 1), ("g0", 1), ("g2", -1))
    assert free_reduce(word + invert_word(word)) == ()
    assert word_to_string(free_reduce(word)) == "g0 g0 g2^-1"
    assert word_to_string(()) == "1"


def test_figure_eight_presentation(figure_eight_tri):
    pres = presentation(figure_eight_tri)
    assert pres.tree_edges == frozenset()
    assert pres.generators == ("g0", "g1")
    assert pres.generator_edges == (0, 1)
    assert len(pres.relators) == 4
    assert abelianization(pres) == (0, ())


def test_lens_space_presentation(lens_tri):
    pres = presentation(lens_tri)
    assert pres.tree_edges == frozenset({1})
    assert pres.generators == ("g0", "g1", "g2", "g3", "g4", "g5")
    assert pres.generator_edges == (0, 2, 3, 4, 5, 6)
    assert len(pres.relators) == 10
    assert abelianization(pres) == (0, (5,))


def test_presentation_is_deterministic(lens_tri):
    assert presentation(lens_tri) == presentation(lens_tri)


def test_three_sphere_and_sphere_cross_circle_abelianizations():
    assert abelianization(presentation(census.double_tetrahedron())) == (0, ())
    assert abelianization(presentation(census.sphere_cross_circle())) == (1, ())


def test_edge_loop_words(lens_tri):
    pres = presentation(lens_tri)
    classes = edge_classes(lens_tri)
    loops = [ec.index for ec in classes if ec.is_loop]
    assert loops == [0, 4]
    assert edge_loop_word(pres, classes[0]) == (("g0", 1),)
    assert edge_loop_word(pres, classes[4]) == (("g3", 1),)
    assert edge_loop_word(pres, classes[1]) is None


def test_evaluate_word_is_a_homomorphism(lens_tri):
    rng = np.random.default_rng(11)
    pres = presentation(lens_tri)
    rep = Representation({g: _random_mobius(rng) for g in pres.generators})
    assert evaluate_word(rep, ()).distance_to_identity() == 0.0
    assert evaluate_word(rep, (("g2", 1), ("g2", -1))).distance_to_identity() < 1e-12
    for _ in range(50):
        u = _random_word(rng, pres.generators, 5)
        v = _random_word(rng, pres.generators, 4)
        product = evaluate_word(rep, u) @ evaluate_word(rep, v)
        assert evaluate_word(rep, u + v).distance(product) < 1e-8


def test_evaluate_word_rejects_unknown_label(lens_rep):
    with pytest.raises(RepresentationError, match="unknown generator"):
        evaluate_word(lens_rep, (("h7", 1),))


def test_lens_representation_passes(lens_tri, lens_rep):
    pres = presentation(lens_tri)
    report = check_representation(lens_tri, pres, lens_rep, 1e-8)
    assert report.passed
    assert set(report.loop_distances) == {0, 4}
    assert max(report.relator_deviations) < 1e-8


def test_lens_relators_hold_in_random_conjugated_products(lens_tri, lens_rep):
    rng = np.random.default_rng(12)
    pres = presentation(lens_tri)
    for _ in range(50):
        word = ()
        for _ in range(4):
            relator = pres.relators[rng.integers(len(pres.relators))]
            if rng.integers(2):
                relator = invert_word(relator)
            conjugator = _random_word(rng, pres.generators, 3)
            word += conjugator + relator + invert_word(conjugator)
        assert evaluate_word(lens_rep, word).distance_to_identity() < 1e-6


def test_trivial_representation_fails_loop_check(lens_tri):
    pres = presentation(lens_tri)
    report = check_representation(lens_tri, pres, trivial_representation(pres), 1e-8)
    assert not report.passed
    assert report.failing_relators == []
    assert report.failing_loops == [0, 4]


def test_random_representation_fails_relators(lens_tri):
    rng = np.random.default_rng(13)
    pres = presentation(lens_tri)
    rep = Representation({g: _random_mobius(rng) for g in pres.generators})
    report = check_representation(lens_tri, pres, rep, 1e-8)
    assert report.failing_relators


def test_missing_generator_is_an_error(lens_tri, lens_rep):
    pres = presentation(lens_tri)
    partial = Representation({g: m for g, m in lens_rep.generators.items() if g != "g5"})
    with pytest.raises(RepresentationError, match="lacks generators"):
        check_representation(lens_tri, pres, partial, 1e-8)


def test_conjugated_representation_still_passes(lens_tri, lens_rep):
    rng = np.random.default_rng(14)
    pres = presentation(lens_tri)
    rep = conjugate_representation(lens_rep, _random_mobius(rng))
    assert check_representation(lens_tri, pres, rep, 1e-8).passed


def test_sphere_cross_circle_cyclic_representation():
    tri = census.sphere_cross_circle()
    pres = presentation(tri)
    cocycles = integral_cocycles(pres)
    assert len(cocycles) == 1
    loxodromic = Mobius.from_array([[2.0, 0.0], [0.0, 0.5]])
    rep = cyclic_representation(pres, cocycles[0], loxodromic)
    report = check_representation(tri, pres, rep, 1e-8)
    assert report.passed
    for distance in report.loop_distances.values():
        assert distance > 0.5


def test_cyclic_representation_checks_length(lens_tri):
    pres = presentation(lens_tri)
    with pytest.raises(RepresentationError):
        cyclic_representation(pres, [1, 2], Mobius.identity())


def _bare_presentation(generators, relators):
    return Presentation(
        generators=tuple(generators),
        generator_edges=tuple(range(len(generators))),
        relators=tuple(relators),
        relator_faces=tuple((i, 0) for i in range(len(relators))),
        edge_word=tuple(((g, 1),) for g in generators),
        tree_edges=frozenset(),
    )


def test_free_basis_solves_a_triangle_relator():
    pres = _bare_presentation(["a", "b", "c"], [(("a", 1), ("b", 1), ("c", -1))])
    fb = free_basis(pres)
    assert fb.basis == ("b", "c")
    assert fb.expressions["a"] == (("c", 1), ("b", -1))
    assert fb.expressions["b"] == (("b", 1),)


def test_free_basis_substitutes_into_later_relators():
    pres = _bare_presentation(
        ["a", "b", "c", "d"],
        [(("a", 1), ("b", -1)), (("a", 1), ("c", 1), ("d", 1))],
    )
    fb = free_basis(pres)
    assert fb.basis == ("c", "d")
    for g in "ab":
        assert fb.expressions[g] == (("d", -1), ("c", -1))


def test_free_basis_rejects_commutator():
    pres = _bare_presentation(["a", "b"], [(("a", 1), ("b", 1), ("a", -1), ("b", -1))])
    with pytest.raises(RepresentationError, match="none can be solved"):
        free_basis(pres)


def test_lens_space_group_has_no_free_basis(lens_tri):
    with pytest.raises(RepresentationError):
        free_basis(presentation(lens_tri))


def test_representation_on_free_basis_needs_every_image():
    fb = free_basis(_bare_presentation(["a", "b", "c"], [(("a", 1), ("b", 1), ("c", -1))]))
    with pytest.raises(RepresentationError, match="basis generators"):
        representation_on_free_basis(fb, {"b": Mobius.identity()})


def test_connected_sum_group_is_free_of_rank_two(connected_sum_tri):
    pres = presentation(connected_sum_tri)
    fb = free_basis(pres)
    assert len(fb.basis) == 2
    assert set(fb.expressions) == set(pres.generators)
    for word in fb.expressions.values():
        assert set(g for g, _ in word) <= set(fb.basis)


def test_connected_sum_representation_is_nonelementary(connected_sum_tri, connected_sum_rep):
    pres = presentation(connected_sum_tri)
    report = check_representation(connected_sum_tri, pres, connected_sum_rep, 1e-8)
    assert report.passed
    assert max(report.relator_deviations) < 1e-10
    assert len(report.loop_distances) == 8
    assert min(report.loop_distances.values()) > 1e-3

    a, b = (connected_sum_rep.generators[g] for g in free_basis(pres).basis)
    commutator = a @ b @ a.inverse() @ b.inverse()
    assert abs(commutator.trace - (2.28 + 0.96j)) < 1e-12
