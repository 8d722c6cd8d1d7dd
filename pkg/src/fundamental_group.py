"""
Edge-path presentation of the fundamental group of a triangulation, words in its
generators, and representations into PSL(2, C).

Generators are the edge classes outside a spanning tree of the 1-skeleton; every
face class contributes its boundary word as a relator.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.matrices.normalforms import smith_normal_form
from typing_extensions import TypeAlias

from .errors import RepresentationError
from .geometry import Mobius
from .triangulation import (
    EDGE_INDEX,
    EdgeClass,
    Triangulation,
    edge_classes,
    edge_lookup,
    face_classes,
)

logger = logging.getLogger(__name__)

Word: TypeAlias = Tuple[Tuple[str, int], ...]

NONTRIVIAL_LOOP_TOL = 1e-6


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    generator_edges: Tuple[int, ...]  # edge class labelled by each generator
    relators: Tuple[Word, ...]
    relator_faces: Tuple[Tuple[int, int], ...]  # (tet, face) each relator was read from
    edge_word: Tuple[Word, ...]  # per edge class; tree edges map to the empty word
    tree_edges: frozenset


@dataclass(frozen=True)
class Representation:
    generators: Dict[str, Mobius]


@dataclass
class RepresentationReport:
    relator_deviations: List[float] = field(default_factory=list)
    loop_distances: Dict[int, float] = field(default_factory=dict)
    failing_relators: List[int] = field(default_factory=list)
    failing_loops: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failing_relators and not self.failing_loops


def free_reduce(word: Sequence[Tuple[str, int]]) -> Word:
    stack: List[Tuple[str, int]] = []
    for letter in word:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append((letter[0], letter[1]))
    return tuple(stack)


def invert_word(word: Sequence[Tuple[str, int]]) -> Word:
    return tuple((label, -exp) for label, exp in reversed(word))


def word_to_string(word: Word) -> str:
    if not word:
        return "1"
    return " ".join(label if exp == 1 else f"{label}^-1" for label, exp in word)


def _spanning_tree(tri: Triangulation) -> frozenset:
    """BFS from vertex class 0, scanning edge classes in canonical order."""
    classes = edge_classes(tri)
    visited = {0}
    tree = set()
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for ec in classes:
            tail, head = ec.endpoints
            if ec.is_loop or u not in (tail, head):
                continue
            other = head if u == tail else tail
            if other not in visited:
                visited.add(other)
                tree.add(ec.index)
                queue.append(other)
    return frozenset(tree)


def _tet_edge_word(pres_words: Sequence[Word], lookup, tet: int, a: int, b: int) -> Word:
    """Word read walking from corner a to corner b of tetrahedron tet."""
    class_index, direction = lookup[(tet, EDGE_INDEX[(a, b)])]
    word = pres_words[class_index]
    if a > b:
        direction = -direction
    return word if direction == 1 else invert_word(word)


def presentation(tri: Triangulation) -> Presentation:
    """Deterministic edge-path presentation of the fundamental group."""
    classes = edge_classes(tri)
    tree = _spanning_tree(tri)
    generator_edges = tuple(ec.index for ec in classes if ec.index not in tree)
    generators = tuple(f"g{i}" for i in range(len(generator_edges)))
    label_of = dict(zip(generator_edges, generators))
    edge_word = tuple(
        () if ec.index in tree else ((label_of[ec.index], 1),)
        for ec in classes
    )

    lookup = edge_lookup(tri)
    relators = []
    relator_faces = []
    for (t, f), _ in face_classes(tri):
        a, b, c = (v for v in range(4) if v != f)
        boundary = (
            _tet_edge_word(edge_word, lookup, t, a, b)
            + _tet_edge_word(edge_word, lookup, t, b, c)
            + _tet_edge_word(edge_word, lookup, t, c, a)
        )
        relators.append(free_reduce(boundary))
        relator_faces.append((t, f))

    logger.info(
        f"Presentation: {len(generators)} generators, {len(relators)} relators, "
        f"{len(tree)} tree edges"
    )
    return Presentation(
        generators=generators,
        generator_edges=generator_edges,
        relators=tuple(relators),
        relator_faces=tuple(relator_faces),
        edge_word=edge_word,
        tree_edges=tree,
    )


def edge_loop_word(pres: Presentation, e: EdgeClass) -> Optional[Word]:
    """
    Based word of a loop edge, or None when its endpoints are distinct vertices.

    Tree paths collapse to the empty word, so the based word is the edge word itself.
    """
    if not e.is_loop:
        return None
    return free_reduce(pres.edge_word[e.index])


def evaluate_word(rep: Representation, w: Word) -> Mobius:
    result = np.eye(2, dtype=complex)
    for label, exp in w:
        if label not in rep.generators:
            raise RepresentationError(f"unknown generator label {label!r}.")
        m = rep.generators[label]
        result = result @ (m.matrix if exp == 1 else m.inverse().matrix)
    return Mobius.from_array(result)


def check_representation(
    tri: Triangulation, pres: Presentation, rep: Representation, tol: float
) -> RepresentationReport:
    """
    Relators must land within tol of plus or minus the identity, and every
    loop edge must stay at least 1e-6 away from it.
    """
    missing = [g for g in pres.generators if g not in rep.generators]
    if missing:
        raise RepresentationError(f"representation lacks generators {missing}.")
    extra = sorted(set(rep.generators) - set(pres.generators))
    if extra:
        logger.warning(f"Ignoring labels not in the presentation: {extra}")

    report = RepresentationReport()
    for i, relator in enumerate(pres.relators):
        deviation = evaluate_word(rep, relator).distance_to_identity()
        report.relator_deviations.append(deviation)
        if not deviation < tol:
            report.failing_relators.append(i)

    for ec in edge_classes(tri):
        word = edge_loop_word(pres, ec)
        if word is None:
            continue
        distance = evaluate_word(rep, word).distance_to_identity()
        report.loop_distances[ec.index] = distance
        if distance < NONTRIVIAL_LOOP_TOL:
            report.failing_loops.append(ec.index)

    if report.failing_relators:
        logger.info(f"Relators failing at tolerance {tol}: {report.failing_relators}")
    if report.failing_loops:
        logger.info(f"Loop edges mapped to the identity: {report.failing_loops}")
    return report


def relator_matrix(pres: Presentation) -> sympy.Matrix:
    """Exponent sums: one row per relator, one column per generator."""
    column = {g: j for j, g in enumerate(pres.generators)}
    rows = []
    for relator in pres.relators:
        row = [0] * len(pres.generators)
        for label, exp in relator:
            row[column[label]] += exp
        rows.append(row)
    return sympy.Matrix(len(rows), len(pres.generators), lambda i, j: rows[i][j])


def abelianization(pres: Presentation) -> Tuple[int, Tuple[int, ...]]:
    """(free rank, torsion coefficients) of the abelianized group, via Smith normal form."""
    n = len(pres.generators)
    if n == 0:
        return 0, ()
    matrix = relator_matrix(pres)
    if matrix.rows == 0 or all(x == 0 for x in matrix):
        return n, ()
    snf = smith_normal_form(matrix, domain=sympy.ZZ)
    diagonal = [abs(int(snf[i, i])) for i in range(min(snf.rows, snf.cols))]
    rank = sum(1 for d in diagonal if d != 0)
    torsion = tuple(d for d in diagonal if d > 1)
    return n - rank, torsion


def integral_cocycles(pres: Presentation) -> List[Tuple[int, ...]]:
    """Basis of homomorphisms to Z, as primitive integer vectors over the generators."""
    n = len(pres.generators)
    if n == 0:
        return []
    matrix = relator_matrix(pres)
    if matrix.rows == 0:
        return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    cocycles = []
    for vector in matrix.nullspace():
        denominators = [sympy.fraction(x)[1] for x in vector]
        scale = sympy.ilcm(*denominators) if len(denominators) > 1 else denominators[0]
        ints = [int(x * scale) for x in vector]
        divisor = 0
        for x in ints:
            divisor = gcd(divisor, x)
        cocycles.append(tuple(x // divisor for x in ints))
    return cocycles


def cyclic_representation(pres: Presentation, cocycle: Sequence[int], m: Mobius) -> Representation:
    """g -> m^cocycle(g); abelian image, so every relator holds."""
    if len(cocycle) != len(pres.generators):
        raise RepresentationError(
            f"cocycle has {len(cocycle)} entries for {len(pres.generators)} generators."
        )
    return Representation({g: m.power(int(k)) for g, k in zip(pres.generators, cocycle)})


def conjugate_representation(rep: Representation, m: Mobius) -> Representation:
    """g -> m rho(g) m^-1."""
    inverse = m.inverse()
    return Representation({g: m @ x @ inverse for g, x in rep.generators.items()})


def trivial_representation(pres: Presentation) -> Representation:
    return Representation({g: Mobius.identity() for g in pres.generators})


@dataclass(frozen=True)
class FreeBasis:
    basis: Tuple[str, ...]
    expressions: Dict[str, Word]  # every generator as a word in the basis


def _cyclic_reduce(word: Sequence[Tuple[str, int]]) -> Word:
    word = free_reduce(word)
    while len(word) > 1 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
    return word


def _substitute(word: Word, label: str, replacement: Word) -> Word:
    out: List[Tuple[str, int]] = []
    for g, exp in word:
        if g != label:
            out.append((g, exp))
        else:
            out.extend(replacement if exp == 1 else invert_word(replacement))
    return free_reduce(out)


def free_basis(pres: Presentation) -> FreeBasis:
    """
    Tietze elimination. The shortest relator in which some generator occurs
    exactly once is solved for that generator, which is then substituted away
    everywhere; this repeats until no relator is left, and the generators that
    remain freely generate the group.

    Raises:
        RepresentationError: relators remain but none can be solved for a generator.
    """
    relators = [r for r in (_cyclic_reduce(w) for w in pres.relators) if r]
    expressions: Dict[str, Word] = {g: ((g, 1),) for g in pres.generators}
    remaining = list(pres.generators)
    while relators:
        chosen = None
        for position, relator in sorted(enumerate(relators), key=lambda item: (len(item[1]), item[0])):
            counts = Counter(g for g, _ in relator)
            i = next((i for i, (g, _) in enumerate(relator) if counts[g] == 1), None)
            if i is not None:
                chosen = position, i
                break
        if chosen is None:
            raise RepresentationError(
                f"{len(relators)} relators remain over {len(remaining)} generators "
                "and none can be solved for a generator."
            )
        position, i = chosen
        relator = relators.pop(position)
        label, exp = relator[i]
        # u g^e v = 1  =>  g^e = u^-1 v^-1
        solved = free_reduce(invert_word(relator[:i]) + invert_word(relator[i + 1:]))
        replacement = solved if exp == 1 else invert_word(solved)
        relators = [r for r in (_cyclic_reduce(_substitute(w, label, replacement)) for w in relators) if r]
        expressions = {g: _substitute(w, label, replacement) for g, w in expressions.items()}
        remaining.remove(label)
    logger.info(f"Free basis {remaining} after eliminating {len(pres.generators) - len(remaining)} generators")
    return FreeBasis(basis=tuple(remaining), expressions=expressions)


def representation_on_free_basis(fb: FreeBasis, images: Dict[str, Mobius]) -> Representation:
    """Extends arbitrary images of a free basis to every generator."""
    missing = [g for g in fb.basis if g not in images]
    if missing:
        raise RepresentationError(f"no image given for basis generators {missing}.")
    base = Representation({g: images[g] for g in fb.basis})
    return Representation({g: evaluate_word(base, w) for g, w in fb.expressions.items()})
