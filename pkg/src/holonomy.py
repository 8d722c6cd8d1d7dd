"""
Associated representation of a solution: develop the tetrahedra of the
fundamental domain into ideal tetrahedra, read off the Mobius maps pairing its
faces, and from those recover the images of the edge-path generators.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import get_settings
from .errors import DegenerateConfigurationError, HolonomyError
from .fundamental_group import (
    Presentation,
    Representation,
    Word,
    evaluate_word,
    free_reduce,
    presentation,
)
from .geometry import (
    IdealPoint,
    Mobius,
    mobius_apply,
    mobius_from_correspondence,
    standard_tetrahedron,
)
from .gluing import DEGENERACY_GUARD, ShapeAssignment, is_flat
from .spinning import FundamentalDomain, choose_fundamental_domain
from .triangulation import (
    EDGE_VERTICES,
    Triangulation,
    edge_classes,
    edge_lookup,
    edge_walk,
    face_classes,
    vertex_classes,
)

logger = logging.getLogger(__name__)

BATTERY_RANDOM_WORDS = 16
BATTERY_MAX_LENGTH = 8
MAX_SIGN_SEARCH = 12

Corner = Tuple[int, int]


@dataclass(frozen=True)
class DevelopedComplex:
    points: Tuple[Tuple[IdealPoint, IdealPoint, IdealPoint, IdealPoint], ...]  # per tet, corners 0..3
    frames: Tuple[Mobius, ...]  # per tet, maps the standard tetrahedron onto the developed one


@dataclass(frozen=True)
class FacePairingPresentation:
    generators: Tuple[str, ...]
    generator_faces: Tuple[Tuple[int, int], ...]
    relators: Tuple[Word, ...]  # one per edge class


@dataclass
class ConjugacyReport:
    verdict: str  # "conjugate", "distinct", "reducible-flag" or "unverified-flat"
    max_trace_deviation: float
    words_checked: int
    signs: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict != "distinct"


def develop(tri: Triangulation, dom: FundamentalDomain, Z: ShapeAssignment) -> DevelopedComplex:
    """
    Places tetrahedron 0 at (0, 1, inf, p) and each later one, in BFS order,
    across the tree face it shares with its parent.

    Raises:
        DegenerateConfigurationError: a shape lies within 1e-8 of 0 or 1.
    """
    shapes = Z.tetrahedron_shapes
    for t, z in enumerate(shapes):
        if abs(z) < DEGENERACY_GUARD or abs(z - 1) < DEGENERACY_GUARD:
            raise DegenerateConfigurationError(f"tetrahedron {t} is degenerate: shape {complex(z)}.")
    points: List[Optional[Tuple[IdealPoint, ...]]] = [None] * tri.num_tetrahedra
    frames: List[Optional[Mobius]] = [None] * tri.num_tetrahedra

    root = dom.order[0]
    points[root] = standard_tetrahedron(shapes[root])
    frames[root] = Mobius.identity()
    for t in dom.order[1:]:
        parent, _, own_face = dom.parents[t]
        perm = tri.gluings[t][own_face].perm
        standard = standard_tetrahedron(shapes[t])
        shared = [v for v in range(4) if v != own_face]
        frame = mobius_from_correspondence(
            [standard[v] for v in shared],
            [points[parent][perm[v]] for v in shared],
        )
        developed = [None] * 4
        for v in shared:
            developed[v] = points[parent][perm[v]]
        developed[own_face] = mobius_apply(frame, standard[own_face]).normalized()
        points[t] = tuple(developed)
        frames[t] = frame
    return DevelopedComplex(points=tuple(points), frames=tuple(frames))


def face_pairing_holonomy(
    tri: Triangulation, dom: FundamentalDomain, developed: DevelopedComplex
) -> Dict[Tuple[int, int], Mobius]:
    """
    For each non-tree face (t, f), the map carrying the developed partner
    tetrahedron onto the copy adjacent to t across f.
    """
    result = {}
    for t in range(tri.num_tetrahedra):
        for f in range(4):
            if (t, f) in dom.tree_faces:
                continue
            gluing = tri.gluings[t][f]
            shared = [v for v in range(4) if v != f]
            result[(t, f)] = mobius_from_correspondence(
                [developed.points[gluing.tet][gluing.perm[v]] for v in shared],
                [developed.points[t][v] for v in shared],
            )
    return result


def face_pairing_relators(tri: Triangulation, dom: FundamentalDomain) -> FacePairingPresentation:
    """
    Generators are the non-tree face classes; walking once around each edge
    class and recording the faces crossed gives one relator per edge.
    """
    pairs = [pair for pair in face_classes(tri) if pair[0] not in dom.tree_faces]
    generators = tuple(f"f{i}" for i in range(len(pairs)))
    letter: Dict[Tuple[int, int], Tuple[str, int]] = {}
    for label, (first, second) in zip(generators, pairs):
        letter[first] = (label, 1)
        letter[second] = (label, -1)

    relators = []
    for ec in edge_classes(tri):
        word = [letter[(step.tet, step.d)] for step in edge_walk(tri, ec) if (step.tet, step.d) in letter]
        relators.append(free_reduce(word))
    return FacePairingPresentation(
        generators=generators,
        generator_faces=tuple(first for first, _ in pairs),
        relators=tuple(relators),
    )


def face_pairing_representation(
    fp: FacePairingPresentation, pairings: Dict[Tuple[int, int], Mobius]
) -> Representation:
    return Representation({label: pairings[face] for label, face in zip(fp.generators, fp.generator_faces)})


def _corner_deck_maps(
    tri: Triangulation, dom: FundamentalDomain, pairings: Dict[Tuple[int, int], Mobius]
) -> Dict[Corner, np.ndarray]:
    """
    Holonomy of the deck element taking the first corner of each vertex class
    to the given corner's lift in the fundamental domain.
    """
    deck: Dict[Corner, np.ndarray] = {}
    for vc in vertex_classes(tri):
        start = vc.corners[0]
        deck[start] = np.eye(2, dtype=complex)
        queue = deque([start])
        while queue:
            t, v = queue.popleft()
            for f in range(4):
                if f == v:
                    continue
                gluing = tri.gluings[t][f]
                other = (gluing.tet, gluing.perm[v])
                if other in deck:
                    continue
                if (t, f) in dom.tree_faces:
                    deck[other] = deck[(t, v)]
                else:
                    deck[other] = pairings[(t, f)].inverse().matrix @ deck[(t, v)]
                queue.append(other)
    return deck


def holonomy_representation(
    tri: Triangulation,
    dom: FundamentalDomain,
    pres: Presentation,
    Z: ShapeAssignment,
    tol: Optional[float] = None,
) -> Representation:
    """
    Images of the edge-path generators under the holonomy of Z.

    Raises:
        HolonomyError: a relator is more than tol away from plus or minus the identity.
    """
    tol = get_settings().holonomy_tol if tol is None else tol
    developed = develop(tri, dom, Z)
    pairings = face_pairing_holonomy(tri, dom, developed)
    deck = _corner_deck_maps(tri, dom, pairings)

    # One representative tetrahedron edge per edge class, oriented tail to head.
    lookup = edge_lookup(tri)
    ends: Dict[int, Tuple[Corner, Corner]] = {}
    for t in range(tri.num_tetrahedra):
        for edge, (a, b) in enumerate(EDGE_VERTICES):
            class_index, direction = lookup[(t, edge)]
            if class_index not in ends:
                ends[class_index] = ((t, a), (t, b)) if direction == 1 else ((t, b), (t, a))

    def step(tail: Corner, head: Corner) -> np.ndarray:
        return np.linalg.inv(deck[tail]) @ deck[head]

    # Lifts of the vertex classes joined by the spanning tree.
    classes = edge_classes(tri)
    base = {0: np.eye(2, dtype=complex)}
    pending = True
    while pending:
        pending = False
        for ec in classes:
            if ec.index not in pres.tree_edges:
                continue
            tail_class, head_class = ec.endpoints
            tail, head = ends[ec.index]
            if tail_class in base and head_class not in base:
                base[head_class] = base[tail_class] @ step(tail, head)
                pending = True
            elif head_class in base and tail_class not in base:
                base[tail_class] = base[head_class] @ step(head, tail)
                pending = True

    generators = {}
    for label, class_index in zip(pres.generators, pres.generator_edges):
        tail_class, head_class = classes[class_index].endpoints
        tail, head = ends[class_index]
        matrix = base[tail_class] @ step(tail, head) @ np.linalg.inv(base[head_class])
        generators[label] = Mobius.from_array(matrix)
    rep = Representation(generators)

    for i, relator in enumerate(pres.relators):
        deviation = evaluate_word(rep, relator).distance_to_identity()
        if not deviation < tol:
            raise HolonomyError(
                f"relator {i} of the developed holonomy is {deviation:.3e} from the identity (tol {tol})."
            )
    logger.info(f"Developed holonomy passes {len(pres.relators)} relators")
    return rep


def _word_battery(generators: Tuple[str, ...], seed: int) -> List[Word]:
    battery: List[Word] = [((g, 1),) for g in generators]
    for i in range(len(generators)):
        for j in range(i + 1, len(generators)):
            battery.append(((generators[i], 1), (generators[j], 1)))
    if generators:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))
        for _ in range(BATTERY_RANDOM_WORDS):
            length = int(rng.integers(1, BATTERY_MAX_LENGTH + 1))
            word = [
                (generators[int(rng.integers(len(generators)))], 1 if rng.random() < 0.5 else -1)
                for _ in range(length)
            ]
            reduced = free_reduce(word)
            if reduced:
                battery.append(reduced)
    return battery


def _deviation(word: Word, traces1, traces2, signs: Dict[str, int]) -> float:
    sign = 1
    for label, _ in word:
        sign *= signs[label]
    t1, t2 = traces1[word], traces2[word]
    return abs(t1 - sign * t2) / max(1.0, abs(t1))


def conjugacy_check(
    rep1: Representation, rep2: Representation, pres: Presentation, tol: float, seed: int = 0
) -> ConjugacyReport:
    """
    Compares traces over a word battery: every generator, every product of two
    generators, and 16 random words of length at most 8. Matrices are only known
    up to sign, so each generator of rep2 gets a sign chosen to align its trace
    with rep1; generators with trace near zero are searched exhaustively.
    """
    generators = tuple(pres.generators)
    battery = _word_battery(generators, seed)
    traces1 = {w: evaluate_word(rep1, w).trace for w in battery}
    traces2 = {w: evaluate_word(rep2, w).trace for w in battery}

    signs: Dict[str, int] = {}
    ambiguous = []
    for g in generators:
        t1, t2 = traces1[((g, 1),)], traces2[((g, 1),)]
        if abs(t1) < 1e-6 and abs(t2) < 1e-6:
            ambiguous.append(g)
            signs[g] = 1
        else:
            signs[g] = 1 if abs(t1 - t2) <= abs(t1 + t2) else -1

    best = max((_deviation(w, traces1, traces2, signs) for w in battery), default=0.0)
    for choice in product((1, -1), repeat=min(len(ambiguous), MAX_SIGN_SEARCH)):
        trial = dict(signs)
        trial.update(zip(ambiguous, choice))
        deviation = max((_deviation(w, traces1, traces2, trial) for w in battery), default=0.0)
        if deviation < best:
            best, signs = deviation, trial

    if best < tol:
        parabolic = all(min(abs(t - 2), abs(t + 2)) < tol for t in traces1.values())
        verdict = "reducible-flag" if parabolic else "conjugate"
    else:
        verdict = "distinct"
    logger.info(f"Conjugacy check over {len(battery)} words: {verdict}, max deviation {best:.3e}")
    return ConjugacyReport(verdict=verdict, max_trace_deviation=float(best), words_checked=len(battery), signs=signs)


def certify_round_trip(
    tri: Triangulation,
    rep: Representation,
    Z: ShapeAssignment,
    tol: Optional[float] = None,
    pres: Optional[Presentation] = None,
    dom: Optional[FundamentalDomain] = None,
) -> ConjugacyReport:
    """Holonomy of Z compared with rep; all-flat solutions are reported unverified."""
    tol = get_settings().holonomy_tol if tol is None else tol
    pres = presentation(tri) if pres is None else pres
    dom = choose_fundamental_domain(tri) if dom is None else dom
    if is_flat(Z):
        logger.warning("Every tetrahedron is flat; conjugacy is not certified")
        return ConjugacyReport(verdict="unverified-flat", max_trace_deviation=float("nan"), words_checked=0)
    holonomy = holonomy_representation(tri, dom, pres, Z, tol)
    return conjugacy_check(rep, holonomy, pres, tol)
