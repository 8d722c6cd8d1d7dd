"""
Builders for a few standard closed triangulations.
"""
import logging
from collections import deque
from itertools import combinations
from math import gcd
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .errors import TriangulationError
from .triangulation import Triangulation, build_triangulation, corner_class, permutation_parity

logger = logging.getLogger(__name__)

Label = Hashable

FIGURE_EIGHT_GLUINGS = (
    ((1, (1, 3, 0, 2)), (1, (2, 0, 3, 1)), (1, (0, 3, 2, 1)), (1, (2, 1, 0, 3))),
    ((0, (1, 3, 0, 2)), (0, (2, 0, 3, 1)), (0, (0, 3, 2, 1)), (0, (2, 1, 0, 3))),
)


def figure_eight() -> Triangulation:
    """Two tetrahedra, one vertex, two edges of degree 6 (vertex link is a torus)."""
    return build_triangulation(FIGURE_EIGHT_GLUINGS)


def double_tetrahedron() -> Triangulation:
    """Two tetrahedra glued along all four faces by swapping vertices 0 and 1: S^3."""
    swap = (1, 0, 2, 3)
    return build_triangulation([
        [(1, swap) for _ in range(4)],
        [(0, swap) for _ in range(4)],
    ])


def lens_space(p: int, q: int) -> Triangulation:
    """
    L(p, q): p tetrahedra around a central axis. Tetrahedron i has vertices
    north pole, south pole, e_i, e_{i+1}; faces 2 and 3 join neighbours around the
    axis, and the upper faces are glued to lower faces q steps further round.
    """
    if p < 2 or not 1 <= q < p or gcd(p, q) != 1:
        raise TriangulationError(f"lens space needs p >= 2, 1 <= q < p and gcd(p, q) = 1, got ({p}, {q}).")
    swap_poles = (1, 0, 2, 3)
    swap_equator = (0, 1, 3, 2)
    return build_triangulation([
        [
            ((i - q) % p, swap_poles),
            ((i + q) % p, swap_poles),
            ((i + 1) % p, swap_equator),
            ((i - 1) % p, swap_equator),
        ]
        for i in range(p)
    ])


def _match_faces(
    simplices: Sequence[Tuple[Label, ...]],
    faces: Sequence[Tuple[int, int]],
    key: Callable[[Label], Label],
) -> Dict[Tuple[int, int], Tuple[int, Tuple[int, ...]]]:
    groups: Dict[frozenset, List[Tuple[int, int]]] = {}
    for t, f in faces:
        labels = frozenset(key(x) for i, x in enumerate(simplices[t]) if i != f)
        groups.setdefault(labels, []).append((t, f))

    gluings = {}
    for labels, members in groups.items():
        if len(members) != 2:
            raise TriangulationError(
                f"face with labels {sorted(map(str, labels))} occurs {len(members)} times, expected 2."
            )
        for (t, f), (u, g) in (members, members[::-1]):
            position = {key(x): i for i, x in enumerate(simplices[u]) if i != g}
            perm = [0] * 4
            for v, x in enumerate(simplices[t]):
                perm[v] = g if v == f else position[key(x)]
            gluings[(t, f)] = (u, tuple(perm))
    return gluings


def _glue(simplices, identify) -> Dict[Tuple[int, int], Tuple[int, Tuple[int, ...]]]:
    def face_labels(face):
        t, f = face
        return frozenset(x for i, x in enumerate(simplices[t]) if i != f)

    all_faces = [(t, f) for t in range(len(simplices)) for f in range(4)]
    counts: Dict[frozenset, int] = {}
    for face in all_faces:
        labels = face_labels(face)
        counts[labels] = counts.get(labels, 0) + 1

    paired = [face for face in all_faces if counts[face_labels(face)] == 2]
    leftover = [face for face in all_faces if counts[face_labels(face)] != 2]
    gluings = _match_faces(simplices, paired, lambda x: x)
    if leftover:
        if identify is None:
            raise TriangulationError(f"{len(leftover)} faces are unglued and no identification was given.")
        gluings.update(_match_faces(simplices, leftover, identify))
    return gluings


def from_simplices(
    simplices: Sequence[Sequence[Label]],
    identify: Optional[Callable[[Label], Label]] = None,
) -> Triangulation:
    """
    Glues labelled tetrahedra along faces with equal vertex labels. Faces left
    over are glued after mapping their labels through identify. Tetrahedra are
    then reoriented (vertices 2 and 3 swapped where needed) so that every gluing
    is odd.
    """
    simplices = [tuple(s) for s in simplices]
    for t, s in enumerate(simplices):
        if len(s) != 4 or len(set(s)) != 4:
            raise TriangulationError(f"simplex {t} needs four distinct labels, got {s}.")

    gluings = _glue(simplices, identify)
    flips = [None] * len(simplices)
    flips[0] = 0
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for f in range(4):
            u, perm = gluings[(t, f)]
            wanted = (1 + permutation_parity(perm) + flips[t]) % 2
            if flips[u] is None:
                flips[u] = wanted
                queue.append(u)
            elif flips[u] != wanted:
                raise TriangulationError("labelled simplices do not glue to an orientable complex.")
    if any(flip is None for flip in flips):
        raise TriangulationError("labelled simplices do not glue to a connected complex.")

    oriented = [
        (s[0], s[1], s[3], s[2]) if flip else s
        for s, flip in zip(simplices, flips)
    ]
    gluings = _glue(oriented, identify)
    return build_triangulation([
        [gluings[(t, f)] for f in range(4)]
        for t in range(len(oriented))
    ])


APEX = ("apex", 0)
HOLE_GLUING = (0, 1, 3, 2)


def _level(label: Label) -> Label:
    return (label[0], 0)


def _sphere_cross_circle_simplices() -> List[Tuple[Label, ...]]:
    simplices = []
    for a, b, c in combinations(range(4), 3):
        simplices.extend([
            ((a, 0), (b, 0), (c, 0), (c, 1)),
            ((a, 0), (b, 0), (b, 1), (c, 1)),
            ((a, 0), (a, 1), (b, 1), (c, 1)),
        ])
    return simplices


def sphere_cross_circle() -> Triangulation:
    """
    S^2 x S^1: each face of the boundary of a tetrahedron times an interval is
    cut into three tetrahedra, and the two ends of the interval are identified.
    """
    return from_simplices(_sphere_cross_circle_simplices(), identify=_level)


def one_four_move(simplices: Sequence[Sequence[Label]], t: int, apex: Label) -> List[Tuple[Label, ...]]:
    """Cones simplex t from a new interior vertex; cone simplex i has apex in place of vertex i."""
    cone = [tuple(apex if v == i else x for v, x in enumerate(simplices[t])) for i in range(4)]
    return [tuple(s) for s in simplices[:t]] + cone + [tuple(s) for s in simplices[t + 1:]]


def _check_hole(tri: Triangulation, t: int) -> None:
    classes = corner_class(tri)
    if len({classes[(t, v)] for v in range(4)}) != 4 or any(g.tet == t for g in tri.gluings[t]):
        raise TriangulationError(f"tetrahedron {t} does not bound an embedded ball.")


def connected_sum(first: Triangulation, hole1: int, second: Triangulation, hole2: int) -> Triangulation:
    """
    Deletes tetrahedron hole1 from first and hole2 from second, then glues the
    two boundary spheres: vertex v of one hole meets vertex HOLE_GLUING[v] of
    the other. Tetrahedra of first come first, in order, then those of second.

    Raises:
        TriangulationError: a hole has repeated vertex classes or is glued to itself.
    """
    _check_hole(first, hole1)
    _check_hole(second, hole2)
    sides = ((first, hole1), (second, hole2))
    offsets = (0, first.num_tetrahedra - 1)

    def index(side: int, t: int) -> int:
        return offsets[side] + (t if t < sides[side][1] else t - 1)

    rows = []
    for side, (tri, hole) in enumerate(sides):
        other, other_hole = sides[1 - side]
        for t in range(tri.num_tetrahedra):
            if t == hole:
                continue
            row = []
            for f, gluing in enumerate(tri.gluings[t]):
                if gluing.tet != hole:
                    row.append((index(side, gluing.tet), gluing.perm))
                    continue
                # t -> hole -> other hole -> the tetrahedron behind it
                hole_face = HOLE_GLUING[gluing.perm[f]]
                behind = other.gluings[other_hole][hole_face]
                perm = tuple(behind.perm[HOLE_GLUING[gluing.perm[v]]] for v in range(4))
                row.append((index(1 - side, behind.tet), perm))
            rows.append(row)
    tri = build_triangulation(rows)
    logger.info(f"Connected sum has {tri.num_tetrahedra} tetrahedra")
    return tri


def sphere_cross_circle_connected_sum() -> Triangulation:
    """
    (S^2 x S^1) # (S^2 x S^1), with free fundamental group of rank 2: a 1-4 move
    on the first simplex of sphere_cross_circle, then two copies summed along the
    cone simplex missing the old fourth vertex. 28 tetrahedra, 6 vertex classes.
    """
    simplices = one_four_move(_sphere_cross_circle_simplices(), 0, APEX)
    coned = from_simplices(simplices, identify=_level)
    return connected_sum(coned, 3, coned, 3)
