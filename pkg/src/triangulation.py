"""
Combinatorics of closed, oriented semi-simplicial triangulations.

A triangulation is a list of tetrahedra with vertices labeled 0..3. Face f of a
tetrahedron is the face opposite vertex f. gluings[t][f] = (j, perm) glues face f
of tetrahedron t to face perm[f] of tetrahedron j, sending vertex v to perm[v].
Every gluing permutation must be odd, which orients the complex by the standard
orientation of each tetrahedron.
"""
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from networkx.utils import UnionFind

from .errors import TriangulationError

logger = logging.getLogger(__name__)

# Tetrahedron edge index -> its two vertices, low vertex first.
EDGE_VERTICES: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX: Dict[Tuple[int, int], int] = {}
for _i, (_a, _b) in enumerate(EDGE_VERTICES):
    EDGE_INDEX[(_a, _b)] = _i
    EDGE_INDEX[(_b, _a)] = _i

# Quad slot -> the two opposite tetrahedron edges it separates.
# slot 0 <-> {01|23}, slot 1 <-> {02|13}, slot 2 <-> {03|12}
QUAD_EDGES: Tuple[Tuple[int, int], ...] = ((0, 5), (1, 4), (2, 3))
EDGE_SLOT: Tuple[int, ...] = (0, 1, 2, 2, 1, 0)


class Gluing(NamedTuple):
    tet: int
    perm: Tuple[int, int, int, int]


class Arrow(NamedTuple):
    """One tetrahedron edge in the cyclic walk around an edge class."""
    tet: int
    edge: int
    direction: int  # +1 if low->high vertex agrees with the class orientation


class NormalQuad(NamedTuple):
    tet: int
    slot: int


@dataclass(frozen=True)
class Triangulation:
    num_tetrahedra: int
    gluings: Tuple[Tuple[Gluing, ...], ...]

    def partner(self, tet: int, face: int) -> Tuple[int, int]:
        """(tetrahedron, face) glued to the given face."""
        gluing = self.gluings[tet][face]
        return gluing.tet, gluing.perm[face]

    def quads(self) -> List[NormalQuad]:
        """Normal quads in canonical order (tet 0 slot 0, tet 0 slot 1, ...)."""
        return [NormalQuad(t, s) for t in range(self.num_tetrahedra) for s in range(3)]


@dataclass(frozen=True)
class EdgeClass:
    index: int
    arrows: Tuple[Arrow, ...]
    endpoints: Tuple[int, int]  # (tail, head) vertex classes

    @property
    def degree(self) -> int:
        return len(self.arrows)

    @property
    def members(self) -> frozenset:
        return frozenset((arrow.tet, arrow.edge) for arrow in self.arrows)

    @property
    def is_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]


@dataclass(frozen=True)
class VertexClass:
    index: int
    corners: Tuple[Tuple[int, int], ...]


def permutation_parity(perm: Sequence[int]) -> int:
    """0 for even, 1 for odd."""
    inversions = sum(
        1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j]
    )
    return inversions % 2


def inverse_permutation(perm: Sequence[int]) -> Tuple[int, ...]:
    inverse = [0] * len(perm)
    for i, image in enumerate(perm):
        inverse[image] = i
    return tuple(inverse)


def _validate(tri: Triangulation) -> None:
    n = tri.num_tetrahedra
    for t in range(n):
        for f in range(4):
            gluing = tri.gluings[t][f]
            if gluing is None:
                raise TriangulationError(f"face {f} of tetrahedron {t} is unglued.")
            if not 0 <= gluing.tet < n:
                raise TriangulationError(
                    f"face {f} of tetrahedron {t} is glued to missing tetrahedron {gluing.tet}."
                )
            if sorted(gluing.perm) != [0, 1, 2, 3]:
                raise TriangulationError(
                    f"gluing of face {f} of tetrahedron {t} is not a permutation: {list(gluing.perm)}."
                )
            target_face = gluing.perm[f]
            if gluing.tet == t and target_face == f:
                raise TriangulationError(f"face {f} of tetrahedron {t} is glued to itself.")
            back = tri.gluings[gluing.tet][target_face]
            if back is None or back.tet != t or tuple(back.perm) != inverse_permutation(gluing.perm):
                raise TriangulationError(
                    f"gluing not involutive: face {f} of tetrahedron {t} -> "
                    f"face {target_face} of tetrahedron {gluing.tet} does not glue back."
                )
            if permutation_parity(gluing.perm) == 0:
                raise TriangulationError(
                    f"gluing of face {f} of tetrahedron {t} is an even permutation "
                    f"{list(gluing.perm)}; oriented triangulations use odd gluings."
                )

    components = UnionFind(range(n))
    for t in range(n):
        for gluing in tri.gluings[t]:
            components.union(t, gluing.tet)
    if len(list(components.to_sets())) > 1:
        raise TriangulationError("dual graph is disconnected.")


def build_triangulation(gluings: Sequence[Sequence[Optional[Tuple[int, Sequence[int]]]]]) -> Triangulation:
    """Validated Triangulation from per-tetrahedron lists of (tet, perm) pairs."""
    if len(gluings) == 0:
        raise TriangulationError("a triangulation needs at least one tetrahedron.")
    rows = []
    for t, row in enumerate(gluings):
        if len(row) != 4:
            raise TriangulationError(f"tetrahedron {t} has {len(row)} face records, expected 4.")
        rows.append(tuple(
            None if entry is None else Gluing(int(entry[0]), tuple(int(x) for x in entry[1]))
            for entry in row
        ))
    tri = Triangulation(num_tetrahedra=len(rows), gluings=tuple(rows))
    _validate(tri)
    return tri


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_triangulation(text: str) -> Triangulation:
    """
    Parses the triangulation JSON format:
        {"num_tetrahedra": n, "gluings": [[{"tet": j, "perm": [p0,p1,p2,p3]}, x4], xn]}

    Raises:
        TriangulationError: malformed JSON, missing or unglued faces, non-involutive
        gluings, even (orientation-violating) permutations, or a disconnected complex.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise TriangulationError(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}.")

    if not isinstance(data, dict) or "num_tetrahedra" not in data or "gluings" not in data:
        raise TriangulationError("expected an object with 'num_tetrahedra' and 'gluings'.")
    n = data["num_tetrahedra"]
    if not _is_int(n) or n < 1:
        raise TriangulationError(f"num_tetrahedra must be a positive integer, got {n!r}.")
    raw = data["gluings"]
    if not isinstance(raw, list) or len(raw) != n:
        raise TriangulationError(f"'gluings' must list exactly {n} tetrahedra.")

    rows = []
    for t, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != 4:
            raise TriangulationError(f"tetrahedron {t} must have exactly 4 face records.")
        parsed_row = []
        for f, entry in enumerate(row):
            if entry is None:
                parsed_row.append(None)
                continue
            try:
                tet = entry["tet"]
                perm = entry["perm"]
            except (TypeError, KeyError):
                raise TriangulationError(f"face {f} of tetrahedron {t} needs 'tet' and 'perm'.")
            if not _is_int(tet) or not isinstance(perm, list) or len(perm) != 4 \
                    or not all(_is_int(x) for x in perm):
                raise TriangulationError(f"face {f} of tetrahedron {t} has a malformed record.")
            parsed_row.append((tet, perm))
        rows.append(parsed_row)

    tri = build_triangulation(rows)
    logger.debug(f"Parsed triangulation with {n} tetrahedra")
    return tri


def serialize_triangulation(tri: Triangulation) -> str:
    """Canonical JSON text: fields in fixed order, compact separators."""
    payload = {
        "num_tetrahedra": tri.num_tetrahedra,
        "gluings": [
            [{"tet": g.tet, "perm": list(g.perm)} for g in row]
            for row in tri.gluings
        ],
    }
    return json.dumps(payload, separators=(",", ":"))


def relabel(tri: Triangulation, order: Sequence[int]) -> Triangulation:
    """Renumbers tetrahedra: old tetrahedron t becomes order[t]."""
    if sorted(order) != list(range(tri.num_tetrahedra)):
        raise TriangulationError("relabeling must be a permutation of the tetrahedra.")
    rows: List[Optional[Tuple[Gluing, ...]]] = [None] * tri.num_tetrahedra
    for t, row in enumerate(tri.gluings):
        rows[order[t]] = tuple(Gluing(order[g.tet], g.perm) for g in row)
    return Triangulation(num_tetrahedra=tri.num_tetrahedra, gluings=tuple(rows))


@lru_cache(maxsize=64)
def vertex_classes(tri: Triangulation) -> Tuple[VertexClass, ...]:
    """Corners identified by face gluings, classes sorted by their smallest corner."""
    corners = [(t, v) for t in range(tri.num_tetrahedra) for v in range(4)]
    uf = UnionFind(corners)
    for t in range(tri.num_tetrahedra):
        for f in range(4):
            gluing = tri.gluings[t][f]
            for v in range(4):
                if v != f:
                    uf.union((t, v), (gluing.tet, gluing.perm[v]))
    groups = sorted(sorted(group) for group in uf.to_sets())
    return tuple(VertexClass(index=i, corners=tuple(group)) for i, group in enumerate(groups))


@lru_cache(maxsize=64)
def corner_class(tri: Triangulation) -> Dict[Tuple[int, int], int]:
    """(tet, vertex) -> vertex class index."""
    return {corner: vc.index for vc in vertex_classes(tri) for corner in vc.corners}


class WalkStep(NamedTuple):
    """Position in an around-edge walk: edge a->b of tet, crossing next through face d."""
    tet: int
    a: int
    b: int
    c: int
    d: int


def _walk_around_edge(tri: Triangulation, tet: int, edge: int) -> List[WalkStep]:
    a, b = EDGE_VERTICES[edge]
    c, d = (v for v in range(4) if v not in (a, b))
    start = WalkStep(tet, a, b, c, d)
    current = start
    steps: List[WalkStep] = []
    seen = set()
    for _ in range(6 * tri.num_tetrahedra):
        key = (current.tet, EDGE_INDEX[(current.a, current.b)])
        if key in seen:
            raise TriangulationError(
                f"traversal around edge {edge} of tetrahedron {tet} revisits "
                f"edge {key[1]} of tetrahedron {key[0]} before closing."
            )
        seen.add(key)
        steps.append(current)
        gluing = tri.gluings[current.tet][current.d]
        p = gluing.perm
        current = WalkStep(gluing.tet, p[current.a], p[current.b], p[current.d], p[current.c])
        if current[:3] == start[:3]:
            if current != start:
                raise TriangulationError(
                    f"traversal around edge {edge} of tetrahedron {tet} closes with reversed rotation."
                )
            return steps
    raise TriangulationError(f"traversal around edge {edge} of tetrahedron {tet} fails to close.")


def edge_walk(tri: Triangulation, e: "EdgeClass") -> List[WalkStep]:
    """The around-edge walk of e, one step per arrow, in the order of e.arrows."""
    first = e.arrows[0]
    return _walk_around_edge(tri, first.tet, first.edge)


@lru_cache(maxsize=64)
def edge_classes(tri: Triangulation) -> Tuple[EdgeClass, ...]:
    """
    Edge classes with their cyclic around-edge traversal.

    Membership comes from union-find over the 6n tetrahedron edges; each class is
    then walked face by face to record the cyclic order. Classes are sorted by
    their smallest (tet, edge) member, and that member fixes the class orientation.
    """
    tet_edges = [(t, e) for t in range(tri.num_tetrahedra) for e in range(6)]
    uf = UnionFind(tet_edges)
    for t in range(tri.num_tetrahedra):
        for f in range(4):
            gluing = tri.gluings[t][f]
            face_vertices = [v for v in range(4) if v != f]
            for i in range(3):
                for j in range(i + 1, 3):
                    a, b = face_vertices[i], face_vertices[j]
                    uf.union((t, EDGE_INDEX[(a, b)]), (gluing.tet, EDGE_INDEX[(gluing.perm[a], gluing.perm[b])]))

    classes_of_corners = corner_class(tri)
    groups = sorted(sorted(group) for group in uf.to_sets())
    result = []
    for index, group in enumerate(groups):
        tet, edge = group[0]
        arrows = [
            Arrow(step.tet, EDGE_INDEX[(step.a, step.b)], 1 if step.a < step.b else -1)
            for step in _walk_around_edge(tri, tet, edge)
        ]
        if {(arrow.tet, arrow.edge) for arrow in arrows} != set(group):
            raise TriangulationError(
                f"traversal around edge {edge} of tetrahedron {tet} does not cover its identification class."
            )
        a, b = EDGE_VERTICES[edge]
        endpoints = (classes_of_corners[(tet, a)], classes_of_corners[(tet, b)])
        result.append(EdgeClass(index=index, arrows=tuple(arrows), endpoints=endpoints))

    total = sum(ec.degree for ec in result)
    if total != 6 * tri.num_tetrahedra:
        raise TriangulationError(f"edge degrees sum to {total}, expected {6 * tri.num_tetrahedra}.")
    logger.debug(f"Found {len(result)} edge classes with degrees {[ec.degree for ec in result]}")
    return tuple(result)


@lru_cache(maxsize=64)
def edge_lookup(tri: Triangulation) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """(tet, edge index) -> (edge class index, direction relative to the class)."""
    return {
        (arrow.tet, arrow.edge): (ec.index, arrow.direction)
        for ec in edge_classes(tri)
        for arrow in ec.arrows
    }


@lru_cache(maxsize=64)
def face_classes(tri: Triangulation) -> Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]:
    """Glued face pairs, each written smaller side first, in sorted order."""
    pairs = set()
    for t in range(tri.num_tetrahedra):
        for f in range(4):
            other = tri.partner(t, f)
            pairs.add(tuple(sorted([(t, f), other])))
    return tuple(sorted(pairs))


def quad_incidence(tri: Triangulation, q: NormalQuad, e: EdgeClass) -> int:
    """i(q, e): how many of the two tetrahedron edges facing q lie in the class e."""
    members = e.members
    return sum(1 for edge in QUAD_EDGES[q.slot] if (q.tet, edge) in members)


def euler_characteristic(tri: Triangulation) -> int:
    return (
        len(vertex_classes(tri))
        - len(edge_classes(tri))
        + len(face_classes(tri))
        - tri.num_tetrahedra
    )
