"""
Spun solutions of the gluing equations.

Given a representation rho, every corner of the fundamental domain is sent to
rho(word) applied to a random base point of its vertex class. Reading off the
cross-ratios of each tetrahedron's four corner points gives a solution of the
gluing equations.
"""
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from .config import get_settings
from .errors import PlacementError, TriangulationError
from .fundamental_group import (
    Presentation,
    Representation,
    Word,
    evaluate_word,
    free_reduce,
    invert_word,
    presentation,
)
from .geometry import IdealPoint, mobius_apply, normalized_bracket, tetrahedron_shapes
from .gluing import ShapeAssignment, solution_volume
from .triangulation import EDGE_VERTICES, Triangulation, corner_class, edge_lookup

logger = logging.getLogger(__name__)

PLACEMENT_SEPARATION = 1e-8

Corner = Tuple[int, int]


@dataclass(frozen=True)
class FundamentalDomain:
    """Tetrahedra joined through a BFS spanning tree of the dual graph."""
    order: Tuple[int, ...]  # BFS order, root first
    parents: Tuple[Optional[Tuple[int, int, int]], ...]  # per tet: (parent, parent face, own face)
    tree_faces: frozenset  # (tet, face) on either side of a tree gluing
    domain_vertex: Dict[Corner, int]  # corner -> vertex of the domain, corners merged across tree faces


@dataclass(frozen=True)
class VertexPlacement:
    base_points: Tuple[IdealPoint, ...]  # one per vertex class
    corner_points: Dict[Corner, IdealPoint]
    connecting_words: Dict[Corner, Word]
    seed: int
    attempts: int


@dataclass(frozen=True, eq=False)
class SpunSolution:
    seed: int
    placement: VertexPlacement
    shapes: ShapeAssignment
    volume: float


def choose_fundamental_domain(tri: Triangulation) -> FundamentalDomain:
    n = tri.num_tetrahedra
    parents: List[Optional[Tuple[int, int, int]]] = [None] * n
    visited = [False] * n
    visited[0] = True
    order = []
    tree_faces = set()
    queue = deque([0])
    while queue:
        t = queue.popleft()
        order.append(t)
        for f in range(4):
            u, g = tri.partner(t, f)
            if not visited[u]:
                visited[u] = True
                parents[u] = (t, f, g)
                tree_faces.update([(t, f), (u, g)])
                queue.append(u)
    if not all(visited):
        raise TriangulationError("dual graph is disconnected.")

    uf = UnionFind([(t, v) for t in range(n) for v in range(4)])
    for t, f in tree_faces:
        gluing = tri.gluings[t][f]
        for v in range(4):
            if v != f:
                uf.union((t, v), (gluing.tet, gluing.perm[v]))
    groups = sorted(sorted(group) for group in uf.to_sets())
    domain_vertex = {corner: i for i, group in enumerate(groups) for corner in group}
    return FundamentalDomain(
        order=tuple(order),
        parents=tuple(parents),
        tree_faces=frozenset(tree_faces),
        domain_vertex=domain_vertex,
    )


def connecting_words(tri: Triangulation, dom: FundamentalDomain, pres: Presentation) -> Dict[Corner, Word]:
    """
    For every corner, the word gamma with lift(corner) = gamma . base lift of its class.

    Found by BFS over the edges of the fundamental domain from corner (0, 0):
    walking an edge from tail to head appends the edge word.
    """
    lookup = edge_lookup(tri)
    neighbours: Dict[int, List[Tuple[int, Word]]] = {}
    for t in range(tri.num_tetrahedra):
        for edge, (a, b) in enumerate(EDGE_VERTICES):
            class_index, direction = lookup[(t, edge)]
            tail, head = (a, b) if direction == 1 else (b, a)
            x, y = dom.domain_vertex[(t, tail)], dom.domain_vertex[(t, head)]
            word = pres.edge_word[class_index]
            neighbours.setdefault(x, []).append((y, word))
            neighbours.setdefault(y, []).append((x, invert_word(word)))

    root = dom.domain_vertex[(0, 0)]
    words: Dict[int, Word] = {root: ()}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y, word in neighbours.get(x, []):
            if y not in words:
                words[y] = free_reduce(words[x] + word)
                queue.append(y)
    return {corner: words[vertex] for corner, vertex in dom.domain_vertex.items()}


def corner_connection_graph(tri: Triangulation, dom: FundamentalDomain, pres: Presentation) -> nx.MultiGraph:
    """
    Corners joined once per face gluing. The label of the edge (t, v) -- (t', v')
    is the word gamma with lift(t, v) = gamma . lift(t', v'), where (t, v) is stored
    as the edge attribute "tail"; labels are empty across tree faces.
    """
    words = connecting_words(tri, dom, pres)
    graph = nx.MultiGraph()
    graph.add_nodes_from(sorted(words))
    for t in range(tri.num_tetrahedra):
        for f in range(4):
            u, g = tri.partner(t, f)
            if (u, g) < (t, f):
                continue
            perm = tri.gluings[t][f].perm
            for v in range(4):
                if v == f:
                    continue
                other = (u, perm[v])
                label = free_reduce(words[(t, v)] + invert_word(words[other]))
                graph.add_edge(
                    (t, v), other, label=label, tail=(t, v), face=(t, f), tree=(t, f) in dom.tree_faces
                )
    return graph


def random_ideal_point(rng: np.random.Generator) -> IdealPoint:
    """Uniform point of the unit sphere, stereographically projected from the north pole."""
    while True:
        v = rng.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            break
    x, y, z = v / norm
    return IdealPoint(complex(x, y), 1 - z)


def placement_generator(seed: int, attempt: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, attempt])))


def sample_placement(
    tri: Triangulation,
    dom: FundamentalDomain,
    pres: Presentation,
    rep: Representation,
    seed: int,
    max_attempts: Optional[int] = None,
) -> VertexPlacement:
    """
    Draws base points until every tetrahedron gets four distinct corner points.

    Attempt k uses the generator seeded by (seed, k), so a placement is fully
    determined by the seed.

    Raises:
        PlacementError: all attempts produced a degenerate tetrahedron.
    """
    if max_attempts is None:
        max_attempts = get_settings().max_placement_attempts
    words = connecting_words(tri, dom, pres)
    classes = corner_class(tri)
    num_classes = max(classes.values()) + 1
    matrices = {corner: evaluate_word(rep, word) for corner, word in words.items()}

    for attempt in range(max_attempts):
        rng = placement_generator(seed, attempt)
        base_points = tuple(random_ideal_point(rng) for _ in range(num_classes))
        corner_points = {
            corner: mobius_apply(matrices[corner], base_points[classes[corner]]).normalized()
            for corner in sorted(words)
        }
        bad = _first_degenerate_tetrahedron(tri, corner_points)
        if bad is None:
            logger.debug(f"Placement for seed {seed} accepted after {attempt + 1} attempts")
            return VertexPlacement(
                base_points=base_points,
                corner_points=corner_points,
                connecting_words=words,
                seed=seed,
                attempts=attempt + 1,
            )
        if attempt >= 8:
            logger.warning(f"Seed {seed}: attempt {attempt + 1} degenerate at tetrahedron {bad}")
        else:
            logger.debug(f"Seed {seed}: attempt {attempt + 1} degenerate at tetrahedron {bad}")
    raise PlacementError(
        f"no nondegenerate placement for seed {seed} in {max_attempts} attempts; "
        "some loop edge is probably sent to the identity."
    )


def _first_degenerate_tetrahedron(tri: Triangulation, corner_points: Dict[Corner, IdealPoint]) -> Optional[int]:
    for t in range(tri.num_tetrahedra):
        points = [corner_points[(t, v)] for v in range(4)]
        for i in range(4):
            for j in range(i + 1, 4):
                if normalized_bracket(points[i], points[j]) < PLACEMENT_SEPARATION:
                    return t
    return None


def spin(tri: Triangulation, dom: FundamentalDomain, placement: VertexPlacement) -> ShapeAssignment:
    """Shapes read off as cross-ratios of each tetrahedron's corner points."""
    values = []
    for t in range(tri.num_tetrahedra):
        values.extend(tetrahedron_shapes([placement.corner_points[(t, v)] for v in range(4)]))
    return ShapeAssignment(np.array(values, dtype=complex))


def spin_family(
    tri: Triangulation,
    rep: Representation,
    seeds: Sequence[int],
    pres: Optional[Presentation] = None,
    dom: Optional[FundamentalDomain] = None,
    max_workers: Optional[int] = None,
) -> List[SpunSolution]:
    """One spun solution per seed, returned in seed order."""
    pres = presentation(tri) if pres is None else pres
    dom = choose_fundamental_domain(tri) if dom is None else dom

    def run(seed: int) -> SpunSolution:
        placement = sample_placement(tri, dom, pres, rep, seed)
        shapes = spin(tri, dom, placement)
        return SpunSolution(seed=seed, placement=placement, shapes=shapes, volume=solution_volume(tri, shapes))

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        results = list(executor.map(run, seeds))
    logger.info(f"Spun {len(results)} solutions")
    return results
