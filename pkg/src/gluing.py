"""
Hyperbolic gluing equations: one equation per edge class, prod_q z_q^i(q,e) = 1,
stored as an integer exponent matrix over the normal quads.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .config import get_settings
from .errors import DegenerateConfigurationError, NewtonConvergenceError, SingularJacobianError
from .geometry import ideal_volume, shape_triple
from .triangulation import EDGE_SLOT, Triangulation, edge_classes, quad_incidence

logger = logging.getLogger(__name__)

DEGENERACY_GUARD = 1e-8
MAX_HALVINGS = 30


@dataclass(frozen=True, eq=False)
class GluingSystem:
    exponents: np.ndarray  # edges x quads, quads ordered (tet 0 slot 0, tet 0 slot 1, ...)

    @property
    def num_tetrahedra(self) -> int:
        return self.exponents.shape[1] // 3

    @property
    def num_edges(self) -> int:
        return self.exponents.shape[0]


@dataclass(frozen=True, eq=False)
class ShapeAssignment:
    """One complex shape per normal quad, in quad order."""
    quad_shapes: np.ndarray

    @classmethod
    def from_tetrahedra(cls, shapes: Sequence[complex]) -> "ShapeAssignment":
        triples = [shape_triple(z) for z in shapes]
        return cls(np.array([w for triple in triples for w in triple], dtype=complex))

    @property
    def num_tetrahedra(self) -> int:
        return len(self.quad_shapes) // 3

    @property
    def tetrahedron_shapes(self) -> np.ndarray:
        """Slot-0 shape of every tetrahedron."""
        return self.quad_shapes[0::3]

    def cyclic_residuals(self) -> np.ndarray:
        z0 = self.quad_shapes[0::3]
        z1 = self.quad_shapes[1::3]
        z2 = self.quad_shapes[2::3]
        return np.maximum(np.abs(z1 - 1 / (1 - z0)), np.abs(z2 - (1 - 1 / z0)))


@dataclass(frozen=True, eq=False)
class Residuals:
    edges: np.ndarray  # prod - 1, per edge class
    cyclic: np.ndarray  # per tetrahedron

    @property
    def max_edge(self) -> float:
        return float(np.max(np.abs(self.edges))) if len(self.edges) else 0.0


@dataclass(frozen=True)
class NewtonResult:
    shapes: ShapeAssignment
    iterations: int
    residual_norms: List[float]


def build_system(tri: Triangulation) -> GluingSystem:
    classes = edge_classes(tri)
    quads = tri.quads()
    exponents = np.array(
        [[quad_incidence(tri, q, e) for q in quads] for e in classes],
        dtype=int,
    )
    return GluingSystem(exponents=exponents)


def _check_nondegenerate(quad_shapes: np.ndarray, guard: float = 1e-12) -> None:
    bad = np.where((np.abs(quad_shapes) < guard) | (np.abs(quad_shapes - 1) < guard))[0]
    if len(bad):
        q = int(bad[0])
        raise DegenerateConfigurationError(
            f"shape of tetrahedron {q // 3} slot {q % 3} is degenerate: {quad_shapes[q]}."
        )


def residuals(sys: GluingSystem, Z: ShapeAssignment) -> Residuals:
    """Per edge prod_q z_q^E[e][q] - 1, summed in log form, plus cyclic-relation residuals."""
    if Z.quad_shapes.shape[0] != sys.exponents.shape[1]:
        raise ValueError(
            f"shape assignment has {Z.quad_shapes.shape[0]} quads, system expects {sys.exponents.shape[1]}."
        )
    _check_nondegenerate(Z.quad_shapes)
    logs = np.log(Z.quad_shapes)
    edges = np.exp(sys.exponents @ logs) - 1
    return Residuals(edges=edges, cyclic=Z.cyclic_residuals())


def _quad_vector(z: np.ndarray) -> np.ndarray:
    out = np.empty(3 * len(z), dtype=complex)
    out[0::3] = z
    out[1::3] = 1 / (1 - z)
    out[2::3] = 1 - 1 / z
    return out


def _edge_products(sys: GluingSystem, z: np.ndarray) -> np.ndarray:
    return np.exp(sys.exponents @ np.log(_quad_vector(z)))


def _jacobian(sys: GluingSystem, z: np.ndarray, products: np.ndarray) -> np.ndarray:
    """d(residual_e) / d(log z_t) with slots 1, 2 eliminated through the cyclic relation."""
    slot_derivatives = np.empty(3 * len(z), dtype=complex)
    slot_derivatives[0::3] = 1
    slot_derivatives[1::3] = z / (1 - z)
    slot_derivatives[2::3] = 1 / (z - 1)
    weighted = sys.exponents * slot_derivatives[np.newaxis, :]
    per_tet = weighted.reshape(sys.num_edges, len(z), 3).sum(axis=2)
    return products[:, np.newaxis] * per_tet


def _is_degenerate(z: np.ndarray) -> bool:
    return bool(np.any(np.abs(z) < DEGENERACY_GUARD) or np.any(np.abs(z - 1) < DEGENERACY_GUARD)
                or not np.all(np.isfinite(z)))


def newton_refine(
    sys: GluingSystem,
    Z0: ShapeAssignment,
    tol: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> NewtonResult:
    """
    Damped Newton iteration in the log-shapes of slot 0.

    Steps come from a least-squares solve, so rank-deficient systems (gluing
    equations always have redundant rows) still get a minimum-norm step. Each step
    is halved up to 30 times until the max residual decreases.

    Raises:
        SingularJacobianError: the Jacobian vanishes while the residual does not.
        NewtonConvergenceError: no decrease after damping, or max_iters exceeded.
    """
    settings = get_settings()
    tol = settings.residual_tol if tol is None else tol
    max_iters = settings.newton_max_iters if max_iters is None else max_iters

    _check_nondegenerate(Z0.quad_shapes)
    z = np.array(Z0.tetrahedron_shapes, dtype=complex)
    products = _edge_products(sys, z)
    norm = float(np.max(np.abs(products - 1))) if sys.num_edges else 0.0
    norms = [norm]
    if norm <= tol:
        return NewtonResult(shapes=Z0, iterations=0, residual_norms=norms)

    for iteration in range(1, max_iters + 1):
        jacobian = _jacobian(sys, z, products)
        singular_values = np.linalg.svd(jacobian, compute_uv=False)
        if singular_values.size == 0 or singular_values[0] < 1e-14:
            raise SingularJacobianError(
                f"Jacobian vanishes at iteration {iteration} with residual {norm:.3e}.",
                singular_values=singular_values,
            )
        delta = np.linalg.lstsq(jacobian, -(products - 1), rcond=None)[0]

        step = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = z * np.exp(step * delta)
            if not _is_degenerate(candidate):
                candidate_products = _edge_products(sys, candidate)
                candidate_norm = float(np.max(np.abs(candidate_products - 1)))
                if candidate_norm < norm:
                    break
            step /= 2
        else:
            best = ShapeAssignment.from_tetrahedra(z)
            raise NewtonConvergenceError(
                f"damped Newton step failed to reduce the residual at iteration {iteration}.",
                best=best,
                residual=norm,
            )

        z, products, norm = candidate, candidate_products, candidate_norm
        norms.append(norm)
        logger.debug(f"Newton iteration {iteration}: residual {norm:.3e}, step {step}")
        if norm <= tol:
            logger.info(f"Newton converged in {iteration} iterations, residual {norm:.3e}")
            return NewtonResult(
                shapes=ShapeAssignment.from_tetrahedra(z),
                iterations=iteration,
                residual_norms=norms,
            )

    raise NewtonConvergenceError(
        f"Newton did not reach {tol} in {max_iters} iterations (residual {norm:.3e}).",
        best=ShapeAssignment.from_tetrahedra(z),
        residual=norm,
    )


def solution_volume(tri: Triangulation, Z: ShapeAssignment) -> float:
    if Z.num_tetrahedra != tri.num_tetrahedra:
        raise ValueError(
            f"shape assignment covers {Z.num_tetrahedra} tetrahedra, triangulation has {tri.num_tetrahedra}."
        )
    return float(sum(ideal_volume(z) for z in Z.tetrahedron_shapes))


def around_edge_products(tri: Triangulation, Z: ShapeAssignment) -> List[complex]:
    """For each edge class, the product of the shapes met walking once around it."""
    result = []
    for ec in edge_classes(tri):
        product = 1 + 0j
        for arrow in ec.arrows:
            product *= Z.quad_shapes[3 * arrow.tet + EDGE_SLOT[arrow.edge]]
        result.append(complex(product))
    return result


def is_flat(Z: ShapeAssignment, tol: float = 1e-10) -> bool:
    """True when every shape is real, i.e. every tetrahedron is flat."""
    return bool(np.all(np.abs(Z.quad_shapes.imag) <= tol))
