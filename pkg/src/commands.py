"""
Command wrappers for the CLI.
These wrappers take dict parameters parsed from the command line, load the input
files and call into the library modules.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from . import formats
from .config import get_settings
from .fundamental_group import (
    abelianization,
    check_representation,
    presentation,
    word_to_string,
)
from .gluing import ShapeAssignment, build_system, newton_refine, residuals, solution_volume
from .holonomy import conjugacy_check, holonomy_representation
from .spinning import choose_fundamental_domain, spin_family
from .triangulation import (
    Triangulation,
    edge_classes,
    euler_characteristic,
    face_classes,
    parse_triangulation,
    vertex_classes,
)

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    payload: Dict[str, Any]
    lines: List[str] = field(default_factory=list)
    passed: bool = True


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_triangulation(path: str) -> Triangulation:
    return parse_triangulation(_read(path))


def _load_shapes(path: str) -> ShapeAssignment:
    return ShapeAssignment.from_tetrahedra(formats.parse_solution(_read(path)))


def _plural(count: int, word: str, plural: str) -> str:
    return f"{count} {word if count == 1 else plural}"


def wrap_info(params: Dict[str, Any]) -> CommandResult:
    """Counts and validity verdicts for a triangulation."""
    tri = _load_triangulation(params["triangulation"])
    edges = edge_classes(tri)
    vertices = vertex_classes(tri)
    degrees = [ec.degree for ec in edges]
    payload = {
        "num_tetrahedra": tri.num_tetrahedra,
        "num_edges": len(edges),
        "edge_degrees": degrees,
        "num_vertices": len(vertices),
        "num_faces": len(face_classes(tri)),
        "euler_characteristic": euler_characteristic(tri),
        "oriented": True,
        "closed": True,
    }
    lines = [
        f"{_plural(tri.num_tetrahedra, 'tetrahedron', 'tetrahedra')}, "
        f"{_plural(len(edges), 'edge', 'edges')} (deg {','.join(map(str, degrees))}), "
        f"{_plural(len(vertices), 'vertex', 'vertices')}, closed: no boundary faces unglued",
        "oriented: every face gluing is an odd permutation",
        f"euler characteristic: {payload['euler_characteristic']}",
    ]
    return CommandResult(payload=payload, lines=lines)


def wrap_presentation(params: Dict[str, Any]) -> CommandResult:
    """Generators with the arrows they label, relators and abelianization."""
    tri = _load_triangulation(params["triangulation"])
    pres = presentation(tri)
    classes = edge_classes(tri)
    free_rank, torsion = abelianization(pres)

    generators = []
    lines = []
    for label, class_index in zip(pres.generators, pres.generator_edges):
        arrows = [[a.tet, a.edge, a.direction] for a in classes[class_index].arrows]
        generators.append({"label": label, "edge_class": class_index, "arrows": arrows})
        arrow_text = " ".join(f"({a.tet},{a.edge}){'+' if a.direction == 1 else '-'}" for a in classes[class_index].arrows)
        lines.append(f"{label}: edge class {class_index}: {arrow_text}")
    relators = []
    for relator, (t, f) in zip(pres.relators, pres.relator_faces):
        relators.append({"face": [t, f], "word": word_to_string(relator)})
        lines.append(f"face {f} of tetrahedron {t}: {word_to_string(relator)}")
    lines.append(f"abelianization: Z^{free_rank}" + "".join(f" + Z/{d}" for d in torsion))

    payload = {
        "generators": generators,
        "relators": relators,
        "tree_edges": sorted(pres.tree_edges),
        "abelianization": {"free_rank": free_rank, "torsion": list(torsion)},
    }
    return CommandResult(payload=payload, lines=lines)


def wrap_check_rep(params: Dict[str, Any]) -> CommandResult:
    """Relator check and nontriviality of loop edges for a representation."""
    tri = _load_triangulation(params["triangulation"])
    rep = formats.parse_representation(_read(params["representation"]))
    tol = params.get("tol") or get_settings().relator_tol
    pres = presentation(tri)
    report = check_representation(tri, pres, rep, tol)

    label_of = dict(zip(pres.generator_edges, pres.generators))
    lines = []
    for i in report.failing_relators:
        lines.append(f"relator {i} fails: deviation {formats.format_real(report.relator_deviations[i])}")
    for e in report.failing_loops:
        lines.append(f"loop edge {e} ({label_of.get(e, 'tree')}) is sent to the identity")
    lines.append("representation passes" if report.passed else "representation fails")
    payload = {
        "passed": report.passed,
        "relator_deviations": [formats.round15(x) for x in report.relator_deviations],
        "loop_distances": {str(e): formats.round15(d) for e, d in report.loop_distances.items()},
        "failing_relators": report.failing_relators,
        "failing_loops": report.failing_loops,
    }
    return CommandResult(payload=payload, lines=lines, passed=report.passed)


def wrap_spin(params: Dict[str, Any]) -> CommandResult:
    """Spun solutions for seeds seed, seed+1, ..., seed+count-1."""
    tri = _load_triangulation(params["triangulation"])
    rep = formats.parse_representation(_read(params["representation"]))
    pres = presentation(tri)
    report = check_representation(tri, pres, rep, params.get("tol") or get_settings().relator_tol)
    if not report.passed:
        lines = [f"loop edge {e} is sent to the identity" for e in report.failing_loops]
        lines += [f"relator {i} fails" for i in report.failing_relators]
        return CommandResult(payload={"passed": False}, lines=lines, passed=False)

    seed = params.get("seed", 0)
    seeds = [seed + i for i in range(params.get("count", 1))]
    dom = choose_fundamental_domain(tri)
    spun = spin_family(tri, rep, seeds, pres=pres, dom=dom)

    solutions = []
    out_dir = params.get("out_dir")
    for result in spun:
        solution = formats.solution_to_json(result.shapes.tetrahedron_shapes)
        sidecar = formats.sidecar_to_json(result.seed, result.placement.base_points, result.volume)
        solutions.append({"solution": solution, "sidecar": sidecar})
        if out_dir:
            directory = Path(out_dir)
            directory.mkdir(parents=True, exist_ok=True)
            (directory / f"spin_{result.seed}.json").write_text(formats.dumps(solution) + "\n", encoding="utf-8")
            (directory / f"spin_{result.seed}.sidecar.json").write_text(formats.dumps(sidecar) + "\n", encoding="utf-8")
    payload = {"solutions": solutions}
    return CommandResult(payload=payload, lines=[formats.dumps(payload)])


def wrap_verify(params: Dict[str, Any]) -> CommandResult:
    """Gluing residuals of a solution against a tolerance."""
    tri = _load_triangulation(params["triangulation"])
    shapes = _load_shapes(params["solution"])
    tol = params.get("tol") or get_settings().residual_tol
    result = residuals(build_system(tri), shapes)
    passed = result.max_edge <= tol
    payload = {
        "passed": passed,
        "max_residual": formats.round15(result.max_edge),
        "residuals": [formats.round15(abs(r)) for r in result.edges],
    }
    lines = [
        f"edge {i}: residual {formats.format_complex(r)} (|r| {formats.format_real(abs(r))})"
        for i, r in enumerate(result.edges)
    ]
    lines.append(f"{'pass' if passed else 'FAIL'}: max residual {formats.format_real(result.max_edge)} (tol {tol})")
    return CommandResult(payload=payload, lines=lines, passed=passed)


def wrap_volume(params: Dict[str, Any]) -> CommandResult:
    """Volumes of one or more solutions, with mean and sample standard deviation."""
    tri = _load_triangulation(params["triangulation"])
    volumes = [solution_volume(tri, _load_shapes(path)) for path in params["solutions"]]
    mean = float(np.mean(volumes))
    stdev = float(np.std(volumes, ddof=1)) if len(volumes) > 1 else 0.0
    lines = [f"{path}: {formats.format_real(v)}" for path, v in zip(params["solutions"], volumes)]
    lines.append(f"mean {formats.format_real(mean)} stdev {formats.format_real(stdev)}")
    payload = {
        "volumes": [formats.round15(v) for v in volumes],
        "mean": formats.round15(mean),
        "stdev": formats.round15(stdev),
    }
    return CommandResult(payload=payload, lines=lines)


def wrap_holonomy(params: Dict[str, Any]) -> CommandResult:
    """Associated representation of a solution, as representation JSON."""
    tri = _load_triangulation(params["triangulation"])
    shapes = _load_shapes(params["solution"])
    tol = params.get("tol") or get_settings().holonomy_tol
    rep = holonomy_representation(tri, choose_fundamental_domain(tri), presentation(tri), shapes, tol)
    payload = formats.representation_to_json(rep)
    return CommandResult(payload=payload, lines=[formats.dumps(payload)])


def wrap_compare(params: Dict[str, Any]) -> CommandResult:
    """Trace-battery conjugacy verdict for two representations."""
    tri = _load_triangulation(params["triangulation"])
    rep1 = formats.parse_representation(_read(params["representations"][0]))
    rep2 = formats.parse_representation(_read(params["representations"][1]))
    tol = params.get("tol") or get_settings().holonomy_tol
    report = conjugacy_check(rep1, rep2, presentation(tri), tol, seed=params.get("seed", 0))
    payload = {"verdict": report.verdict, "max_trace_deviation": formats.round15(report.max_trace_deviation)}
    lines = [f"{report.verdict}: max trace deviation {formats.format_real(report.max_trace_deviation)}"]
    return CommandResult(payload=payload, lines=lines, passed=report.passed)


def wrap_solve(params: Dict[str, Any]) -> CommandResult:
    """Newton refinement of a starting solution."""
    tri = _load_triangulation(params["triangulation"])
    start = _load_shapes(params["solution"])
    tol = params.get("tol") or get_settings().residual_tol
    result = newton_refine(build_system(tri), start, tol=tol)
    payload = formats.solution_to_json(result.shapes.tetrahedron_shapes)
    payload["iterations"] = result.iterations
    payload["volume"] = formats.round15(solution_volume(tri, result.shapes))
    return CommandResult(payload=payload, lines=[formats.dumps(payload)])
