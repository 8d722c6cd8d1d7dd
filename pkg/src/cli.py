"""
Command-line front end.

Exit codes: 0 on success, 2 when a mathematical check fails, 1 on I/O or parse errors.
Log records go to stderr; stdout carries only command output.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from . import commands, formats
from .config import get_settings
from .errors import FormatError, HypGluingError, RepresentationError, TriangulationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_FAILED = 2

command_map: Dict[str, Callable[[Dict[str, Any]], commands.CommandResult]] = {
    "info": commands.wrap_info,
    "presentation": commands.wrap_presentation,
    "check-rep": commands.wrap_check_rep,
    "spin": commands.wrap_spin,
    "verify": commands.wrap_verify,
    "volume": commands.wrap_volume,
    "holonomy": commands.wrap_holonomy,
    "compare": commands.wrap_compare,
    "solve": commands.wrap_solve,
}


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {text}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"count must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypgluing",
        description="Gluing equations, spun solutions and holonomy for closed triangulated 3-manifolds",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="Tolerance (default depends on the command)")
    common.add_argument("--format", choices=("json", "text"), default="text", help="Output format (default: text)")
    common.add_argument("--seed", type=_seed, default=0, help="PRNG seed (default: 0)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="Summarize a triangulation")
    p.add_argument("triangulation")

    p = sub.add_parser("presentation", parents=[common], help="Print the edge-path presentation")
    p.add_argument("triangulation")

    p = sub.add_parser("check-rep", parents=[common], help="Check relators and loop edges of a representation")
    p.add_argument("triangulation")
    p.add_argument("representation")

    p = sub.add_parser("spin", parents=[common], help="Spun solutions from a representation")
    p.add_argument("triangulation")
    p.add_argument("representation")
    p.add_argument("--count", type=_count, default=1, help="Number of seeds (default: 1)")
    p.add_argument("--out-dir", default=None, help="Write spin_<seed>.json and its sidecar here")

    p = sub.add_parser("verify", parents=[common], help="Gluing residuals of a solution")
    p.add_argument("triangulation")
    p.add_argument("solution")

    p = sub.add_parser("volume", parents=[common], help="Volumes of solutions")
    p.add_argument("triangulation")
    p.add_argument("solutions", nargs="+")

    p = sub.add_parser("holonomy", parents=[common], help="Associated representation of a solution")
    p.add_argument("triangulation")
    p.add_argument("solution")

    p = sub.add_parser("compare", parents=[common], help="Conjugacy verdict for two representations")
    p.add_argument("triangulation")
    p.add_argument("representations", nargs=2)

    p = sub.add_parser("solve", parents=[common], help="Newton refinement of a starting solution")
    p.add_argument("triangulation")
    p.add_argument("solution")
    return parser


def _configure_logging() -> None:
    level = get_settings().log_level
    logging.basicConfig(
        level=getattr(logging, level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _configure_logging()
    except ValueError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_IO

    params = {key: value for key, value in vars(args).items() if key not in ("command", "format")}
    logger.info(f"Running command: {args.command}")
    try:
        result = command_map[args.command](params)
    except (OSError, TriangulationError, FormatError, RepresentationError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_IO
    except HypGluingError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_FAILED

    if args.format == "json":
        print(formats.dumps(result.payload))
    else:
        for line in result.lines:
            print(line)
    if not result.passed:
        print(f"[ERROR] {args.command} failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
