"""
Launcher for the hypgluing command-line tool.

Usage:
  python hypgluing.py info fixtures/figure_eight.json
  python hypgluing.py spin fixtures/lens_5_1.json fixtures/lens_5_1_rep.json --seed 7 --count 20

Notes:
- Loads environment variables from .env if present (see README for the HYPGLUING_* settings).
- Exit code 0 on success, 2 on a failed mathematical check, 1 on I/O or parse errors.
"""
from __future__ import annotations

import sys


def main() -> int:
    try:
        from src.cli import main as cli_main
    except ImportError as e:
        print(f"[ERROR] Could not import hypgluing: {e}", file=sys.stderr)
        print("        Install dependencies first: pip install -r requirements.txt", file=sys.stderr)
        return 1
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
