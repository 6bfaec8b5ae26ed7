#!/usr/bin/env python3
"""Run the builtin scenario registry and print the four-case table.

Usage:
    python scripts/run_scenarios.py [--plot DIR] [--json-out FILE]

The exit code mirrors the CLI contract: 1 if any scenario FAILs, 2 if any
is INCONCLUSIVE, 0 otherwise.
"""

import argparse
import sys
import time
from pathlib import Path

from lnegerm import RunConfig, run_all
from lnegerm.cli import _scenario_svg
from lnegerm.report import canonical_json, scenario_table_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plot", metavar="DIR", help="write SVG overlays for 2D cases")
    ap.add_argument("--json-out", metavar="FILE", help="dump full reports as JSON")
    ap.add_argument("--density", type=int, default=32)
    ap.add_argument("--levels", type=int, default=7)
    args = ap.parse_args()

    config = RunConfig(density=args.density, levels=args.levels)
    t0 = time.time()
    results = run_all(config)
    elapsed = time.time() - t0

    sys.stdout.write(scenario_table_csv(results))
    print(f"# {len(results)} scenarios in {elapsed:.1f}s", file=sys.stderr)
    for r in results:
        for c in r.checks:
            mark = {True: "ok", False: "FAIL", None: "??"}[c.passed]
            print(f"#   {r.scenario.label:14s} {c.name:22s} {mark:4s} {c.detail}",
                  file=sys.stderr)

    if args.json_out:
        Path(args.json_out).write_text(
            canonical_json([r.to_dict() for r in results])
        )
    if args.plot:
        out = Path(args.plot)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            if r.scenario.ambient_dim == 2:
                (out / f"{r.scenario.label}.svg").write_text(
                    _scenario_svg(r, config)
                )

    if any(r.status == "FAIL" for r in results):
        return 1
    if any(r.status == "INCONCLUSIVE" for r in results):
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
