#!/usr/bin/env python3
"""Track the horn germ's medial center curves and watch x/y^2 -> +-5/8.

Extracts the 3D medial axis of the horn scenario on a grid, tracks it into
branch curves, and continues the two off-plane center curves toward 0,
printing the ratio x/y^2 per radius together with the fitted pairwise
orders.  The asymptotic ratio follows from the equidistance between the
near horn (center abscissa (5/8) y^2, tube radius (3/8) y^2) and the wall
strip of half-width y^2/4.
"""

import argparse
import sys
import time

import numpy as np

from lnegerm import builtin, germ_set, pair_verdict
from lnegerm.medial import extract_medial_axis_grid, medial_branch_germs
from lnegerm.scenarios import _off_axis_ribbon


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-res", type=float, default=0.01)
    ap.add_argument("--density", type=int, default=48)
    args = ap.parse_args()

    scn = builtin("horn3d")
    germ = scn.germ()
    t0 = time.time()
    axis = extract_medial_axis_grid(germ, scn.medial_window, args.grid_res)
    print(f"# extracted {len(axis.points)} axis points in {time.time()-t0:.1f}s")

    curves = medial_branch_germs(
        axis, scn.medial_scales, set_=germ, density=args.density
    )
    for c in curves:
        print(f"# tracked {c.label}: anchors [{c.min_anchor_radius:.4f}, "
              f"{c.max_radius:.4f}], flags {c.flags}")
    ribbons = [c for c in curves if _off_axis_ribbon(c)]
    if len(ribbons) != 2:
        print(f"expected 2 center curves, found {len(ribbons)}", file=sys.stderr)
        return 1

    print("radius, x/y^2 per center curve (limit +-5/8 = +-0.625):")
    for k in range(3, 11):
        r = 2.0**-k
        row = [f"{r:.6f}"]
        for c in ribbons:
            p = c.point_at_radius(r)
            row.append(f"{p[0] / p[1] ** 2:+.5f}")
        print("  " + "  ".join(row))

    medial = germ_set(branches=ribbons, label="horn_center_curves")
    rep = pair_verdict(
        medial, ribbons[0], ribbons[1], scn.medial_scales, density=args.density
    )
    print(f"center pair: outer order {rep.tord.slope:.4f} "
          f"(residual {rep.tord.residual:.4f}), inner order "
          f"{rep.tord_inn.slope:.4f} -> {rep.verdict.value}, "
          f"L = {rep.lojasiewicz_pair:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
