#!/usr/bin/env python3
"""Displacement of boundary-fixing maps across tree depths.

For each depth, applies radius-r ball permutations (sibling swaps at a
fixed level) to the binary tree and reports the sup displacement next to
the constants it may depend on (delta, starlikeness K, uniform
perfectness C, and the fitted rough-QI constants).  The point of the
table: displacement stays flat as the space grows.
"""

import argparse
import sys


from gromovlab.boundary import uniformly_perfect_constant, visual_metric
from gromovlab.hyperbolicity import delta_four_point
from gromovlab.maps_harness import VertexMap, teichmuller_displacement
from gromovlab.quasihyperbolize import roughly_starlike_boundary
from gromovlab.zoo import ZooSpec, generate


def sibling_swap(space, level: int) -> VertexMap:
    perm = {v: v for v in space.vertex_ids}
    for c in [v for v in space.vertex_ids if len(v) == level + 1]:
        perm[c + "0"], perm[c + "1"] = c + "1", c + "0"
    return VertexMap(space, space, perm, {r: r for r in space.rays}, fixes_boundary=True)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depths", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--level", type=int, default=2, help="depth of the swap centers")
    args = ap.parse_args(argv)

    print("depth  vertices  displacement  lam    mu    delta  K      C_perfect")
    for depth in args.depths:
        t = generate(ZooSpec("tree", branching=2, depth=depth))
        delta = delta_four_point(t).delta
        xi = t.rays["ray-" + "v" + "0" * depth]
        K = roughly_starlike_boundary(t, xi, t.rays.values())
        rays = list(t.rays.values())[:32]
        _, chain = visual_metric(t, rays, "v", 0.5, delta=delta)
        C = uniformly_perfect_constant(chain)
        rep = teichmuller_displacement(sibling_swap(t, args.level))
        print(
            f"{depth:<6d} {t.n:<9d} {rep.displacement:<13.4g} "
            f"{rep.qi.lam:<6.3g} {rep.qi.mu:<5.3g} {delta:<6.3g} {K:<6.3g} {C:.4g}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
