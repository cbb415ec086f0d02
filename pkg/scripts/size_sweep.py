#!/usr/bin/env python3
"""Trend sweep for checks whose theoretical constants are implicit.

Measures, across space sizes, the two-sided constant between d_eps and
the Busemann-product formula, the round-trip quasi-isometry constants,
the quasihyperbolicity of deformed half-plane grids, and the radial
distance/product differences.  Stable columns are the evidence that the
implicit constants depend on the hyperbolicity data only.
"""

import argparse
import sys

import numpy as np

from gromovlab.busemann import busemann, default_epsilon
from gromovlab.hyperbolicity import delta_four_point
from gromovlab.quasihyperbolize import (
    quasihyperbolic,
    radial_product_check,
    roundtrip_qi_check,
)
from gromovlab.uniformize import deform, product_formula_constant
from gromovlab.zoo import ZooSpec, generate


def tree_rows(depths):
    print("trees: depth  vertices  formula_C  rt_upper  rt_lower")
    for depth in depths:
        t = generate(ZooSpec("tree", branching=2, depth=depth))
        field = busemann(t, t.rays["ray-" + "v" + "0" * depth])
        eps = default_epsilon(0.0)
        ds = deform(t, field, 0.2)
        rt = roundtrip_qi_check(t, field, 0.2)
        print(
            f"       {depth:<6d} {t.n:<9d} {product_formula_constant(ds):<10.4g} "
            f"{rt.upper_ratio:<9.4g} {rt.lower_constant:.4g}"
        )


def grid_rows(sizes):
    print("qh grids: size  interior  delta  radial_max")
    for width, depth in sizes:
        g = generate(ZooSpec("halfplane_grid", width=width, depth=depth, metric="euclidean"))
        qh = quasihyperbolic(g, warn_mesh=False)
        delta = delta_four_point(qh.space, budget=1 << 40).delta
        up = qh.space.rays["ray-up"]
        rng = np.random.default_rng(0)
        ids = [v for v in qh.space.vertex_ids if qh.base.dist(up.base, v) <= depth - 1]
        sample = [ids[int(i)] for i in rng.integers(0, len(ids), 10)]
        rad = radial_product_check(qh, up.base, up, sample, delta=delta)
        print(
            f"          {width}x{depth:<4d} {qh.space.n:<9d} {delta:<6.3g} {rad.max_diff:.4g}"
        )


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depths", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--grids", type=str, nargs="+", default=["6x4", "9x6", "12x8"])
    args = ap.parse_args(argv)
    tree_rows(args.depths)
    grid_rows([tuple(int(t) for t in s.split("x")) for s in args.grids])
    return 0


if __name__ == "__main__":
    sys.exit(main())
