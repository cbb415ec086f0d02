#!/usr/bin/env python3
"""Run the full verification suite over the zoo and emit a merged report.

Generates the canonical test spaces, runs every asserted check on each
(hyperbolicity, deformation checks, starlikeness, round trip), and
writes one JSON report per space plus a merged plot-ready CSV.  Exit
code 0 iff every asserted check passes.  Re-runs with the same seed are
byte-identical.
"""

import argparse
import math
import sys
import warnings
from pathlib import Path

from gromovlab.busemann import busemann, default_epsilon
from gromovlab.hyperbolicity import delta_four_point
from gromovlab.quasihyperbolize import (
    quasihyperbolic,
    roughly_starlike_boundary,
    roughly_starlike_point,
    roundtrip_qi_check,
    starlike_equivalence_check,
)
from gromovlab.report import CheckResult, all_passed, rows_of, write_csv, write_json
from gromovlab.uniformize import (
    boundary_convergence_check,
    deform,
    density_boundary_check,
    gehring_hayman_check,
    harnack_check,
    product_formula_constant,
    uniformity_constants,
)
from gromovlab.zoo import ZooSpec, generate

SPACES = [
    ("tree-2-6", ZooSpec("tree", branching=2, depth=6), "ray-v000000", "v"),
    ("tree-3-4", ZooSpec("tree", branching=3, depth=4), "ray-v0000", "v"),
    ("free-group-3", ZooSpec("free_group", depth=3), "ray-a", "e"),
    ("halfplane-hyp-5-6", ZooSpec("halfplane_grid", width=5, depth=6), "ray-up", "g005_000"),
]

QH_SPACES = [
    (
        "halfplane-euclid-5-6",
        ZooSpec("halfplane_grid", width=5, depth=6, metric="euclidean"),
    ),
]


def deformation_rows(name, space, ray_id, seed):
    delta = delta_four_point(space, seed=seed).delta
    field = busemann(space, space.rays[ray_id], delta=delta)
    eps = default_epsilon(delta + field.error)
    ds = deform(space, field, eps, delta=delta)
    K = roughly_starlike_boundary(space, field.ray, space.rays.values())
    results = [
        harnack_check(ds, delta),
        gehring_hayman_check(ds, delta, seed=seed),
        *uniformity_constants(ds, delta, seed=seed).rows(),
        *density_boundary_check(ds, delta, K),
        *boundary_convergence_check(ds),
        CheckResult(
            "metric_formula_constant", math.inf, product_formula_constant(ds), 0.0, True
        ),
        *roundtrip_qi_check(space, field, eps, delta=delta).rows(),
    ]
    return rows_of(results, name, space.n), {"delta": delta, "epsilon": eps, "K": K}


def starlike_rows(name, base_space, seed):
    qh = quasihyperbolic(base_space, warn_mesh=False)
    delta = delta_four_point(qh.space, seed=seed).delta
    eps = default_epsilon(delta)
    mid = qh.space.vertex_ids[len(qh.space.vertex_ids) // 2]
    rep = starlike_equivalence_check(qh.space, mid, qh.space.rays["ray-up"], eps, delta=delta)
    extra = CheckResult(
        "starlike_point_interior",
        math.inf,
        roughly_starlike_point(qh.space, mid, qh.space.rays.values()),
        0.0,
        True,
    )
    return rows_of([*rep.rows(), extra], name, qh.space.n), {"delta": delta}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    warnings.filterwarnings("ignore", message="max edge length")
    all_rows = []
    for name, spec, ray_id, _base in SPACES:
        rows, info = deformation_rows(name, generate(spec), ray_id, args.seed)
        write_json(rows, str(out / f"{name}.json"))
        all_rows.extend(rows)
        bad = sum(not r["pass"] for r in rows)
        print(f"{name}: {len(rows)} checks, {bad} failing, "
              f"delta={info['delta']:.4g}, eps={info['epsilon']:.4g}, K={info['K']:.4g}")
    for name, spec in QH_SPACES:
        rows, info = starlike_rows(name, generate(spec), args.seed)
        write_json(rows, str(out / f"{name}.json"))
        all_rows.extend(rows)
        bad = sum(not r["pass"] for r in rows)
        print(f"{name}: {len(rows)} checks, {bad} failing, delta={info['delta']:.4g}")

    write_csv(all_rows, str(out / "suite.csv"))
    write_json(all_rows, str(out / "suite.json"))
    ok = all_passed(all_rows)
    print(f"total: {len(all_rows)} checks, all pass: {ok}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
