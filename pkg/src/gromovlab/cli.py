"""Command-line interface.

Verbs: ``zoo generate``, ``analyze``, ``busemann``, ``uniformize``,
``quasihyperbolize``, ``verify``, ``map check``, ``report``.  Commands
that run asserted checks exit nonzero when any check fails; reports are
emitted as JSON rows and plot-ready CSV.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import report as report_mod
from .boundary import boundary_sample
from .busemann import busemann, default_epsilon
from .hyperbolicity import delta_four_point, rips_thinness
from .maps_harness import (
    VertexMap,
    cross_difference_control,
    quasisimilarity_check,
    quasisymmetry_eta,
    rough_qi_constants,
    teichmuller_displacement,
)
from .metric_core import load_space, save_space, space_to_dict
from .quasihyperbolize import (
    quasihyperbolic,
    roughly_starlike_boundary,
    roundtrip_qi_check,
    starlike_equivalence_check,
)
from .uniformize import (
    boundary_convergence_check,
    deform,
    deformed_to_dict,
    density_boundary_check,
    gehring_hayman_check,
    harnack_check,
    load_deformed,
    product_formula_constant,
    uniformity_constants,
)
from .zoo import FAMILIES, ZooSpec, generate


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True, default=float)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _measure_delta(space, args) -> float:
    if getattr(args, "delta", None) is not None:
        return args.delta
    rep = delta_four_point(space, seed=getattr(args, "seed", 0))
    return rep.delta


def _first_ray(space, rid: str | None):
    if rid is not None:
        if rid not in space.rays:
            raise SystemExit(f"unknown ray {rid!r}; marked rays: {sorted(space.rays)}")
        return space.rays[rid]
    if not space.rays:
        raise SystemExit("space has no marked rays")
    return next(iter(space.rays.values()))


def cmd_zoo_generate(args) -> int:
    spec = ZooSpec(
        family=args.family,
        branching=args.branching,
        depth=args.depth,
        width=args.width,
        mesh=args.mesh,
        metric=args.metric,
        n=args.n,
        seed=args.seed,
    )
    space = generate(spec)
    if args.out:
        save_space(space, args.out)
    else:
        print(json.dumps(space_to_dict(space), indent=1, sort_keys=True))
    return 0


def cmd_analyze_hyperbolicity(args) -> int:
    space = load_space(args.space)
    rep = delta_four_point(
        space,
        budget=args.budget,
        samples=args.sample or 200_000,
        seed=args.seed,
        exhaustive=False if args.sample else None,
    )
    out = {
        "delta_four_point": rep.delta,
        "witness": list(rep.witness),
        "exhaustive": rep.exhaustive,
        "lower_bound": rep.lower_bound,
        "quadruples": rep.quadruples,
    }
    if args.rips:
        rr = rips_thinness(space, delta=rep.delta, seed=args.seed)
        rep.rips_delta = rr.thinness
        rep.tripod_4delta_ok = rr.tripod_4delta_ok
        out["rips_thinness"] = rr.thinness
        out["tripod_4delta_ok"] = rr.tripod_4delta_ok
    _dump(out, args.out)
    return 0


def cmd_analyze_boundary(args) -> int:
    space = load_space(args.space)
    delta = _measure_delta(space, args)
    sample = boundary_sample(space, args.base, args.epsilon, delta=delta)
    out = {
        "base": args.base,
        "epsilon": args.epsilon,
        "delta": delta,
        "rays": [m.id for m in sample.markers],
        "visual_diameter": sample.visual_diameter,
        "intervals": {
            f"{a}|{b}": [iv.lo, iv.hi] for (a, b), iv in sample.intervals.items()
        },
        "rho": sample.rho.tolist(),
        "chain_metric": sample.chain.tolist(),
    }
    _dump(out, args.out)
    return 0


def cmd_busemann(args) -> int:
    space = load_space(args.space)
    ray = _first_ray(space, args.ray)
    delta = _measure_delta(space, args)
    fld = busemann(space, ray, args.base, delta=delta)
    rows = [
        {"vertex": v, "b": float(fld.b[i]), "error": fld.error}
        for i, v in enumerate(space.vertex_ids)
    ]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["vertex", "b", "error"])
            writer.writeheader()
            writer.writerows(rows)
    else:
        for r in rows:
            print(f"{r['vertex']},{r['b']!r},{r['error']!r}")
    return 0


def cmd_uniformize(args) -> int:
    space = load_space(args.space)
    ray = _first_ray(space, args.ray)
    delta = _measure_delta(space, args)
    eps = args.epsilon if args.epsilon is not None else default_epsilon(delta)
    fld = busemann(space, ray, args.base, delta=delta)
    ds = deform(space, fld, eps, delta=delta)
    _dump(deformed_to_dict(ds), args.out)
    return 0


def cmd_quasihyperbolize(args) -> int:
    space = load_space(args.space)
    qh = quasihyperbolic(space)
    if args.out:
        save_space(qh.space, args.out)
    else:
        print(json.dumps(space_to_dict(qh.space), indent=1, sort_keys=True))
    return 0


def _emit_rows(rows, args) -> int:
    if getattr(args, "out", None):
        report_mod.write_json(rows, args.out)
    else:
        print(json.dumps(rows, indent=1, sort_keys=True, default=float))
    if getattr(args, "csv", None):
        report_mod.write_csv(rows, args.csv)
    return 0 if report_mod.all_passed(rows) else 1


def cmd_verify_uniformize(args) -> int:
    ds = load_deformed(args.deformed)
    delta = args.delta if args.delta is not None else _measure_delta(ds.base, args)
    results = [harnack_check(ds, delta), gehring_hayman_check(ds, delta, seed=args.seed)]
    results.extend(uniformity_constants(ds, delta, seed=args.seed).rows())
    K = None
    if ds.boundary_rays:
        K = roughly_starlike_boundary(ds.base, ds.field.ray, ds.base.rays.values())
    results.extend(density_boundary_check(ds, delta, K))
    results.extend(boundary_convergence_check(ds))
    results.append(
        report_mod.CheckResult(
            "metric_formula_constant",
            bound=math.inf,
            measured=product_formula_constant(ds),
            slack=0.0,
            passed=True,
        )
    )
    name = args.label or "deformed"
    return _emit_rows(report_mod.rows_of(results, name, ds.base.n), args)


def cmd_verify_starlike(args) -> int:
    space = load_space(args.space)
    ray = _first_ray(space, args.ray)
    delta = _measure_delta(space, args)
    eps = args.epsilon if args.epsilon is not None else default_epsilon(delta)
    rep = starlike_equivalence_check(space, args.base, ray, eps, delta=delta)
    name = args.label or "space"
    return _emit_rows(report_mod.rows_of(rep.rows(), name, space.n), args)


def cmd_verify_roundtrip(args) -> int:
    space = load_space(args.space)
    ray = _first_ray(space, args.ray)
    delta = _measure_delta(space, args)
    eps = args.epsilon if args.epsilon is not None else default_epsilon(delta)
    fld = busemann(space, ray, args.base, delta=delta)
    rep = roundtrip_qi_check(space, fld, eps, delta=delta)
    name = args.label or "space"
    return _emit_rows(report_mod.rows_of(rep.rows(), name, space.n), args)


def _load_map(path: str) -> VertexMap:
    with open(path) as fh:
        data = json.load(fh)
    domain = load_space(data["domain"])
    codomain = load_space(data["codomain"])
    return VertexMap(
        domain,
        codomain,
        {str(k): str(v) for k, v in data["assignment"].items()},
        {str(k): str(v) for k, v in data.get("ray_map", {}).items()},
        bool(data.get("fixes_boundary", False)),
    )


def cmd_map_check(args) -> int:
    f = _load_map(args.map)
    out: dict = {"suite": args.suite}
    if args.suite == "qi":
        fit = rough_qi_constants(f)
        out.update({"lam": fit.lam, "mu": fit.mu, "coboundedness": fit.coboundedness})
    elif args.suite == "qs":
        env = quasisymmetry_eta(f, seed=args.seed)
        out.update(
            {
                "t_grid": env.t_grid.tolist(),
                "T_max": [None if np.isnan(v) else float(v) for v in env.T_max],
                "majorant": [float(v) for v in env.majorant],
            }
        )
    elif args.suite == "pq":
        fit = cross_difference_control(f, seed=args.seed)
        out.update({"c": fit.c, "cprime": fit.cprime})
    elif args.suite == "qsim":
        rep = quasisimilarity_check(f, args.L, args.ball_frac)
        out.update(
            {
                "passed": rep.passed,
                "centers": len(rep.scales),
                "skipped": len(rep.skipped),
                "violations": rep.violations[:10],
            }
        )
    else:  # teichmuller
        rep = teichmuller_displacement(f)
        out.update(
            {
                "displacement": rep.displacement,
                "argmax": rep.argmax,
                "lam": rep.qi.lam,
                "mu": rep.qi.mu,
            }
        )
    _dump(out, args.out)
    return 0 if out.get("passed", True) else 1


def cmd_report(args) -> int:
    rows: list[dict] = []
    for path in args.inputs:
        with open(path) as fh:
            rows.extend(json.load(fh))
    if args.csv:
        report_mod.write_csv(rows, args.csv)
    if args.out:
        report_mod.write_json(rows, args.out)
    if not (args.csv or args.out):
        print(json.dumps(rows, indent=1, sort_keys=True, default=float))
    return 0 if report_mod.all_passed(rows) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gromovlab", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    zoo = sub.add_parser("zoo", help="generate test spaces").add_subparsers(
        dest="zoo_cmd", required=True
    )
    gen = zoo.add_parser("generate", help="write a zoo space as JSON")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--branching", type=int, default=2)
    gen.add_argument("--depth", type=int, default=4)
    gen.add_argument("--width", type=int, default=4)
    gen.add_argument("--mesh", type=float, default=1.0)
    gen.add_argument("--metric", choices=("hyperbolic", "euclidean"), default="hyperbolic")
    gen.add_argument("--n", type=int, default=4)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_zoo_generate)

    analyze = sub.add_parser("analyze", help="measure invariants").add_subparsers(
        dest="analyze_cmd", required=True
    )
    hyp = analyze.add_parser("hyperbolicity")
    hyp.add_argument("space")
    hyp.add_argument("--sample", type=int, help="force sampling with this many quadruples")
    hyp.add_argument("--seed", type=int, default=0)
    hyp.add_argument("--budget", type=int, default=1 << 26)
    hyp.add_argument("--rips", action="store_true")
    hyp.add_argument("--out")
    hyp.set_defaults(func=cmd_analyze_hyperbolicity)
    bnd = analyze.add_parser("boundary")
    bnd.add_argument("space")
    bnd.add_argument("--epsilon", type=float, required=True)
    bnd.add_argument("--base", required=True)
    bnd.add_argument("--delta", type=float)
    bnd.add_argument("--seed", type=int, default=0)
    bnd.add_argument("--out")
    bnd.set_defaults(func=cmd_analyze_boundary)

    bus = sub.add_parser("busemann", help="per-vertex Busemann values as CSV")
    bus.add_argument("space")
    bus.add_argument("--ray")
    bus.add_argument("--base")
    bus.add_argument("--delta", type=float)
    bus.add_argument("--seed", type=int, default=0)
    bus.add_argument("--out")
    bus.set_defaults(func=cmd_busemann)

    uni = sub.add_parser("uniformize", help="deform by the Busemann density")
    uni.add_argument("space")
    uni.add_argument("--ray")
    uni.add_argument("--base")
    uni.add_argument("--epsilon", type=float)
    uni.add_argument("--delta", type=float)
    uni.add_argument("--seed", type=int, default=0)
    uni.add_argument("--out")
    uni.set_defaults(func=cmd_uniformize)

    qh = sub.add_parser("quasihyperbolize", help="quasihyperbolic metric graph")
    qh.add_argument("space")
    qh.add_argument("--out")
    qh.set_defaults(func=cmd_quasihyperbolize)

    verify = sub.add_parser("verify", help="run asserted checks").add_subparsers(
        dest="verify_cmd", required=True
    )
    vu = verify.add_parser("uniformize")
    vu.add_argument("deformed")
    vu.add_argument("--delta", type=float)
    vu.add_argument("--seed", type=int, default=0)
    vu.add_argument("--label")
    vu.add_argument("--out")
    vu.add_argument("--csv")
    vu.set_defaults(func=cmd_verify_uniformize)
    vs = verify.add_parser("starlike")
    vs.add_argument("space")
    vs.add_argument("--base", required=True)
    vs.add_argument("--ray")
    vs.add_argument("--epsilon", type=float)
    vs.add_argument("--delta", type=float)
    vs.add_argument("--seed", type=int, default=0)
    vs.add_argument("--label")
    vs.add_argument("--out")
    vs.add_argument("--csv")
    vs.set_defaults(func=cmd_verify_starlike)
    vr = verify.add_parser("roundtrip")
    vr.add_argument("space")
    vr.add_argument("--ray")
    vr.add_argument("--base")
    vr.add_argument("--epsilon", type=float)
    vr.add_argument("--delta", type=float)
    vr.add_argument("--seed", type=int, default=0)
    vr.add_argument("--label")
    vr.add_argument("--out")
    vr.add_argument("--csv")
    vr.set_defaults(func=cmd_verify_roundtrip)

    mp = sub.add_parser("map", help="map distortion suites").add_subparsers(
        dest="map_cmd", required=True
    )
    mc = mp.add_parser("check")
    mc.add_argument("map")
    mc.add_argument(
        "--suite", choices=("qi", "qs", "pq", "qsim", "teichmuller"), required=True
    )
    mc.add_argument("--L", type=float, default=2.0)
    mc.add_argument("--ball-frac", type=float, default=0.5)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--out")
    mc.set_defaults(func=cmd_map_check)

    rep = sub.add_parser("report", help="merge check reports into CSV/JSON")
    rep.add_argument("inputs", nargs="+")
    rep.add_argument("--csv")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
