"""Quasihyperbolic metric, rough starlikeness, round-trip quasi-isometry."""

import math

import numpy as np
import pytest

from gromovlab.busemann import busemann, default_epsilon
from gromovlab.hyperbolicity import delta_four_point
from gromovlab.metric_core import CompleteSpaceError, MetricSpace, RayMarker
from gromovlab.quasihyperbolize import (
    quasihyperbolic,
    radial_product_check,
    roughly_starlike_boundary,
    roughly_starlike_point,
    roundtrip_qi_check,
    starlike_equivalence_check,
)
from gromovlab.zoo import ZooSpec, generate


@pytest.fixture(scope="module")
def qh_grid(euclid_grid):
    with pytest.warns(UserWarning, match="boundary distance"):
        return quasihyperbolic(euclid_grid)


def test_constant_height_edge():
    # one edge of length L at constant boundary distance h: k = L/h
    sp = MetricSpace(
        ["b1", "b2", "x", "y"],
        [("b1", "x", 2.0), ("b2", "y", 2.0), ("x", "y", 3.0)],
        boundary=["b1", "b2"],
    )
    qh = quasihyperbolic(sp, warn_mesh=False)
    assert qh.space.dist("x", "y") == 3.0 * 0.5 * (1.0 / 2.0 + 1.0 / 2.0)


def test_vertical_column_approximates_log():
    # heights 1 to 2 with fine subdivision: k converges to log 2
    m = 64
    ids = ["bot"] + [f"h{i:03d}" for i in range(m + 1)]
    edges = [("bot", "h000", 1.0)] + [
        (f"h{i:03d}", f"h{i + 1:03d}", 1.0 / m) for i in range(m)
    ]
    sp = MetricSpace(ids, edges, boundary=["bot"])
    qh = quasihyperbolic(sp, warn_mesh=False)
    assert qh.space.dist("h000", f"h{m:03d}") == pytest.approx(math.log(2.0), abs=1e-4)


def test_classical_lower_bound(euclid_grid, qh_grid):
    # k(x,y) >= log(1 + d(x,y)/min(d(x), d(y))), exact in the trapezoid model
    from gromovlab.metric_core import dist_to_boundary

    rng = np.random.default_rng(3)
    ids = qh_grid.space.vertex_ids
    for _ in range(40):
        x, y = (ids[int(i)] for i in rng.integers(0, len(ids), 2))
        if x == y:
            continue
        lhs = qh_grid.space.dist(x, y)
        dmin = min(dist_to_boundary(euclid_grid, x), dist_to_boundary(euclid_grid, y))
        assert lhs >= math.log1p(euclid_grid.dist(x, y) / dmin) - 1e-9


def test_quasihyperbolic_needs_boundary(tree24):
    with pytest.raises(CompleteSpaceError):
        quasihyperbolic(tree24)


def test_scaling_leaves_k_invariant(euclid_grid, qh_grid):
    with pytest.warns(UserWarning, match="boundary distance"):
        qh2 = quasihyperbolic(euclid_grid.scale(2.0))
    assert np.array_equal(qh2.space.distances, qh_grid.space.distances)


def test_starlike_point_tree_all_rays(tree24):
    assert roughly_starlike_point(tree24, "v", tree24.rays.values()) == 0.0


def test_starlike_point_single_ray_matches_exhaustive(tree24):
    ray = tree24.rays["ray-v0000"]
    K = roughly_starlike_point(tree24, "v", [ray])
    brute = max(
        min(tree24.dist(x, z) for z in ray.path) for x in tree24.vertex_ids
    )
    assert K == brute


def test_starlike_constants_monotone_in_rays(tree24):
    rays = list(tree24.rays.values())
    K1 = roughly_starlike_point(tree24, "v", rays[:1])
    K2 = roughly_starlike_point(tree24, "v", rays[:4])
    K3 = roughly_starlike_point(tree24, "v", rays)
    assert K1 >= K2 >= K3
    xi = tree24.rays["ray-v0000"]
    B1 = roughly_starlike_boundary(tree24, xi, rays[8:9])
    B2 = roughly_starlike_boundary(tree24, xi, rays[8:12])
    B3 = roughly_starlike_boundary(tree24, xi, rays)
    assert B1 >= B2 >= B3


def test_starlike_boundary_tree_all_rays(tree24):
    xi = tree24.rays["ray-v0000"]
    assert roughly_starlike_boundary(tree24, xi, tree24.rays.values()) == 0.0


def test_starlike_boundary_single_other_matches_exhaustive(tree24):
    xi = tree24.rays["ray-v0000"]
    eta = tree24.rays["ray-v1111"]
    K = roughly_starlike_boundary(tree24, xi, [eta])
    from gromovlab.metric_core import geodesic

    line = geodesic(tree24, xi.tip, eta.tip).vertices
    brute = max(
        min(tree24.dist(x, z) for z in line) for x in tree24.vertex_ids
    )
    assert K == brute > 0.0


def test_starlike_boundary_needs_other_rays(tree24):
    xi = tree24.rays["ray-v0000"]
    with pytest.raises(ValueError, match="other ray"):
        roughly_starlike_boundary(tree24, xi, [xi])


def test_starlike_equivalence_bi_infinite_line():
    # base point on a line through two boundary points: the visual
    # diameter is at least e^(-2 eps delta)/2, which is 1/2 at delta 0
    ids = [f"p{i:02d}" for i in range(13)]
    sp = MetricSpace(
        ids,
        [(ids[i], ids[i + 1], 1.0) for i in range(12)],
        rays=[
            RayMarker("left", ids[6], tuple(ids[6 - t] for t in range(7))),
            RayMarker("right", ids[6], tuple(ids[6 + t] for t in range(7))),
        ],
    )
    rep = starlike_equivalence_check(sp, ids[6], sp.rays["left"], 0.5)
    assert rep.visual_diameter >= 0.5
    assert math.isfinite(rep.K_point) and math.isfinite(rep.K_boundary)


def test_starlike_equivalence_grid(qh_grid):
    delta = delta_four_point(qh_grid.space, budget=1 << 40).delta
    eps = default_epsilon(delta)
    rep = starlike_equivalence_check(
        qh_grid.space, "g005_003", qh_grid.space.rays["ray-up"], eps, delta=delta
    )
    assert math.isfinite(rep.K_point)
    assert math.isfinite(rep.K_boundary)
    assert rep.visual_diameter > 0.0


def test_roundtrip_tree(tree26):
    field = busemann(tree26, tree26.rays["ray-v000000"])
    rep = roundtrip_qi_check(tree26, field, 0.2)
    assert rep.passed
    assert rep.upper_ratio <= math.exp(0.0) * (1.0 + 1.0) + 1e-9  # mesh slack 1
    # adjacent pairs sit inside the two-sided band
    assert rep.upper_ratio >= 1.0 / (1.0 + 1.0)


def test_roundtrip_lower_constant_stable_across_depths():
    values = {}
    for depth in (6, 8):
        t = generate(ZooSpec("tree", branching=2, depth=depth))
        field = busemann(t, t.rays["ray-" + "v" + "0" * depth])
        values[depth] = roundtrip_qi_check(t, field, 0.2).lower_constant
    assert values[8] / values[6] < 2.0
    assert values[6] / values[8] < 2.0


def test_roundtrip_grid(hyp_grid):
    delta = delta_four_point(hyp_grid, budget=1 << 40).delta
    field = busemann(hyp_grid, hyp_grid.rays["ray-up"], delta=delta)
    eps = default_epsilon(delta + field.error)
    rep = roundtrip_qi_check(hyp_grid, field, eps, delta=delta)
    assert rep.passed


def test_radial_product_on_ray_vertices(qh_grid):
    # sample points on the ray itself: the matched point is the sample
    # and the difference is the product sandwich width
    up = qh_grid.space.rays["ray-up"]
    rep = radial_product_check(qh_grid, up.base, up, list(up.path[1:4]))
    assert rep.max_diff <= 1.5  # bounded by the qh-space sandwich at this size


def test_radial_product_errors_on_short_ray(qh_grid):
    up = qh_grid.space.rays["ray-up"]
    far = "g010_001"
    if qh_grid.base.dist(up.base, far) > sum(
        qh_grid.base.edge_length(a, b) for a, b in zip(up.path, up.path[1:])
    ):
        with pytest.raises(ValueError, match="shorter"):
            radial_product_check(qh_grid, up.base, up, [far])


def test_slit_domain_quasihyperbolization(slit_grid):
    # bounded uniform-domain control: the quasihyperbolization is a
    # connected interior graph, hyperbolic at desk scale, and its
    # geodesics detour around the slit as strong-cigar arcs
    from gromovlab.metric_core import geodesic
    from gromovlab.uniformize import strong_cigar_check

    qh = quasihyperbolic(slit_grid, warn_mesh=False)
    assert qh.space.n == len(slit_grid.interior)
    rep = delta_four_point(qh.space, budget=1 << 40)
    assert rep.delta > 0.0 and math.isfinite(rep.delta)
    # endpoints on either side of the slit, below its top
    arc = geodesic(qh.space, "s002_002", "s006_002").vertices
    assert any(int(v[1:4]) == 4 and int(v[5:8]) > 4 for v in arc)  # passes above the slit
    cigar = strong_cigar_check(slit_grid, arc)
    assert math.isfinite(cigar.constant) and cigar.constant >= 1.0


def test_radial_product_trend_across_sizes():
    worst = {}
    for width, depth in ((4, 4), (6, 6)):
        g = generate(ZooSpec("halfplane_grid", width=width, depth=depth, metric="euclidean"))
        qh = quasihyperbolic(g, warn_mesh=False)
        up = qh.space.rays["ray-up"]
        rng = np.random.default_rng(0)
        ids = [
            v
            for v in qh.space.vertex_ids
            if qh.base.dist(up.base, v) <= depth - 1
        ]
        sample = [ids[int(i)] for i in rng.integers(0, len(ids), 8)]
        worst[(width, depth)] = radial_product_check(qh, up.base, up, sample).max_diff
    vals = list(worst.values())
    assert vals[1] <= max(2.0 * vals[0], vals[0] + 1.0)
