"""Four-point delta, Gromov products, cross-differences, triangle thinness."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gromovlab.hyperbolicity import (
    cross_difference,
    delta_four_point,
    gromov_product,
    quadruple_defect,
    rips_thinness,
)
from gromovlab.metric_core import MetricSpace
from gromovlab.zoo import ZooSpec, generate

from conftest import ordered_defect_scan, random_connected_space


def test_gromov_product_substitutions(tree24):
    d = tree24.dist("v00", "v11")
    assert gromov_product(tree24, "v00", "v00", "v11") == d
    assert gromov_product(tree24, "v00", "v11", "v00") == 0.0


def test_gromov_product_hand_value():
    sp = MetricSpace(["o", "a", "b"], [("o", "a", 1.0), ("a", "b", 1.0)])
    assert gromov_product(sp, "a", "b", "o") == 0.5 * (1 + 2 - 1)


@given(st.integers(0, 5_000), st.integers(4, 9))
def test_product_bounds(seed, n):
    sp = random_connected_space(np.random.default_rng(seed), n)
    ids = sp.vertex_ids
    rng = np.random.default_rng(seed + 1)
    for _ in range(10):
        x, y, w = (ids[int(i)] for i in rng.integers(0, n, 3))
        p = gromov_product(sp, x, y, w)
        assert 0.0 <= p <= min(sp.dist(x, w), sp.dist(y, w)) + 1e-12


def test_cross_difference_trivial_cases(tree24):
    assert cross_difference(tree24, "v0", "v1", "v1", "v00") == 0.0
    assert cross_difference(tree24, "v0", "v1", "v0", "v1") == -tree24.dist("v0", "v1")


@given(st.integers(0, 5_000))
def test_cross_difference_antisymmetry_exact(seed):
    sp = random_connected_space(np.random.default_rng(seed), 7)
    rng = np.random.default_rng(seed + 1)
    ids = sp.vertex_ids
    for _ in range(10):
        x, y, z, u = (ids[int(i)] for i in rng.integers(0, 7, 4))
        assert cross_difference(sp, x, y, z, u) == -cross_difference(sp, x, z, y, u)


@given(st.integers(0, 5_000))
def test_cross_difference_product_identity(seed):
    sp = random_connected_space(np.random.default_rng(seed), 7)
    rng = np.random.default_rng(seed + 2)
    ids = sp.vertex_ids
    for _ in range(8):
        x, y, z, u, o = (ids[int(i)] for i in rng.integers(0, 7, 5))
        lhs = cross_difference(sp, x, y, z, u)
        rhs = (
            -gromov_product(sp, x, z, o)
            - gromov_product(sp, y, u, o)
            + gromov_product(sp, x, y, o)
            + gromov_product(sp, z, u, o)
        )
        assert abs(lhs - rhs) <= 1e-9


def test_tree_delta_zero_exhaustive(tree24):
    rep = delta_four_point(tree24)
    assert rep.exhaustive and rep.delta == 0.0


def test_single_vertex_delta():
    sp = MetricSpace(["v"], [])
    assert delta_four_point(sp).delta == 0.0


@pytest.mark.parametrize("n", [4, 5, 6])
def test_cycle_delta_matches_brute_force(n):
    sp = generate(ZooSpec("cycle", n=n))
    rep = delta_four_point(sp)
    assert rep.exhaustive
    assert rep.delta == ordered_defect_scan(sp)
    assert rep.delta > 0.0


@given(st.integers(0, 3_000))
def test_subset_scan_matches_ordered_scan(seed):
    sp = random_connected_space(np.random.default_rng(seed), 6)
    assert delta_four_point(sp).delta == pytest.approx(ordered_defect_scan(sp), abs=1e-12)


def test_witness_reproduces_delta(hyp_grid):
    rep = delta_four_point(hyp_grid, budget=1 << 40)
    assert quadruple_defect(hyp_grid, *rep.witness) == rep.delta


def test_sampled_mode_is_lower_bound(hyp_grid):
    full = delta_four_point(hyp_grid, budget=1 << 40)
    sampled = delta_four_point(hyp_grid, exhaustive=False, samples=30_000, seed=3)
    assert sampled.lower_bound and not sampled.exhaustive
    assert sampled.delta <= full.delta + 1e-12
    again = delta_four_point(hyp_grid, exhaustive=False, samples=30_000, seed=3)
    assert again.delta == sampled.delta and again.witness == sampled.witness


def test_delta_scales_with_metric():
    sp = generate(ZooSpec("cycle", n=6))
    base = delta_four_point(sp).delta
    for s in (2.0, 0.5):
        assert delta_four_point(sp.scale(s)).delta == s * base


def test_tree_triangle_thinness_zero(tree24):
    rep = rips_thinness(tree24, delta=0.0)
    assert rep.thinness == 0.0
    assert rep.tripod_4delta_ok


def test_cycle6_thinness_matches_brute_force():
    from gromovlab.metric_core import geodesic

    sp = generate(ZooSpec("cycle", n=6))
    D = sp.distances
    ids = sp.vertex_ids
    # independent exhaustive scan over every triangle with lexicographic sides
    import itertools

    worst = 0.0
    for x, y, z in itertools.combinations(ids, 3):
        sides = {}
        for a, b in ((x, y), (y, z), (z, x)):
            key = (a, b) if a <= b else (b, a)
            sides[key] = [sp.index_of(v) for v in geodesic(sp, *key).vertices]
        for key, pts in sides.items():
            others = [i for k2, p in sides.items() if k2 != key for i in p]
            worst = max(worst, max(min(D[i, j] for j in others) for i in pts))
    rep = rips_thinness(sp)
    assert rep.thinness == worst


def test_grid_thinness_within_tripod_bound(hyp_grid):
    rep = delta_four_point(hyp_grid, budget=1 << 40)
    thin = rips_thinness(hyp_grid, delta=rep.delta, max_vertices=24, seed=0)
    mesh = hyp_grid.max_edge_length
    assert thin.thinness <= 4.0 * rep.delta + 4.0 * mesh
    assert thin.tripod_4delta_ok
