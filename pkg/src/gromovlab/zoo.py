"""Generators for test spaces with known ground truth.

Families:
  tree(k, D)         k-ary tree, unit edges, rays = root-to-leaf paths
  free_group(D)      Cayley ball of the free group on two letters, axis rays
  halfplane_grid     dyadic-height grid; hyperbolic weights (vertical log 2)
                     or the paired Euclidean variant with the bottom row
                     as boundary (unbounded uniform-domain model)
  uniform_slit       Euclidean grid square with a boundary slit
  cycle(n)           unit n-cycle, the non-hyperbolic control

Generation is deterministic: the same spec always produces a
byte-identical space file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .metric_core import MetricSpace, RayMarker

FAMILIES = ("tree", "free_group", "halfplane_grid", "uniform_slit", "cycle")

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ZooSpec:
    """Parameters of one generated space."""

    family: str
    branching: int = 2
    depth: int = 4
    width: int = 4
    mesh: float = 1.0
    metric: str = "hyperbolic"  # halfplane_grid only: hyperbolic | euclidean
    n: int = 4  # cycle only
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; pick one of {FAMILIES}")
        if self.family == "tree" and (self.branching < 1 or self.depth < 1):
            raise ValueError("tree needs branching >= 1 and depth >= 1")
        if self.family == "free_group" and self.depth < 1:
            raise ValueError("free_group needs depth >= 1")
        if self.family == "halfplane_grid":
            if self.depth < 1 or self.width < 1 or self.mesh <= 0:
                raise ValueError("halfplane_grid needs depth, width >= 1 and mesh > 0")
            if self.metric not in ("hyperbolic", "euclidean"):
                raise ValueError("halfplane_grid metric is 'hyperbolic' or 'euclidean'")
        if self.family == "uniform_slit" and self.width < 3:
            raise ValueError("uniform_slit needs width >= 3")
        if self.family == "cycle" and self.n < 3:
            raise ValueError("cycle needs n >= 3")


def generate(spec: ZooSpec) -> MetricSpace:
    if spec.family == "tree":
        return _tree(spec.branching, spec.depth)
    if spec.family == "free_group":
        return _free_group(spec.depth)
    if spec.family == "halfplane_grid":
        return _halfplane_grid(spec.width, spec.depth, spec.mesh, spec.metric)
    if spec.family == "uniform_slit":
        return _uniform_slit(spec.width, spec.mesh)
    return _cycle(spec.n)


def _tree(k: int, depth: int) -> MetricSpace:
    """Complete k-ary tree; vertex ids encode the root path in base k."""
    vertices = ["v"]
    edges = []
    frontier = ["v"]
    for _ in range(depth):
        nxt = []
        for parent in frontier:
            for c in range(k):
                child = parent + str(c)
                vertices.append(child)
                edges.append((parent, child, 1.0))
                nxt.append(child)
        frontier = nxt
    rays = []
    for leaf in frontier:
        path = tuple(leaf[: t + 1] for t in range(len(leaf)))
        rays.append(RayMarker(f"ray-{leaf}", "v", path))
    return MetricSpace(vertices, edges, rays=rays)


_GENS = ("a", "b", "A", "B")


def _inverse(g: str) -> str:
    return g.swapcase()


def _free_group(depth: int) -> MetricSpace:
    """Ball of radius ``depth`` in the Cayley graph of the free group <a, b>."""
    vertices = ["e"]
    edges = []
    sphere = [""]
    for _ in range(depth):
        nxt = []
        for w in sphere:
            for g in _GENS:
                if w and w[-1] == _inverse(g):
                    continue  # not reduced
                w2 = w + g
                vertices.append(w2)
                edges.append((w or "e", w2, 1.0))
                nxt.append(w2)
        sphere = nxt
    rays = [
        RayMarker(f"ray-{g}", "e", ("e",) + tuple(g * t for t in range(1, depth + 1)))
        for g in _GENS
    ]
    return MetricSpace(vertices, edges, rays=rays)


def _grid_id(i: int, j: int, width: int) -> str:
    return f"g{i + width:03d}_{j:03d}"


def _halfplane_grid(width: int, depth: int, mesh: float, metric: str) -> MetricSpace:
    """Half-plane grid with columns i in [-W, W] and dyadic height levels j in [0, D].

    Hyperbolic variant: vertical edges have exact hyperbolic length
    log 2, horizontal edges at level j have length ~ Euclidean/height =
    2^-j; no metric boundary, the marked rays are the upward column
    (the point at infinity) and one downward ray per column.

    Euclidean variant: all edges have length ``mesh``, the bottom row is
    the boundary, and rays run along interior columns.
    """
    cols = range(-width, width + 1)
    vertices = [_grid_id(i, j, width) for j in range(depth + 1) for i in cols]
    edges = []
    for j in range(depth + 1):
        for i in cols:
            if i < width:
                w = mesh if metric == "euclidean" else 2.0 ** (-j)
                edges.append((_grid_id(i, j, width), _grid_id(i + 1, j, width), w))
            if j < depth:
                w = mesh if metric == "euclidean" else LOG2
                edges.append((_grid_id(i, j, width), _grid_id(i, j + 1, width), w))
    if metric == "hyperbolic":
        up = RayMarker(
            "ray-up", _grid_id(0, 0, width), tuple(_grid_id(0, j, width) for j in range(depth + 1))
        )
        downs = [
            RayMarker(
                f"ray-down{i + width:03d}",
                _grid_id(i, depth, width),
                tuple(_grid_id(i, j, width) for j in range(depth, -1, -1)),
            )
            for i in cols
        ]
        return MetricSpace(vertices, edges, rays=[up, *downs])
    boundary = [_grid_id(i, 0, width) for i in cols]
    up = RayMarker(
        "ray-up", _grid_id(0, 1, width), tuple(_grid_id(0, j, width) for j in range(1, depth + 1))
    )
    downs = [
        RayMarker(
            f"ray-down{i + width:03d}",
            _grid_id(i, depth, width),
            tuple(_grid_id(i, j, width) for j in range(depth, 0, -1)),
        )
        for i in cols
    ]
    return MetricSpace(vertices, edges, boundary, rays=[up, *downs])


def _uniform_slit(n: int, mesh: float) -> MetricSpace:
    """Euclidean grid square with the outer rim and a central slit as boundary."""
    vertices = [f"s{i:03d}_{j:03d}" for j in range(n + 1) for i in range(n + 1)]
    edges = []
    for j in range(n + 1):
        for i in range(n + 1):
            if i < n:
                edges.append((f"s{i:03d}_{j:03d}", f"s{i + 1:03d}_{j:03d}", mesh))
            if j < n:
                edges.append((f"s{i:03d}_{j:03d}", f"s{i:03d}_{j + 1:03d}", mesh))
    rim = {
        f"s{i:03d}_{j:03d}"
        for j in range(n + 1)
        for i in range(n + 1)
        if i in (0, n) or j in (0, n)
    }
    mid = n // 2
    slit = {f"s{mid:03d}_{j:03d}" for j in range(1, mid + 1)}
    return MetricSpace(vertices, edges, rim | slit)


def _cycle(n: int) -> MetricSpace:
    vertices = [f"c{i:03d}" for i in range(n)]
    edges = [(vertices[i], vertices[(i + 1) % n], 1.0) for i in range(n)]
    return MetricSpace(vertices, edges)
