"""Quasihyperbolic metric of spaces with boundary, rough starlikeness, and the round trip.

The quasihyperbolic weight of an interior edge is the trapezoid rule for
the density 1/d(.) (d = distance to the boundary); shortest paths under
these weights give the metric k.  Starlikeness constants measure how far
vertices stray from marked rays or boundary-to-boundary lines, and the
round-trip check compares the quasihyperbolized deformation k_eps with
the rescaled original metric eps*d.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .boundary import boundary_sample
from .busemann import BusemannField
from .metric_core import CompleteSpaceError, MetricSpace, RayMarker, boundary_distances, geodesic
from .report import CheckResult
from .uniformize import DeformedSpace, boundary_distances as deformed_boundary_distances, deform


@dataclass
class QHSpace:
    """A space with boundary together with its quasihyperbolic metric graph."""

    base: MetricSpace
    space: MetricSpace  # interior vertices under quasihyperbolic weights

    @property
    def k(self) -> np.ndarray:
        return self.space.distances


def quasihyperbolic(space: MetricSpace, *, warn_mesh: bool = True) -> QHSpace:
    """Quasihyperbolize a space with nonempty boundary.

    Edge weight between interior vertices: length * (1/d(u) + 1/d(v))/2.
    Warns when an edge is long relative to its endpoints' boundary
    distance (the trapezoid quadrature of 1/d degrades).  Marked rays
    whose vertices are all interior carry over.
    """
    if not space.boundary:
        raise CompleteSpaceError("quasihyperbolic metric needs a nonempty boundary")
    d = boundary_distances(space)
    idx = space.index_of
    interior = set(space.interior)
    edges = []
    worst_mesh = 0.0
    for u, v, w in space.edges:
        if u not in interior or v not in interior:
            continue
        du, dv = d[idx(u)], d[idx(v)]
        if du <= 0.0 or dv <= 0.0:
            raise ValueError(f"interior vertex at distance 0 from the boundary: {u!r} or {v!r}")
        worst_mesh = max(worst_mesh, w / min(du, dv))
        edges.append((u, v, w * 0.5 * (1.0 / du + 1.0 / dv)))
    if warn_mesh and worst_mesh > 0.5:
        warnings.warn(
            f"edge length up to {worst_mesh:.2f}x the boundary distance; "
            "quasihyperbolic weights lose accuracy",
            stacklevel=2,
        )
    rays = [r for r in space.rays.values() if all(v in interior for v in r.path)]
    qh = MetricSpace(sorted(interior), edges, rays=rays)
    return QHSpace(space, qh)


# -- rough starlikeness --------------------------------------------------------


def _ray_vertex_sets(space: MetricSpace, w: str, rays) -> list[list[int]]:
    sets = []
    for ray in rays:
        verts = list(ray.path)
        if ray.base != w:
            verts = list(geodesic(space, w, ray.base).vertices[:-1]) + verts
        sets.append([space.index_of(v) for v in verts])
    return sets


def roughly_starlike_point(space: MetricSpace, w: str, rays) -> float:
    """K = max over vertices of the distance to the nearest marked ray from ``w``.

    Rays not based at ``w`` are re-rooted by prepending the geodesic from
    ``w`` to their base.
    """
    rays = list(rays)
    if not rays:
        raise ValueError("no rays given")
    D = space.distances
    per_ray = np.stack(
        [D[:, s].min(axis=1) for s in _ray_vertex_sets(space, w, rays)], axis=1
    )
    return float(per_ray.min(axis=1).max())


def roughly_starlike_boundary(space: MetricSpace, xi: RayMarker, others) -> float:
    """K = max over vertices of the distance to the nearest line through ``xi``.

    Lines to the other marked boundary points are approximated by
    geodesics between the deepest ray vertices.
    """
    others = [r for r in others if r.id != xi.id]
    if not others:
        raise ValueError("boundary starlikeness needs at least one other ray")
    D = space.distances
    lines = []
    for eta in others:
        verts = geodesic(space, xi.tip, eta.tip).vertices
        lines.append([space.index_of(v) for v in verts])
    per_line = np.stack([D[:, s].min(axis=1) for s in lines], axis=1)
    return float(per_line.min(axis=1).max())


@dataclass
class StarlikeReport:
    """Both starlikeness constants and the visual diameter of the boundary sample."""

    K_point: float
    K_boundary: float
    visual_diameter: float

    def rows(self):
        return [
            CheckResult("starlike_point", math.inf, self.K_point, 0.0, math.isfinite(self.K_point)),
            CheckResult(
                "starlike_boundary", math.inf, self.K_boundary, 0.0, math.isfinite(self.K_boundary)
            ),
            CheckResult(
                "visual_diameter", 0.0, self.visual_diameter, 0.0, self.visual_diameter > 0.0
            ),
        ]


def starlike_equivalence_check(
    space: MetricSpace,
    w: str,
    xi: RayMarker,
    eps: float,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> StarlikeReport:
    """The three equivalent starlikeness quantities, reported together.

    Finiteness of any one forces the others: starlike from a boundary
    point, starlike from interior points, and a visual diameter bounded
    away from zero.
    """
    rays = list(space.rays.values())
    K_point = roughly_starlike_point(space, w, rays)
    K_boundary = roughly_starlike_boundary(space, xi, rays)
    sample = boundary_sample(space, w, eps, delta=delta, tail=tail, tol=tol)
    return StarlikeReport(K_point, K_boundary, sample.visual_diameter)


# -- round trip ----------------------------------------------------------------


@dataclass
class RoundtripReport:
    """Comparison of k_eps with eps*d on the deformed space."""

    upper_ratio: float  # max of k_eps / (eps d)
    lower_constant: float  # max of (eps d) / k_eps
    bound: float
    slack: float
    passed: bool

    def rows(self):
        return [
            CheckResult("roundtrip_upper", self.bound, self.upper_ratio, self.slack, self.passed),
            CheckResult("roundtrip_lower", math.inf, self.lower_constant, 0.0, True),
        ]


def quasihyperbolize_deformed(ds: DeformedSpace) -> MetricSpace:
    """Quasihyperbolic graph of the deformed space, using its estimated boundary distances."""
    bdist = deformed_boundary_distances(ds)
    idx = ds.base.index_of
    edges = [
        (u, v, w * 0.5 * (1.0 / bdist[idx(u)] + 1.0 / bdist[idx(v)]))
        for u, v, w in ds.space.edges
    ]
    return MetricSpace(ds.base.vertex_ids, edges)


def roundtrip_qi_check(
    space: MetricSpace,
    field: BusemannField,
    eps: float,
    *,
    delta: float = 0.0,
    tol: float = 1e-9,
) -> RoundtripReport:
    """The identity between (X, eps*d) and the quasihyperbolized deformation is a quasi-isometry.

    Upper direction: k_eps <= e^{10 eps delta'} * eps*d * (1 + mesh
    slack) for every pair.  The lower comparison constant is reported for
    trend analysis across sizes.
    """
    ds = deform(space, field, eps, delta=delta)
    k_eps = quasihyperbolize_deformed(ds).distances
    dprime = delta + field.error
    D = space.distances
    off = ~np.eye(space.n, dtype=bool)
    ratios = k_eps[off] / (eps * D[off])
    upper = float(ratios.max())
    lower = float((1.0 / ratios).max())
    slack = space.max_edge_length  # dprime already carries the stabilization error
    bound = math.exp(10.0 * eps * dprime)
    return RoundtripReport(
        upper, lower, bound, slack, upper <= bound * (1.0 + slack) + tol
    )


# -- radial distance vs product -------------------------------------------------


@dataclass
class RadialReport:
    """|k(a,y) - (v|xi)_a| where y sits on the ray at base arc length d(a,v)."""

    diffs: dict[str, float]
    max_diff: float


def radial_product_check(
    qh: QHSpace,
    a: str,
    ray: RayMarker,
    sample,
    *,
    tail: int = 5,
    delta: float = 0.0,
    tol: float = 1e-6,
) -> RadialReport:
    """Compare the metric to a radial point with the Gromov product toward the ray.

    For each sample vertex v, y is the ray vertex whose base arc length
    from ``a`` matches d(a, v); k(a, y) then agrees with (v|xi)_a up to a
    constant depending only on the uniformity data, so the differences
    are reported for trend analysis rather than asserted.
    """
    from .boundary import extended_gromov_product

    if ray.base != a:
        raise ValueError(f"ray {ray.id!r} must emanate from {a!r}")
    base = qh.base
    arc = [0.0]
    for u, v in zip(ray.path, ray.path[1:]):
        arc.append(arc[-1] + base.edge_length(u, v))
    k = qh.space.distances
    ia = qh.space.index_of(a)
    diffs = {}
    for v in sample:
        target = base.dist(a, v)
        if target > arc[-1] + tol:
            raise ValueError(
                f"ray {ray.id!r} base length {arc[-1]:.3g} shorter than d(a, {v!r}) = {target:.3g}"
            )
        t = int(np.argmin([abs(s - target) for s in arc]))
        y = ray.path[t]
        prod = extended_gromov_product(
            qh.space, v, ray, a, delta=delta, tail=tail, tol=math.inf
        ).mid
        diffs[v] = abs(float(k[ia, qh.space.index_of(y)]) - prod)
    return RadialReport(diffs, max(diffs.values()) if diffs else 0.0)
