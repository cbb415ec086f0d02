"""Busemann fields along marked rays and Gromov products based at them.

The field value is the renormalized distance from the point at infinity,
b(x) = d(x, z_N) - d(o, z_N) with z_N the deepest ray vertex; the tail
oscillation over the last few ray vertices is recorded as the
stabilization error.  Using the deepest point (rather than a tail
average) keeps b exact on the ray itself.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .boundary import Interval, RayTooShallowError, _stabilized
from .metric_core import MetricSpace, RayMarker, geodesic


def default_epsilon(delta: float) -> float:
    """Operating deformation parameter: half of min(1, 1/(5*delta+1)).

    Stays inside the visual-metric range for the measured delta while
    keeping the exponential correction factors moderate.
    """
    return 0.5 * min(1.0, 1.0 / (5.0 * delta + 1.0))


@dataclass
class BusemannField:
    """Per-vertex Busemann values, aligned with ``space.vertex_ids``."""

    space: MetricSpace
    ray: RayMarker
    base: str
    b: np.ndarray
    error: float  # worst tail oscillation over all vertices

    def value(self, x: str) -> float:
        return float(self.b[self.space.index_of(x)])

    def shifted(self, c: float) -> "BusemannField":
        return BusemannField(self.space, self.ray, self.base, self.b + c, self.error)


def busemann(
    space: MetricSpace,
    ray: RayMarker,
    base: str | None = None,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
    min_depth: float | None = None,
) -> BusemannField:
    """Busemann field based on the boundary point of ``ray``, normalized at ``base``.

    The tail values d(x, z_i) - d(o, z_i) must stabilize within
    2*delta + tol over the last ``tail`` ray vertices, otherwise the ray
    is reported as too shallow.
    """
    o = ray.base if base is None else base
    io = space.index_of(o)
    D = space.distances
    tail_pts = ray.tail(tail)
    tail_idx = [space.index_of(z) for z in tail_pts]
    vals = np.asarray(D[:, tail_idx] - D[io, tail_idx])  # (n, w)
    depth = ray.depth(space)
    if min_depth is not None and depth < min_depth:
        raise RayTooShallowError(
            f"ray {ray.id!r} depth {depth:.3g} below required {min_depth:.3g}", 2.0 * depth
        )
    bound = 2.0 * delta + tol

    # oscillation of the last (k+1) tail values, per vertex
    rev = vals[:, ::-1]
    osc = np.maximum.accumulate(rev, axis=1) - np.minimum.accumulate(rev, axis=1)
    ok = osc <= bound
    width = ok.shape[1]
    best = np.full(space.n, -1)
    for k in range(1, width):
        best[ok[:, k]] = k
    chosen = np.where(best >= 1, osc[np.arange(space.n), np.maximum(best, 0)], np.nan)

    # vertices within the tail span of the tip move with the ray by
    # geodesity; their truncation needs no visible plateau
    span = float(D[tail_idx[0], tail_idx[-1]])
    exempt = D[:, tail_idx[-1]] <= span + tol
    stuck = (best < 1) & ~exempt
    if width > 1 and stuck.any():
        x = space.vertex_ids[int(np.argmax(stuck))]
        raise RayTooShallowError(
            f"busemann tail for {x!r} oscillates beyond {bound:.3g} (ray {ray.id!r} too shallow)",
            2.0 * depth,
        )
    error = float(np.nanmax(chosen)) if np.isfinite(chosen).any() else 0.0
    b = np.array(vals[:, -1])
    b.setflags(write=False)
    return BusemannField(space, ray, o, b, error)


def gromov_product_b(field: BusemannField, x: str, y: str) -> float:
    """(x|y)_b = [b(x) + b(y) - d(x,y)] / 2, the product based at the Busemann function."""
    space = field.space
    ix, iy = space.index_of(x), space.index_of(y)
    return 0.5 * ((field.b[ix] + field.b[iy]) - space.distances[ix, iy])


def gromov_product_b_matrix(field: BusemannField) -> np.ndarray:
    b = field.b
    return 0.5 * ((b[:, None] + b[None, :]) - field.space.distances)


def boundary_product_b(
    field: BusemannField,
    r1: RayMarker,
    r2: RayMarker,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> Interval:
    """(r1|r2)_b between two non-base boundary points, as a tail interval."""
    if r1.id == r2.id:
        return Interval(math.inf, math.inf)
    ta, tb = r1.tail(tail), r2.tail(tail)
    k = min(len(ta), len(tb))
    values = [gromov_product_b(field, a, b) for a, b in zip(ta[-k:], tb[-k:])]
    depth = min(r1.depth(field.space), r2.depth(field.space))
    return _stabilized(values, 2.0 * delta + 2.0 * field.error + tol, f"({r1.id}|{r2.id})_b", depth)


def hamenstadt_metric(
    field: BusemannField,
    sample: list[RayMarker],
    eps: float,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> np.ndarray:
    """rho_{b,eps}(s, t) = exp(-eps (s|t)_b) on a sample of rays away from the base point.

    Unbounded as the sample branches deeper from the base ray, unlike the
    visual metric at an interior point.
    """
    if not (0.0 < eps <= default_epsilon(delta) + 1e-12):
        raise ValueError(f"epsilon {eps} outside (0, {default_epsilon(delta)}]")
    for r in sample:
        if r.id == field.ray.id:
            raise ValueError(f"sample contains the base ray {r.id!r}")
    m = len(sample)
    P = np.full((m, m), math.inf)
    for i, j in itertools.combinations(range(m), 2):
        P[i, j] = P[j, i] = boundary_product_b(
            field, sample[i], sample[j], delta=delta, tail=tail, tol=tol
        ).mid
    with np.errstate(over="ignore"):
        rho = np.exp(-eps * P)
    np.fill_diagonal(rho, 0.0)
    return rho


@dataclass
class ProjectionReport:
    """Busemann value at the ray-shadow point of a geodesic vs the b-based product."""

    w_y: str
    b_at_w: float
    product: float
    bound: float
    slack: float
    passed: bool


def busemann_projection_check(
    field: BusemannField,
    x: str,
    y: str,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> ProjectionReport:
    """Locate w_y on [x,y] at distance (x|xi)_y from y and compare b(w_y) with (x|y)_b.

    The two agree within 16*delta plus discretization slack.
    """
    from .boundary import extended_gromov_product

    space = field.space
    target = extended_gromov_product(
        space, x, field.ray, y, delta=delta, tail=tail, tol=tol
    ).mid
    mesh = space.max_edge_length
    dxy = space.dist(x, y)
    if target > dxy + 0.5 * mesh + 2.0 * delta + tol:
        raise ValueError(
            f"geodesic [{x!r},{y!r}] of length {dxy:.3g} shorter than the "
            f"projection parameter {target:.3g}"
        )
    path = geodesic(space, x, y)
    iy = space.index_of(y)
    D = space.distances
    w_y = min(path.vertices, key=lambda v: (abs(D[space.index_of(v), iy] - target), v))
    slack = mesh + 2.0 * field.error + 2.0 * delta
    lhs = field.value(w_y)
    rhs = gromov_product_b(field, x, y)
    bound = 16.0 * delta + slack
    return ProjectionReport(w_y, lhs, rhs, bound, slack, abs(lhs - rhs) <= bound + tol)
