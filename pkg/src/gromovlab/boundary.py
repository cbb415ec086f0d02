"""Points at infinity via marked rays: extended Gromov products, visual metrics, uniform perfectness.

Products with a boundary point are estimated from the stabilized tail of
the marked ray and carried as intervals; the interval width is bounded
by 2*delta for honest rays (sandwich estimate), so a wider tail means
the ray is too shallow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .hyperbolicity import gromov_product
from .metric_core import MetricSpace, RayMarker


class RayTooShallowError(ValueError):
    """Tail products did not stabilize; carries a suggested escape depth."""

    def __init__(self, message: str, suggested_depth: float):
        self.suggested_depth = suggested_depth
        super().__init__(f"{message}; deepen the ray to about {suggested_depth:.1f}")


class SandwichError(AssertionError):
    """A proven two-sided estimate failed beyond tolerance."""


@dataclass(frozen=True)
class Interval:
    """A [lo, hi] enclosure of a boundary Gromov product."""

    lo: float
    hi: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


def stable_window(values, width_bound: float, tail: int):
    """Longest suffix of ``values`` (at most ``tail`` entries) oscillating within ``width_bound``.

    Tail values converge monotonically along a geodesic ray but reach
    their plateau only past the branch with the other argument, so the
    stabilized window can be shorter than the requested tail.  Returns
    None when even the last two values disagree.
    """
    vals = list(values)
    if len(vals) == 1:
        return vals
    for w in range(min(tail, len(vals)), 1, -1):
        window = vals[-w:]
        if max(window) - min(window) <= width_bound:
            return window
    return None


def _stabilized(values, width_bound, what, depth, tail=None) -> Interval:
    tail = len(values) if tail is None else tail
    window = stable_window(values, width_bound, tail)
    if window is None:
        osc = max(values[-2:]) - min(values[-2:])
        raise RayTooShallowError(
            f"{what}: tail oscillation {osc:.3g} exceeds {width_bound:.3g} (ray too shallow)",
            2.0 * depth,
        )
    return Interval(min(window), max(window))


def extended_gromov_product(
    space: MetricSpace,
    x: str,
    ray: RayMarker,
    w: str,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> Interval:
    """(x|xi)_w for the boundary point xi marked by ``ray``, as a tail interval.

    For x within the tail span of the ray tip the plateau of
    (x|z_i)_w falls beyond the marked depth; the deepest value is then
    taken as the (exact-on-trees) representative.
    """
    tail_pts = ray.tail(tail)
    values = [gromov_product(space, x, z, w) for z in tail_pts]
    try:
        return _stabilized(values, 2.0 * delta + tol, f"(x|{ray.id})_w", ray.depth(space), tail)
    except RayTooShallowError:
        span = space.dist(tail_pts[0], ray.tip)
        if space.dist(x, ray.tip) <= span + tol:
            return Interval(values[-1], values[-1])
        raise


def boundary_gromov_product(
    space: MetricSpace,
    xi: RayMarker,
    eta: RayMarker,
    w: str,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> Interval:
    """(xi|eta)_w between two marked boundary points; +inf sentinel for the same marker."""
    if xi.id == eta.id:
        return Interval(math.inf, math.inf)
    ta, tb = xi.tail(tail), eta.tail(tail)
    k = min(len(ta), len(tb))
    values = [gromov_product(space, a, b, w) for a, b in zip(ta[-k:], tb[-k:])]
    depth = min(xi.depth(space), eta.depth(space))
    return _stabilized(values, 2.0 * delta + tol, f"({xi.id}|{eta.id})_w", depth, tail)


def chain_infimum(rho: np.ndarray) -> np.ndarray:
    """Largest metric below ``rho``: min-plus closure over chains through the sample.

    Iterated to a fixpoint so the triangle inequality holds exactly in
    floating point.
    """
    d = rho.copy()
    m = d.shape[0]
    while True:
        changed = False
        for k in range(m):
            cand = d[:, k, None] + d[None, k, :]
            better = cand < d
            if better.any():
                d[better] = cand[better]
                changed = True
        if not changed:
            return d


def visual_metric(
    space: MetricSpace,
    sample: list[RayMarker],
    w: str,
    eps: float,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Visual metric on a boundary sample based at ``w``.

    Returns (rho, d): rho(xi, zeta) = exp(-eps * (xi|zeta)_w) from the
    interval midpoints, and d the chain infimum over the sample.  The
    sandwich rho/2 <= d <= rho is asserted.
    """
    upper = min(1.0, 1.0 / (5.0 * delta)) if delta > 0 else 1.0
    if not (0.0 < eps < upper):
        raise ValueError(f"epsilon {eps} outside (0, {upper}) for delta {delta}")
    m = len(sample)
    P = np.full((m, m), math.inf)
    for i, j in itertools.combinations(range(m), 2):
        P[i, j] = P[j, i] = boundary_gromov_product(
            space, sample[i], sample[j], w, delta=delta, tail=tail, tol=tol
        ).mid
    with np.errstate(over="ignore"):
        rho = np.exp(-eps * P)
    np.fill_diagonal(rho, 0.0)
    d = chain_infimum(rho)
    if (d < rho / 2.0 - tol).any() or (d > rho + tol).any():
        i, j = map(int, np.argwhere((d < rho / 2.0 - tol) | (d > rho + tol))[0])
        raise SandwichError(
            f"visual sandwich failed for ({sample[i].id}, {sample[j].id}): "
            f"rho={rho[i, j]:.6g}, d={d[i, j]:.6g}"
        )
    return rho, d


@dataclass
class BoundarySample:
    """A boundary sample with its product intervals and both metrics."""

    markers: tuple[RayMarker, ...]
    base: str
    eps: float
    intervals: dict[tuple[str, str], Interval]
    rho: np.ndarray
    chain: np.ndarray

    @property
    def visual_diameter(self) -> float:
        return float(self.chain.max()) if self.chain.size else 0.0


def boundary_sample(
    space: MetricSpace,
    w: str,
    eps: float,
    *,
    delta: float = 0.0,
    tail: int = 5,
    tol: float = 1e-6,
) -> BoundarySample:
    """Assemble the full boundary sample of a space from its marked rays."""
    markers = tuple(space.rays.values())
    if len(markers) < 2:
        raise ValueError("need at least two marked rays for a boundary sample")
    intervals = {}
    for a, b in itertools.combinations(markers, 2):
        intervals[(a.id, b.id)] = boundary_gromov_product(
            space, a, b, w, delta=delta, tail=tail, tol=tol
        )
    rho, chain = visual_metric(space, list(markers), w, eps, delta=delta, tail=tail, tol=tol)
    return BoundarySample(markers, w, eps, intervals, rho, chain)


def uniformly_perfect_constant(dmat: np.ndarray) -> float:
    """Smallest C >= 1 with B(x,r) \\ B(x, r/C) nonempty whenever the complement of B(x,r) is.

    On a finite sample the binding radii are the realized distances, so C
    is the largest ratio of consecutive distinct distances from any
    center; the value is an estimate from the sample.
    """
    dmat = np.asarray(dmat)
    m = dmat.shape[0]
    if m < 2:
        raise ValueError("uniform perfectness needs at least two points")
    C = 1.0
    for i in range(m):
        ds = np.unique(dmat[i])
        ds = ds[ds > 0.0]
        for small, big in zip(ds, ds[1:]):
            C = max(C, float(big / small))
    return C
