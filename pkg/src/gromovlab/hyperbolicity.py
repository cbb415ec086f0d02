"""Gromov products, four-point hyperbolicity constants, and thin-triangle checks."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

warnings.filterwarnings("ignore", message=".*TBB.*")  # threading-layer fallback is fine
from numba import njit, prange  # noqa: E402

from .metric_core import MetricSpace, geodesic

#: exhaustive quadruple scan is used while |V|^4 stays below this
DEFAULT_BUDGET = 1 << 26


def gromov_product(space: MetricSpace, x: str, y: str, w: str) -> float:
    """(x|y)_w = [d(x,w) + d(y,w) - d(x,y)] / 2; how long geodesics from w to x and y fellow-travel."""
    D = space.distances
    ix, iy, iw = space.index_of(x), space.index_of(y), space.index_of(w)
    return max(0.0, 0.5 * ((D[ix, iw] + D[iy, iw]) - D[ix, iy]))


def cross_difference(space: MetricSpace, x: str, y: str, z: str, u: str) -> float:
    """<x,y,z,u> = [d(x,z) + d(y,u) - d(x,y) - d(z,u)] / 2.

    The grouping below makes the antisymmetry <x,y,z,u> = -<x,z,y,u>
    exact in floating point, not just up to rounding.
    """
    D = space.distances
    ix, iy, iz, iu = (space.index_of(v) for v in (x, y, z, u))
    return 0.5 * ((D[ix, iz] + D[iy, iu]) - (D[ix, iy] + D[iz, iu]))


def quadruple_defect(space: MetricSpace, w: str, x: str, y: str, z: str) -> float:
    """Four-point defect min((x|z)_w, (z|y)_w) - (x|y)_w of one ordered quadruple."""
    return min(gromov_product(space, x, z, w), gromov_product(space, z, y, w)) - gromov_product(
        space, x, y, w
    )


@dataclass
class HyperbolicityReport:
    """Result of a four-point scan; ``witness`` is (w, x, y, z) reproducing ``delta``."""

    delta: float
    witness: tuple[str, str, str, str]
    exhaustive: bool
    lower_bound: bool
    quadruples: int
    seed: int | None = None
    rips_delta: float | None = None
    tripod_4delta_ok: bool | None = None


@njit(cache=True, parallel=True)
def _subset_scan(D):
    # per-first-index maxima of (largest pairing sum - second largest)/2
    # over 4-subsets i<j<k<l; independent slots keep the reduction
    # deterministic for any thread count
    n = D.shape[0]
    best = np.zeros(n, dtype=np.float64)
    wit = np.full((n, 3), -1, dtype=np.int64)
    for i in prange(n):
        bi = 0.0
        w0 = -1
        w1 = -1
        w2 = -1
        for j in range(i + 1, n):
            dij = D[i, j]
            for k in range(j + 1, n):
                dik = D[i, k]
                djk = D[j, k]
                for l in range(k + 1, n):
                    a = dij + D[k, l]
                    b = dik + D[j, l]
                    c = D[i, l] + djk
                    if a < b:
                        a, b = b, a
                    if b < c:
                        b, c = c, b
                    if a < b:
                        a, b = b, a
                    d = 0.5 * (a - b)
                    if d > bi:
                        bi = d
                        w0 = j
                        w1 = k
                        w2 = l
        best[i] = bi
        wit[i, 0] = w0
        wit[i, 1] = w1
        wit[i, 2] = w2
    return best, wit


def _subset_defects(D: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """(largest - second largest)/2 of the three pairing sums, per index row."""
    a = D[quads[:, 0], quads[:, 1]] + D[quads[:, 2], quads[:, 3]]
    b = D[quads[:, 0], quads[:, 2]] + D[quads[:, 1], quads[:, 3]]
    c = D[quads[:, 0], quads[:, 3]] + D[quads[:, 1], quads[:, 2]]
    s = np.sort(np.stack([a, b, c]), axis=0)
    return 0.5 * (s[2] - s[1])


def _ordered_witness(space: MetricSpace, subset: tuple[int, ...]) -> tuple[float, tuple[str, ...]]:
    """Best ordered quadruple (w,x,y,z) of a 4-subset, smallest tuple on ties."""
    ids = [space.vertex_ids[i] for i in sorted(subset)]
    best = -np.inf
    best_tuple = None
    for perm in itertools.permutations(ids):
        w, x, y, z = perm
        d = quadruple_defect(space, w, x, y, z)
        if d > best or (d == best and (best_tuple is None or perm < best_tuple)):
            best = d
            best_tuple = perm
    return best, best_tuple


def delta_four_point(
    space: MetricSpace,
    *,
    budget: int = DEFAULT_BUDGET,
    samples: int = 200_000,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> HyperbolicityReport:
    """Four-point hyperbolicity constant.

    delta = max over quadruples (w,x,y,z) of
    max(0, min((x|z)_w, (z|y)_w) - (x|y)_w), via the equivalent pairing-sum
    form on 4-subsets.  Exhaustive while |V|^4 <= ``budget`` (or forced);
    otherwise a seeded uniform sample is scanned and the result is flagged
    as a lower bound.
    """
    n = space.n
    D = np.asarray(space.distances)
    if n < 4:
        v = space.vertex_ids[0]
        return HyperbolicityReport(0.0, (v, v, v, v), True, False, 0)
    run_exhaustive = exhaustive if exhaustive is not None else n**4 <= budget
    if run_exhaustive:
        best, wit = _subset_scan(D)
        i = int(np.argmax(best))
        delta = float(best[i])
        if delta == 0.0:
            subset = (0, 1, 2, 3)
        else:
            subset = (i, int(wit[i, 0]), int(wit[i, 1]), int(wit[i, 2]))
        defect, witness = _ordered_witness(space, subset)
        total = n * (n - 1) * (n - 2) * (n - 3) // 24
        return HyperbolicityReport(max(0.0, defect), witness, True, False, total)

    rng = np.random.default_rng(seed)
    quads = rng.integers(0, n, size=(samples, 4))
    defects = _subset_defects(D, quads)
    i = int(np.argmax(defects))
    subset = tuple(int(v) for v in quads[i])
    if len(set(subset)) < 4 or defects[i] <= 0.0:
        subset = tuple(sorted(set(subset) | {0, 1, 2, 3}))[:4]
    defect, witness = _ordered_witness(space, subset)
    return HyperbolicityReport(
        max(0.0, defect), witness, False, True, samples, seed=seed
    )


@dataclass
class RipsReport:
    """Triangle thinness over a seeded vertex sample."""

    thinness: float
    tripod_4delta_ok: bool
    tripod_worst: float
    delta: float
    slack: float
    triangles: int
    witness: tuple[str, str, str] | None = None


def rips_thinness(
    space: MetricSpace,
    *,
    delta: float | None = None,
    max_vertices: int = 64,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> RipsReport:
    """Max distance from a triangle side to the union of the other two sides.

    Also pairs points equidistant from each corner on the two adjacent
    sides (the tripod identification) and checks their gap against
    4*delta plus mesh slack.
    """
    if delta is None:
        delta = delta_four_point(space, budget=budget, seed=seed).delta
    n = space.n
    D = space.distances
    if n <= max_vertices:
        sample = list(space.vertex_ids)
    else:
        rng = np.random.default_rng(seed)
        idx = rng.choice(n, size=max_vertices, replace=False)
        sample = sorted(space.vertex_ids[i] for i in idx)

    paths: dict[tuple[str, str], list[int]] = {}

    def side(a: str, b: str) -> list[int]:
        key = (a, b) if a <= b else (b, a)
        if key not in paths:
            paths[key] = [space.index_of(v) for v in geodesic(space, *key).vertices]
        return paths[key]

    mesh = space.max_edge_length
    slack = 2.0 * mesh
    thin = 0.0
    worst_pair = 0.0
    witness = None
    count = 0
    for x, y, z in itertools.combinations(sample, 3):
        count += 1
        sides = {(x, y): side(x, y), (y, z): side(y, z), (z, x): side(z, x)}
        for (a, b), pts in sides.items():
            others = [i for key, p in sides.items() if key != (a, b) for i in p]
            gap = float(D[np.ix_(pts, others)].min(axis=1).max())
            if gap > thin:
                thin = gap
                witness = (x, y, z)
        # tripod pairing at each corner; half the mesh covers vertex
        # rounding along a discrete side
        for corner, (p, q) in ((x, (y, z)), (y, (z, x)), (z, (x, y))):
            ic = space.index_of(corner)
            prod = gromov_product(space, p, q, corner)
            sa = side(corner, p)
            sb = side(corner, q)
            ra = [i for i in sa if D[ic, i] <= prod + 0.5 * mesh]
            rb = [i for i in sb if D[ic, i] <= prod + 0.5 * mesh]
            for i in ra:
                j = min(rb, key=lambda jj: abs(D[ic, jj] - D[ic, i]))
                if abs(D[ic, j] - D[ic, i]) <= mesh:
                    worst_pair = max(worst_pair, float(D[i, j]))
    ok = worst_pair <= 4.0 * delta + slack + 1e-9
    return RipsReport(thin, ok, worst_pair, delta, slack, count, witness)
