"""Conformal deformation by the Busemann density and its verification suite.

The density rho_eps = e^{-eps*b} reweights every edge by the trapezoid
rule (endpoint average); shortest paths under the deformed weights give
the unbounded uniformized metric d_eps.  The checks below measure the
Harnack inequality of the density, the Gehring-Hayman property of base
geodesics, the uniformity (quasiconvexity + cigar) constants, the
two-sided comparison of boundary distance with the density, and the
identification of marked rays with ideal boundary points.

Every "up to an additive constant" relation is checked as
|lhs - rhs| <= c + slack with slack = mesh + 2*(b stabilization) + 2*delta,
and the slack is always reported.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .busemann import BusemannField, default_epsilon, gromov_product_b_matrix
from .metric_core import MetricSpace, RayMarker, geodesic, path_length
from .report import CheckResult


class EpsilonRangeError(ValueError):
    """Deformation parameter outside (0, default_epsilon(delta)]."""


class OneBoundaryPointError(ValueError):
    """No rays besides the base ray: the boundary at infinity has one point."""


@dataclass
class DeformedSpace:
    """A space deformed by rho_eps = e^{-eps*b}, with its boundary data."""

    base: MetricSpace
    eps: float
    field: BusemannField
    density: np.ndarray  # rho_eps per vertex, base vertex order
    space: MetricSpace  # same graph under trapezoid-deformed weights
    boundary_rays: tuple[RayMarker, ...]  # non-base rays; the base ray marks infinity
    _bdist: np.ndarray | None = None

    @property
    def distances(self) -> np.ndarray:
        """The deformed metric d_eps."""
        return self.space.distances

    @property
    def mesh(self) -> float:
        return self.base.max_edge_length

    @property
    def slack(self) -> float:
        """Additive slack for all approximate identities on this space."""
        return self.mesh + 2.0 * self.field.error

    def rho(self, x: str) -> float:
        return float(self.density[self.base.index_of(x)])


def deform(
    space: MetricSpace,
    field: BusemannField,
    eps: float,
    *,
    delta: float = 0.0,
    mesh: float = 1.0,
) -> DeformedSpace:
    """Deform ``space`` by the density e^{-eps*b} with trapezoid edge weights."""
    if not (0.0 < eps <= default_epsilon(delta) + 1e-12):
        raise EpsilonRangeError(
            f"epsilon {eps} outside (0, {default_epsilon(delta):.4g}] for delta {delta}"
        )
    worst = space.max_edge_length
    if worst > mesh * (1.0 + 1e-12):
        warnings.warn(
            f"max edge length {worst:.3g} exceeds mesh {mesh:.3g}; "
            "trapezoid density weights lose accuracy",
            stacklevel=2,
        )
    rho = np.exp(-eps * field.b)
    idx = space.index_of
    new_edges = [
        (u, v, w * 0.5 * (rho[idx(u)] + rho[idx(v)])) for u, v, w in space.edges
    ]
    deformed = MetricSpace(space.vertex_ids, new_edges, space.boundary)
    others = tuple(r for r in space.rays.values() if r.id != field.ray.id)
    return DeformedSpace(space, eps, field, rho, deformed, others)


def deformed_length(ds: DeformedSpace, vertices) -> float:
    """Length of a base-space walk under the deformed weights."""
    return path_length(ds.space, vertices)


# -- boundary distance -------------------------------------------------------


def boundary_distances(ds: DeformedSpace) -> np.ndarray:
    """Per-vertex estimate of the d_eps distance to the ideal boundary.

    For each non-base ray, the distance to its deepest vertex plus the
    geometric tail bound rho(z_N)/eps that dominates the remaining
    Cauchy tail of the ray; the minimum over rays is the estimate.
    """
    if ds._bdist is None:
        if not ds.boundary_rays:
            raise OneBoundaryPointError("boundary at infinity has one point")
        D = ds.distances
        cols, tails = [], []
        for r in ds.boundary_rays:
            i = ds.base.index_of(r.tip)
            cols.append(i)
            tails.append(ds.density[i] / ds.eps)
        est = D[:, cols] + np.asarray(tails)[None, :]
        ds._bdist = est.min(axis=1)
        ds._bdist.setflags(write=False)
    return ds._bdist


def boundary_distance(ds: DeformedSpace, x: str) -> float:
    """d_eps(x): estimated deformed distance from x to the ideal boundary."""
    return float(boundary_distances(ds)[ds.base.index_of(x)])


def density_boundary_check(
    ds: DeformedSpace, delta: float, K: float | None = None, tol: float = 1e-9
) -> list[CheckResult]:
    """Two-sided comparison of d_eps(x) with rho_eps(x).

    Lower bound rho/(2 eps e^{10 eps delta'}) holds unconditionally; the
    upper bound (e^{16 eps delta'}/eps)(2 e^{eps K} - 1) rho needs the
    rough-starlikeness constant K of the base point at infinity.
    """
    eps = ds.eps
    dprime = delta + ds.field.error
    est = boundary_distances(ds)
    lower = ds.density / (2.0 * eps * math.exp(10.0 * eps * dprime))
    worst_low = float((est / lower).min())
    out = [
        CheckResult(
            "density_boundary_lower",
            bound=1.0,
            measured=worst_low,
            slack=0.0,
            passed=worst_low >= 1.0 - tol,
        )
    ]
    if K is not None:
        factor = math.exp(16.0 * eps * dprime) / eps * (2.0 * math.exp(eps * K) - 1.0)
        upper = factor * ds.density * (1.0 + ds.slack)
        worst_up = float((est / upper).max())
        out.append(
            CheckResult(
                "density_boundary_upper",
                bound=1.0,
                measured=worst_up,
                slack=ds.slack,
                passed=worst_up <= 1.0 + tol,
                details={"K": K},
            )
        )
    return out


# -- density and geodesic checks ---------------------------------------------


def harnack_check(ds: DeformedSpace, delta: float, tol: float = 1e-9) -> CheckResult:
    """Harnack margins eps*(d(x,y) + 10 delta') - |log rho(x) - log rho(y)| >= 0 over all pairs."""
    eps = ds.eps
    dprime = delta + ds.field.error
    b = ds.field.b
    D = ds.base.distances
    gap = np.abs(b[:, None] - b[None, :])  # |log rho| differences are eps * this
    margins = eps * (D + 10.0 * dprime - gap)
    worst = float(margins.min())
    i, j = map(int, np.unravel_index(np.argmin(margins), margins.shape))
    return CheckResult(
        "harnack",
        bound=0.0,
        measured=worst,
        slack=10.0 * eps * dprime,
        passed=worst >= -tol,
        details={"pair": (ds.base.vertex_ids[i], ds.base.vertex_ids[j])},
    )


def _sample_pairs(n: int, limit: int, seed: int) -> list[tuple[int, int]]:
    total = n * (n - 1) // 2
    if total <= limit:
        return list(itertools.combinations(range(n), 2))
    rng = np.random.default_rng(seed)
    flat = np.sort(rng.choice(total, size=limit, replace=False))
    starts = np.array([i * (2 * n - i - 1) // 2 for i in range(n - 1)])
    rows = np.searchsorted(starts, flat, side="right") - 1
    return [(int(i), int(f - starts[i] + i + 1)) for i, f in zip(rows, flat)]


def gehring_hayman_check(
    ds: DeformedSpace,
    delta: float,
    *,
    pairs: int = 1500,
    seed: int = 0,
    rel_slack: float = 0.1,
    tol: float = 1e-9,
) -> CheckResult:
    """Worst ratio of deformed base-geodesic length to d_eps over sampled pairs.

    Base geodesics stay essentially shortest after deformation:
    the ratio is at most 20 e^{20 eps delta'} (plus relative slack), and
    at least 1 exactly since d_eps is a path infimum.
    """
    eps = ds.eps
    dprime = delta + ds.field.error
    D_eps = ds.distances
    worst = 1.0
    witness = None
    for i, j in _sample_pairs(ds.base.n, pairs, seed):
        x, y = ds.base.vertex_ids[i], ds.base.vertex_ids[j]
        ell = deformed_length(ds, geodesic(ds.base, x, y).vertices)
        ratio = ell / D_eps[i, j]
        if ratio < 1.0 - tol:
            raise AssertionError(f"geodesic beat the shortest path for ({x!r}, {y!r})")
        if ratio > worst:
            worst = ratio
            witness = (x, y)
    bound = 20.0 * math.exp(20.0 * eps * dprime)
    return CheckResult(
        "gehring_hayman",
        bound=bound,
        measured=worst,
        slack=rel_slack,
        passed=worst <= bound * (1.0 + rel_slack) + tol,
        details={"pair": witness},
    )


@dataclass
class UniformityReport:
    """Quasiconvexity and cigar constants of deformed base geodesics."""

    quasiconvexity: float
    cigar: float
    cigar_bound: float
    slack: float
    passed: bool
    witness: tuple[str, str] | None = None

    def rows(self):
        return [
            CheckResult(
                "uniformity_quasiconvexity",
                bound=self.cigar_bound,
                measured=self.quasiconvexity,
                slack=self.slack,
                passed=True,
            ),
            CheckResult(
                "uniformity_cigar",
                bound=self.cigar_bound,
                measured=self.cigar,
                slack=self.slack,
                passed=self.passed,
            ),
        ]


def uniformity_constants(
    ds: DeformedSpace,
    delta: float,
    *,
    pairs: int = 800,
    seed: int = 0,
    rel_slack: float = 0.1,
    tol: float = 1e-9,
) -> UniformityReport:
    """Uniform-arc constants of deformed base geodesics.

    A1 = max length/endpoint-distance; A2 = max over interior points of
    the shorter half length over the boundary distance.  A2 is compared
    with the deformation bound 2 e^{26 eps delta'}.
    """
    eps = ds.eps
    dprime = delta + ds.field.error
    D_eps = ds.distances
    bdist = boundary_distances(ds)
    idx = ds.base.index_of
    a1 = 1.0
    a2 = 0.0
    witness = None
    for i, j in _sample_pairs(ds.base.n, pairs, seed):
        x, y = ds.base.vertex_ids[i], ds.base.vertex_ids[j]
        verts = geodesic(ds.base, x, y).vertices
        ws = [ds.space.edge_length(u, v) for u, v in zip(verts, verts[1:])]
        total = sum(ws)
        a1 = max(a1, total / D_eps[i, j])
        run = 0.0
        for t, v in enumerate(verts):
            left = run
            right = total - run
            if t < len(ws):
                run += ws[t]
            ratio = min(left, right) / bdist[idx(v)]
            if ratio > a2:
                a2 = ratio
                witness = (x, y)
    bound = 2.0 * math.exp(26.0 * eps * dprime)
    return UniformityReport(
        a1, a2, bound, rel_slack, a2 <= bound * (1.0 + rel_slack) + tol, witness
    )


def product_formula_constant(ds: DeformedSpace) -> float:
    """Empirical two-sided constant between d_eps and the Busemann-product formula.

    Compares d_eps(x,y) with (1/eps) e^{-eps (x|y)_b} (1 ^ eps d(x,y))
    over all off-diagonal pairs and returns the worst multiplicative gap;
    the theory makes it bounded in terms of delta alone, so the value
    should be stable across space sizes.
    """
    eps = ds.eps
    D = ds.base.distances
    P = gromov_product_b_matrix(ds.field)
    formula = (1.0 / eps) * np.exp(-eps * P) * np.minimum(1.0, eps * D)
    off = ~np.eye(ds.base.n, dtype=bool)
    r = formula[off] / ds.distances[off]
    return float(max(r.max(), (1.0 / r).max()))


# -- ideal boundary convergence ----------------------------------------------


def boundary_convergence_check(
    ds: DeformedSpace, *, rate_tol: float = 0.05, tol: float = 1e-9
) -> list[CheckResult]:
    """Marked rays converge correctly in d_eps.

    Along the base ray d_eps(o, z_t) grows without bound at the geometric
    rate e^{eps} per unit base length.  Along every other ray the
    post-branch gaps decay at rate e^{-eps} (the pre-branch stretch runs
    toward the base point, where the density still grows, so only the
    tail past argmin(b) is measured; rays branching too close to their
    tip are skipped and counted).  Distinct rays keep a positive gap:
    equal-depth gap sequences increase toward the limit separation, so a
    positive final gap certifies distinct limit points.
    """
    eps = ds.eps
    D_eps = ds.distances
    idx = ds.base.index_of
    D = ds.base.distances
    b = ds.field.b
    out = []

    ray = ds.field.ray
    io = idx(ray.base)
    vals = [float(D_eps[io, idx(z)]) for z in ray.path]
    arcs = [float(D[io, idx(z)]) for z in ray.path]
    if any(hi <= lo + tol for lo, hi in zip(vals, vals[1:])):
        out.append(CheckResult("boundary_growth", rate_tol, math.inf, rate_tol, False))
    else:
        gaps = np.diff(vals)
        steps = np.diff(arcs)
        rates = (gaps[1:] / gaps[:-1]) ** (1.0 / steps[1:])
        err = float(np.abs(rates / math.exp(eps) - 1.0).max()) if len(rates) else 0.0
        out.append(
            CheckResult(
                "boundary_growth",
                bound=rate_tol,
                measured=err,
                slack=rate_tol,
                passed=err <= rate_tol,
                details={"ray": ray.id, "rate": math.exp(eps)},
            )
        )

    worst = 0.0
    checked = skipped = 0
    for r in ds.boundary_rays:
        pts = [idx(z) for z in r.path]
        t0 = int(np.argmin([b[p] for p in pts]))
        pts = pts[t0:]
        if len(pts) < 4:  # need three gaps for two rate samples
            skipped += 1
            continue
        checked += 1
        gaps = np.array([D_eps[a, c] for a, c in zip(pts, pts[1:])])
        steps = np.diff([float(D[pts[0], p]) for p in pts])
        rates = (gaps[1:] / gaps[:-1]) ** (1.0 / steps[1:])
        worst = max(worst, float(np.abs(rates / math.exp(-eps) - 1.0).max()))
    out.append(
        CheckResult(
            "boundary_decay",
            bound=rate_tol,
            measured=worst,
            slack=rate_tol,
            passed=worst <= rate_tol and checked > 0,
            details={"checked": checked, "skipped": skipped},
        )
    )

    if len(ds.boundary_rays) >= 2:
        ok = True
        worst_gap = math.inf
        for r1, r2 in itertools.combinations(ds.boundary_rays, 2):
            k = min(len(r1.path), len(r2.path))
            g = [
                float(D_eps[idx(a), idx(c)])
                for a, c in zip(r1.path[-k:], r2.path[-k:])
            ]
            final = g[-1]
            worst_gap = min(worst_gap, final)
            # increasing tail => the limit separation is at least the final gap
            if final <= tol or (len(g) >= 2 and final < g[-2] - tol):
                ok = False
        out.append(
            CheckResult(
                "boundary_separation",
                bound=0.0,
                measured=worst_gap,
                slack=0.0,
                passed=ok,
            )
        )
    return out


# -- strong cigar arcs ---------------------------------------------------------


@dataclass
class CigarArcReport:
    """Strong-cigar constant of an arc: diameters instead of lengths."""

    constant: float
    quasiconvex_part: float
    cigar_part: float
    witness: str | None = None


def strong_cigar_check(space: MetricSpace, arc, boundary_dist=None) -> CigarArcReport:
    """Strong-cigar constant of an arc in a space with boundary.

    max of diam(arc)/d(endpoints) and, over interior points z, of
    min(diam(arc[x..z]), diam(arc[z..y]))/d(z), with diameters over arc
    vertices and d the boundary distance.  ``boundary_dist`` (vector in
    vertex order) overrides the graph boundary distance for deformed
    spaces whose boundary distance is an estimate.
    """
    from .metric_core import dist_to_boundary

    verts = list(arc.vertices) if hasattr(arc, "vertices") else list(arc)
    if len(verts) < 2 or verts[0] == verts[-1]:
        raise ValueError("arc endpoints must be distinct")
    idx = [space.index_of(v) for v in verts]
    D = space.distances
    end_d = float(D[idx[0], idx[-1]])
    if end_d <= 0.0:
        raise ValueError("arc endpoints coincide metrically")

    def diam(sel):
        return float(D[np.ix_(sel, sel)].max()) if len(sel) > 1 else 0.0

    quasi = diam(idx) / end_d
    cigar = 0.0
    witness = None
    for t, v in enumerate(verts):
        half = min(diam(idx[: t + 1]), diam(idx[t:]))
        dz = (
            float(boundary_dist[space.index_of(v)])
            if boundary_dist is not None
            else dist_to_boundary(space, v)
        )
        if dz <= 0.0:
            continue
        if half / dz > cigar:
            cigar = half / dz
            witness = v
    return CigarArcReport(max(quasi, cigar), quasi, cigar, witness)


# -- (de)serialization ---------------------------------------------------------


def deformed_to_dict(ds: DeformedSpace) -> dict:
    from .metric_core import space_to_dict

    return {
        "space": space_to_dict(ds.base),
        "epsilon": ds.eps,
        "ray": ds.field.ray.id,
        "base": ds.field.base,
        "stabilization_error": ds.field.error,
        "busemann": {v: float(ds.field.b[i]) for i, v in enumerate(ds.base.vertex_ids)},
        "density": {v: float(ds.density[i]) for i, v in enumerate(ds.base.vertex_ids)},
    }


def load_deformed(source) -> DeformedSpace:
    import json as _json

    from .metric_core import load_space

    if isinstance(source, dict):
        data = source
    else:
        with open(source) as fh:
            data = _json.load(fh)
    space = load_space(data["space"])
    ray = space.rays[data["ray"]]
    b = np.array([data["busemann"][v] for v in space.vertex_ids])
    fld = BusemannField(space, ray, data["base"], b, float(data["stabilization_error"]))
    # delta=0 admits every epsilon the original deform() accepted
    return deform(space, fld, float(data["epsilon"]), delta=0.0)
