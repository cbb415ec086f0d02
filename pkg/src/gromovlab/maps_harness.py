"""Distortion analysis of maps between spaces.

A map between two spaces is a total assignment of domain vertices to
codomain vertices, optionally with a correspondence between marked rays.
The harness fits rough quasi-isometry constants, samples quasisymmetry
moduli as upper envelopes, checks the quasisimilarity condition on
Whitney-type balls, fits cross-difference and Busemann-product control
functions of the form max{ct, t/c} + c', and measures boundary-fixing
displacement.

Moduli and control constants are existential in the theory, so the
harness reports fitted envelopes and constants for trend analysis
instead of asserting closed forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .busemann import BusemannField, gromov_product_b
from .metric_core import MetricSpace, dist_to_boundary


class MapError(ValueError):
    """Malformed vertex map (partial assignment, unknown vertices or rays)."""


class BoundaryNotFixedError(ValueError):
    """A boundary-fixing precondition failed; carries the offending ray."""


@dataclass
class VertexMap:
    """A correspondence between two spaces' vertices."""

    domain: MetricSpace
    codomain: MetricSpace
    assignment: dict[str, str]
    ray_map: dict[str, str] = field(default_factory=dict)
    fixes_boundary: bool = False

    def __post_init__(self):
        missing = [v for v in self.domain.vertex_ids if v not in self.assignment]
        if missing:
            raise MapError(f"assignment is not total; missing {missing[:3]}...")
        for v, img in self.assignment.items():
            if v not in self.domain or img not in self.codomain:
                raise MapError(f"assignment {v!r} -> {img!r} leaves the spaces")
        for rid, rid2 in self.ray_map.items():
            if rid not in self.domain.rays or rid2 not in self.codomain.rays:
                raise MapError(f"ray correspondence {rid!r} -> {rid2!r} references unknown rays")
        if self.fixes_boundary:
            for rid in self.domain.rays:
                if self.ray_map.get(rid, rid) != rid or rid not in self.codomain.rays:
                    raise MapError(f"map claims to fix the boundary but moves ray {rid!r}")

    def __call__(self, v: str) -> str:
        return self.assignment[v]

    def image_indices(self) -> np.ndarray:
        """Codomain index of the image of each domain vertex, in domain order."""
        return np.array(
            [self.codomain.index_of(self.assignment[v]) for v in self.domain.vertex_ids]
        )

    def image_ray(self, rid: str):
        return self.codomain.rays[self.ray_map.get(rid, rid)]


def identity_map(space: MetricSpace) -> VertexMap:
    return VertexMap(
        space, space, {v: v for v in space.vertex_ids}, {r: r for r in space.rays}, True
    )


def _aligned_matrices(f: VertexMap) -> tuple[np.ndarray, np.ndarray]:
    Dd = f.domain.distances
    img = f.image_indices()
    Dc = f.codomain.distances[np.ix_(img, img)]
    return Dd, Dc


# -- rough quasi-isometry --------------------------------------------------------


@dataclass
class QIFit:
    """Fitted rough quasi-isometry data (lam, mu) with cobounded image."""

    lam: float
    mu: float
    coboundedness: float


def rough_qi_mu(f: VertexMap, lam: float) -> float:
    """Smallest additive constant making f a (lam, mu)-rough quasi-isometric map."""
    Dd, Dc = _aligned_matrices(f)
    return float(max(0.0, (Dc - lam * Dd).max(), (Dd / lam - Dc).max()))


def coboundedness(f: VertexMap) -> float:
    """How far codomain vertices can sit from the image set."""
    img = sorted(set(f.image_indices().tolist()))
    return float(f.codomain.distances[:, img].min(axis=1).max())


def rough_qi_constants(
    f: VertexMap, *, grid: int = 64, lam_max: float = 16.0
) -> QIFit:
    """Fit (lam, mu) over a log-spaced lam grid, then sharpen lam.

    mu(lam) is non-increasing, so the fit takes the minimal mu over the
    grid and returns the exact smallest lam that still achieves it
    (tie-break to smaller lam).
    """
    Dd, Dc = _aligned_matrices(f)
    lams = np.geomspace(1.0, lam_max, grid)
    mus = [max(0.0, float((Dc - lam * Dd).max()), float((Dd / lam - Dc).max())) for lam in lams]
    mu_star = min(mus)
    # exact smallest lam with mu(lam) <= mu_star: per-pair lower bounds
    with np.errstate(divide="ignore", invalid="ignore"):
        need_upper = np.where(
            (Dc - mu_star > 0) & (Dd > 0), (Dc - mu_star) / Dd, 1.0
        )
        need_lower = np.where(Dc + mu_star > 0, Dd / (Dc + mu_star), 1.0)
    lam_star = float(max(1.0, need_upper.max(), need_lower.max()))
    return QIFit(lam_star, rough_qi_mu(f, lam_star), coboundedness(f))


# -- quasisymmetry ----------------------------------------------------------------


@dataclass
class QsEnvelope:
    """Sampled quasisymmetry envelope: T_max over a log-spaced t grid.

    Any increasing majorant of the envelope is a valid modulus; the
    running maximum over increasing t supplies one.
    """

    t_grid: np.ndarray  # bin edges, length m+1
    T_max: np.ndarray  # per-bin maximum of image ratios, length m (nan for empty bins)
    pairs: np.ndarray  # raw (t, T) samples, shape (N, 2)

    @property
    def majorant(self) -> np.ndarray:
        out = np.array(self.T_max)
        run = 0.0
        for i, v in enumerate(out):
            if not np.isnan(v):
                run = max(run, v)
            out[i] = run
        return out

    def majorant_at(self, t: float) -> float:
        """Increasing majorant evaluated at ``t`` (tops out at the global max)."""
        maj = self.majorant
        edges = self.t_grid
        if t >= edges[-1]:
            return float(maj[-1])
        i = int(np.searchsorted(edges, t, side="right")) - 1
        return float(maj[max(0, i)])


def _sample_triples(n: int, limit: int, seed: int) -> np.ndarray:
    if n**3 <= limit:
        trip = np.array(
            [(x, a, b) for x in range(n) for a in range(n) for b in range(n)]
        )
    else:
        rng = np.random.default_rng(seed)
        trip = rng.integers(0, n, size=(limit, 3))
    keep = (trip[:, 0] != trip[:, 2]) & (trip[:, 0] != trip[:, 1])
    return trip[keep]


def quasisymmetry_eta(
    f: VertexMap,
    *,
    triples: int = 200_000,
    seed: int = 0,
    bins: int = 32,
) -> QsEnvelope:
    """Sampled quasisymmetry modulus of f as an upper envelope.

    Over triples (x, a, b) with b != x records
    t = d(x,a)/d(x,b) against T = d'(fx,fa)/d'(fx,fb) and keeps the
    maximum T on a log-spaced t grid.  Requires injectivity on the
    sample (no collapsed denominator).
    """
    Dd, Dc = _aligned_matrices(f)
    trip = _sample_triples(f.domain.n, triples, seed)
    x, a, b = trip[:, 0], trip[:, 1], trip[:, 2]
    den_d = Dd[x, b]
    den_c = Dc[x, b]
    if (den_c == 0.0).any():
        bad = int(np.argmax(den_c == 0.0))
        raise MapError(
            f"map is not injective on the sample: "
            f"{f.domain.vertex_ids[x[bad]]!r} and {f.domain.vertex_ids[b[bad]]!r} collide"
        )
    t = Dd[x, a] / den_d
    T = Dc[x, a] / den_c
    pairs = np.stack([t, T], axis=1)
    pos = t > 0.0
    tpos = t[pos]
    lo, hi = tpos.min(), tpos.max()
    if lo == hi:
        edges = np.array([lo * 0.5, hi * 2.0])
    else:
        edges = np.geomspace(lo, hi, bins + 1)
    T_max = np.full(len(edges) - 1, np.nan)
    which = np.clip(np.searchsorted(edges, tpos, side="right") - 1, 0, len(edges) - 2)
    for i in range(len(edges) - 1):
        sel = which == i
        if sel.any():
            T_max[i] = T[pos][sel].max()
    return QsEnvelope(edges, T_max, pairs)


# -- quasisimilarity ---------------------------------------------------------------


@dataclass
class QsimReport:
    """Per-center scale factors on Whitney balls, with violations listed."""

    L: float
    lam_frac: float
    scales: dict[str, float]
    violations: list[tuple[str, str, str, float]]  # (center, z, y, ratio)
    skipped: list[str]
    passed: bool


def quasisimilarity_check(
    f: VertexMap,
    L: float,
    lam_frac: float,
    tol: float = 1e-9,
    boundary_dist=None,
) -> QsimReport:
    """On each ball B(x, lam_frac*d(x)) fit a scale c_x and check ratios stay within [c_x/L, L c_x].

    c_x is the geometric mean of the image/source distance ratios on the
    ball; centers whose ball holds fewer than two other vertices are
    skipped and reported.  ``boundary_dist`` (vector in domain vertex
    order) overrides the graph boundary distance, for domains whose
    boundary distance is an estimate rather than a marked vertex set.
    """
    if boundary_dist is None and not f.domain.boundary:
        raise MapError("quasisimilarity needs boundary distances in the domain")
    Dd, Dc = _aligned_matrices(f)
    ids = f.domain.vertex_ids
    scales: dict[str, float] = {}
    violations = []
    skipped = []
    for ix, x in enumerate(ids):
        d_x = (
            float(boundary_dist[ix]) if boundary_dist is not None else dist_to_boundary(f.domain, x)
        )
        radius = lam_frac * d_x
        ball = [i for i in range(len(ids)) if i != ix and Dd[ix, i] < radius]
        pairs = [
            (i, j) for i, j in itertools.combinations(ball, 2) if Dd[i, j] > 0.0
        ]
        if len(ball) < 2 or not pairs:
            skipped.append(x)
            continue
        ratios = np.array([Dc[i, j] / Dd[i, j] for i, j in pairs])
        c_x = float(np.exp(np.log(ratios).mean()))
        scales[x] = c_x
        for (i, j), r in zip(pairs, ratios):
            if not (c_x / L - tol <= r <= L * c_x + tol):
                violations.append((x, ids[i], ids[j], float(r)))
    return QsimReport(L, lam_frac, scales, violations, skipped, not violations)


# -- control-function fits -----------------------------------------------------------


@dataclass
class ControlFit:
    """theta(t) = max{c t, t/c} + c' fitted over sampled differences."""

    c: float
    cprime: float

    def theta(self, t: float) -> float:
        return max(self.c * t, t / self.c) + self.cprime


def _theta_slack(c: float, t: np.ndarray, T: np.ndarray) -> float:
    """Smallest c' with T <= theta_c(t) + c' over the samples."""
    theta = np.where(t >= 0.0, c * t, t / c)
    return float(max(0.0, (T - theta).max()))


def fit_control(t: np.ndarray, T: np.ndarray, *, grid: int = 64, c_max: float = 16.0) -> ControlFit:
    """Fit minimal (c, c') with T <= max{ct, t/c} + c' over the samples.

    c'(c) is non-increasing, so the fit finds the minimal c' over a log
    grid and then the exact smallest c still achieving it.
    """
    cs = np.geomspace(1.0, c_max, grid)
    slacks = [_theta_slack(c, t, T) for c in cs]
    cp = min(slacks)
    # exact smallest feasible c at this c'; every binding constraint is a
    # lower bound on c (for t < 0 and T - c' < 0, t/c >= T - c' flips to
    # c >= t/(T - c'))
    lower = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = (t > 0.0) & (T - cp > 0.0)
        if pos.any():
            lower = max(lower, float(((T - cp) / t)[pos].max()))
        neg = (t < 0.0) & (T - cp < 0.0)
        if neg.any():
            lower = max(lower, float((t / (T - cp))[neg].max()))
    return ControlFit(lower, _theta_slack(lower, t, T))


def _sample_quads(n: int, limit: int, seed: int) -> np.ndarray:
    if n**4 <= limit:
        rng_all = np.array(
            list(itertools.product(range(n), repeat=4)), dtype=np.int64
        )
        return rng_all
    rng = np.random.default_rng(seed)
    return rng.integers(0, n, size=(limit, 4))


def cross_difference_control(
    f: VertexMap, *, quads: int = 100_000, seed: int = 0
) -> ControlFit:
    """Control of image cross-differences by source cross-differences.

    Over sampled quadruples with nonnegative cross-difference, fits the
    minimal theta(t) = max{ct, t/c} + c' bounding the image value both
    ways.
    """
    Dd, Dc = _aligned_matrices(f)
    q = _sample_quads(f.domain.n, quads, seed)
    x, y, z, u = q[:, 0], q[:, 1], q[:, 2], q[:, 3]

    def cross(D):
        return 0.5 * ((D[x, z] + D[y, u]) - (D[x, y] + D[z, u]))

    t = cross(Dd)
    T = cross(Dc)
    keep = t >= 0.0
    t, T = t[keep], T[keep]
    # two-sided: T <= theta(t) and t/c - c' <= T, i.e. -T <= theta(-t)
    ts = np.concatenate([t, -t])
    Ts = np.concatenate([T, -T])
    return fit_control(ts, Ts)


def busemann_product_control(
    f: VertexMap,
    field_dom: BusemannField,
    field_cod: BusemannField,
    *,
    triples: int = 60_000,
    seed: int = 0,
    max_offset: float | None = None,
) -> ControlFit:
    """Control of b'-product differences by b-product differences under f.

    Checks first that f carries the tail of the base ray into a bounded
    neighbourhood of the marked codomain ray, then fits theta with
    (fx|fz)_{b'} - (fx|fy)_{b'} <= theta((x|z)_b - (x|y)_b) over sampled
    triples.
    """
    ray = field_dom.ray
    ray2 = f.image_ray(ray.id)
    if max_offset is None:
        fit = rough_qi_constants(f)
        max_offset = fit.mu + f.codomain.max_edge_length
    Dc = f.codomain.distances
    line = [f.codomain.index_of(v) for v in ray2.path]
    for z in ray.tail():
        off = float(Dc[f.codomain.index_of(f(z)), line].min())
        if off > max_offset + 1e-9:
            raise BoundaryNotFixedError(
                f"image of ray {ray.id!r} strays {off:.3g} from ray {ray2.id!r} "
                f"(allowed {max_offset:.3g})"
            )
    n = f.domain.n
    trip = _sample_triples(n, triples, seed)
    ids = f.domain.vertex_ids
    t_vals, T_vals = [], []
    for x, y, z in trip:
        vx, vy, vz = ids[x], ids[y], ids[z]
        t_vals.append(
            gromov_product_b(field_dom, vx, vz) - gromov_product_b(field_dom, vx, vy)
        )
        T_vals.append(
            gromov_product_b(field_cod, f(vx), f(vz))
            - gromov_product_b(field_cod, f(vx), f(vy))
        )
    return fit_control(np.array(t_vals), np.array(T_vals))


# -- displacement ----------------------------------------------------------------


@dataclass
class DisplacementReport:
    """Sup displacement of a boundary-fixing self-map, with its context constants."""

    displacement: float
    argmax: str
    qi: QIFit
    context: dict = field(default_factory=dict)


def verify_fixes_boundary(f: VertexMap, *, tail: int = 5, tol: float | None = None) -> None:
    """Each marked ray's tail must map within the measured additive constant of the same ray."""
    if not f.fixes_boundary:
        raise BoundaryNotFixedError("map does not claim to fix the boundary")
    fit = rough_qi_constants(f)
    allowed = (fit.mu + f.codomain.max_edge_length) if tol is None else tol
    Dc = f.codomain.distances
    for rid, ray in f.domain.rays.items():
        target = f.codomain.rays[rid]
        line = [f.codomain.index_of(v) for v in target.path]
        for z in ray.tail(tail):
            off = float(Dc[f.codomain.index_of(f(z)), line].min())
            if off > allowed + 1e-9:
                raise BoundaryNotFixedError(
                    f"ray {rid!r}: image of tail vertex {z!r} strays {off:.3g} "
                    f"(allowed {allowed:.3g}); boundary is not fixed"
                )


def teichmuller_displacement(
    f: VertexMap, *, tail: int = 5, context: dict | None = None
) -> DisplacementReport:
    """Sup displacement max d(x, f(x)) of a verified boundary-fixing self-map.

    The theory bounds it by a constant depending only on (delta, K, C,
    lam, mu); the report carries those so displacement trends can be
    studied across a family.
    """
    if f.domain is not f.codomain and f.domain.vertex_ids != f.codomain.vertex_ids:
        raise MapError("displacement needs a self-map")
    verify_fixes_boundary(f, tail=tail)
    fit = rough_qi_constants(f)
    D = f.domain.distances
    img = f.image_indices()
    disp = D[np.arange(f.domain.n), img]
    i = int(np.argmax(disp))
    ctx = dict(context or {})
    ctx.update({"lam": fit.lam, "mu": fit.mu})
    return DisplacementReport(float(disp[i]), f.domain.vertex_ids[i], fit, ctx)
