"""Finite weighted-graph model of a metric space.

Vertices are opaque string ids; edges carry positive lengths; the metric
is the exact shortest-path distance.  An optional subset of vertices is
marked as the metric boundary (the space is "non-complete" when it is
nonempty), and geodesic rays marked on the space stand in for points at
infinity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

#: default absolute tolerance for metric comparisons
TOL = 1e-9


class SpaceError(ValueError):
    """Malformed space data (bad edges, unknown vertices, invalid rays)."""


class DisconnectedError(SpaceError):
    """The graph is not connected; carries one unreachable pair."""

    def __init__(self, u: str, v: str):
        self.pair = (u, v)
        super().__init__(f"graph is disconnected: no path joins {u!r} and {v!r}")


class CompleteSpaceError(SpaceError):
    """Raised by boundary-distance queries when the space has no boundary."""


@dataclass(frozen=True)
class Path:
    """A vertex walk together with its length in the ambient metric."""

    vertices: tuple[str, ...]
    length: float

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class RayMarker:
    """A marked geodesic ray representing a point at infinity.

    ``path`` starts at ``base`` and lists successive ray vertices; the
    distances d(base, z_i) must increase and be additive along the ray
    (geodesity), which :meth:`validate` checks against the space.
    """

    id: str
    base: str
    path: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        if len(self.path) < 2:
            raise SpaceError(f"ray {self.id!r} needs at least two vertices")
        if self.path[0] != self.base:
            raise SpaceError(f"ray {self.id!r} path must start at its base {self.base!r}")
        if len(set(self.path)) != len(self.path):
            raise SpaceError(f"ray {self.id!r} repeats a vertex")

    @property
    def points(self) -> tuple[str, ...]:
        """Ray vertices past the base."""
        return self.path[1:]

    @property
    def tip(self) -> str:
        return self.path[-1]

    def tail(self, k: int = 5) -> tuple[str, ...]:
        """The last ``k`` ray vertices (fewer when the ray is short)."""
        pts = self.points
        return pts[-k:] if len(pts) >= k else pts

    def depth(self, space: "MetricSpace") -> float:
        return space.dist(self.base, self.tip)

    def validate(self, space: "MetricSpace", tol: float = TOL) -> None:
        """Check strict escape and additivity d(o,z_j) = d(o,z_i) + d(z_i,z_j)."""
        idx = [space.index_of(v) for v in self.path]
        D = space.distances
        o = idx[0]
        radial = [D[o, i] for i in idx]
        for a, b in zip(radial, radial[1:]):
            if b <= a + tol:
                raise SpaceError(f"ray {self.id!r} is not escaping: d(base, .) not increasing")
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                gap = abs(radial[j] - radial[i] - D[idx[i], idx[j]])
                if gap > tol:
                    raise SpaceError(
                        f"ray {self.id!r} is not geodesic between {self.path[i]!r} "
                        f"and {self.path[j]!r} (additivity off by {gap:.3g})"
                    )


class MetricSpace:
    """Immutable weighted graph with cached shortest-path distances.

    All operations on the space are pure; the distance matrix is filled
    lazily, deterministically, and then frozen.
    """

    def __init__(
        self,
        vertex_ids: Sequence[str],
        edges: Iterable[tuple[str, str, float]],
        boundary: Iterable[str] = (),
        rays: Iterable[RayMarker] = (),
    ):
        self.vertex_ids: tuple[str, ...] = tuple(str(v) for v in vertex_ids)
        if len(set(self.vertex_ids)) != len(self.vertex_ids):
            raise SpaceError("duplicate vertex ids")
        if not self.vertex_ids:
            raise SpaceError("a space needs at least one vertex")
        self._index: dict[str, int] = {v: i for i, v in enumerate(self.vertex_ids)}

        seen: set[frozenset[str]] = set()
        canon: list[tuple[str, str, float]] = []
        for u, v, w in edges:
            u, v, w = str(u), str(v), float(w)
            if u not in self._index or v not in self._index:
                raise SpaceError(f"edge ({u!r}, {v!r}) references an unknown vertex")
            if u == v:
                raise SpaceError(f"self-loop at {u!r}")
            if not (w > 0.0) or not math.isfinite(w):
                raise SpaceError(f"edge ({u!r}, {v!r}) has non-positive length {w!r}")
            key = frozenset((u, v))
            if key in seen:
                raise SpaceError(f"duplicate edge ({u!r}, {v!r})")
            seen.add(key)
            canon.append((u, v, w))
        self.edges: tuple[tuple[str, str, float], ...] = tuple(canon)

        self.boundary: frozenset[str] = frozenset(str(b) for b in boundary)
        unknown = self.boundary - set(self.vertex_ids)
        if unknown:
            raise SpaceError(f"boundary ids not in vertex set: {sorted(unknown)}")

        self.rays: dict[str, RayMarker] = {}
        for ray in rays:
            if ray.id in self.rays:
                raise SpaceError(f"duplicate ray id {ray.id!r}")
            for v in ray.path:
                if v not in self._index:
                    raise SpaceError(f"ray {ray.id!r} references unknown vertex {v!r}")
            self.rays[ray.id] = ray

        # adjacency sorted by neighbour id: geodesic reconstruction walks
        # candidates in this order, which realizes the lexicographic tie-break
        adj: dict[str, list[tuple[str, float]]] = {v: [] for v in self.vertex_ids}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for v in adj:
            adj[v].sort()
        self._adj = adj

        self._check_connected()
        self._dist: np.ndarray | None = None

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    def index_of(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise SpaceError(f"unknown vertex {v!r}") from None

    def __contains__(self, v: str) -> bool:
        return v in self._index

    def neighbors(self, v: str) -> list[tuple[str, float]]:
        return self._adj[v]

    def edge_length(self, u: str, v: str) -> float:
        for nbr, w in self._adj[u]:
            if nbr == v:
                return w
        raise SpaceError(f"no edge between {u!r} and {v!r}")

    @property
    def max_edge_length(self) -> float:
        return max((w for _, _, w in self.edges), default=0.0)

    @property
    def interior(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertex_ids if v not in self.boundary)

    def _check_connected(self) -> None:
        seen = {self.vertex_ids[0]}
        stack = [self.vertex_ids[0]]
        while stack:
            u = stack.pop()
            for v, _ in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != self.n:
            missing = next(v for v in self.vertex_ids if v not in seen)
            raise DisconnectedError(self.vertex_ids[0], missing)

    # -- metric ----------------------------------------------------------

    @property
    def distances(self) -> np.ndarray:
        """Symmetric matrix of exact shortest-path distances (read-only)."""
        if self._dist is None:
            self._dist = self._compute_distances()
        return self._dist

    def _compute_distances(self) -> np.ndarray:
        n = self.n
        if not self.edges:
            D = np.zeros((1, 1))
        else:
            rows, cols, vals = [], [], []
            for u, v, w in self.edges:
                iu, iv = self._index[u], self._index[v]
                rows.extend((iu, iv))
                cols.extend((iv, iu))
                vals.extend((w, w))
            graph = csr_matrix((vals, (rows, cols)), shape=(n, n))
            D = dijkstra(graph, directed=False)
        if np.isinf(D).any():
            i, j = map(int, np.argwhere(np.isinf(D))[0])
            raise DisconnectedError(self.vertex_ids[i], self.vertex_ids[j])
        # the two directions of one pair can disagree in the last ulp;
        # taking the elementwise min makes the matrix exactly symmetric
        D = np.minimum(D, D.T)
        np.fill_diagonal(D, 0.0)
        D.setflags(write=False)
        return D

    def dist(self, x: str, y: str) -> float:
        return float(self.distances[self.index_of(x), self.index_of(y)])

    def scale(self, s: float) -> "MetricSpace":
        """The same graph with every edge length multiplied by ``s``."""
        if not (s > 0):
            raise SpaceError("scale factor must be positive")
        return MetricSpace(
            self.vertex_ids,
            [(u, v, s * w) for u, v, w in self.edges],
            self.boundary,
            self.rays.values(),
        )


# -- operations ------------------------------------------------------------


def all_pairs_distances(space: MetricSpace) -> np.ndarray:
    """Exact shortest-path distance matrix, symmetric, vertex order = ``space.vertex_ids``."""
    return space.distances


def geodesic(space: MetricSpace, x: str, y: str, tol: float = TOL) -> Path:
    """Shortest path from x to y, ties broken to the lexicographically smallest vertex sequence."""
    ix, iy = space.index_of(x), space.index_of(y)
    D = space.distances
    verts = [x]
    cur, icur = x, ix
    for _ in range(space.n):
        if cur == y:
            return Path(tuple(verts), float(D[ix, iy]))
        step = None
        for nbr, w in space.neighbors(cur):
            inbr = space.index_of(nbr)
            if abs(w + D[inbr, iy] - D[icur, iy]) <= tol:
                step = (nbr, inbr)
                break
        if step is None:  # cannot happen on a connected graph unless tol is too tight
            raise SpaceError(f"no geodesic step from {cur!r} toward {y!r}")
        cur, icur = step
        verts.append(cur)
    raise SpaceError(f"geodesic reconstruction from {x!r} to {y!r} did not terminate")


def path_length(space: MetricSpace, vertices: Sequence[str]) -> float:
    """Length of a vertex walk.

    Accumulated in both directions and the smaller rounding returned, so
    walk lengths agree with the min-symmetrized distance matrix at ulp
    level.
    """
    if len(vertices) < 2:
        return 0.0
    ws = [space.edge_length(u, v) for u, v in zip(vertices, vertices[1:])]
    fwd = 0.0
    for w in ws:
        fwd += w
    bwd = 0.0
    for w in reversed(ws):
        bwd += w
    return min(fwd, bwd)


def dist_to_boundary(space: MetricSpace, x: str) -> float:
    """min over boundary vertices of dist(x, .); errors when the space is complete."""
    if not space.boundary:
        raise CompleteSpaceError("space is complete: boundary is empty")
    ix = space.index_of(x)
    cols = [space.index_of(b) for b in space.boundary]
    return float(space.distances[ix, cols].min())


def boundary_distances(space: MetricSpace) -> np.ndarray:
    """Vector of distances to the boundary, aligned with ``space.vertex_ids``."""
    if not space.boundary:
        raise CompleteSpaceError("space is complete: boundary is empty")
    cols = sorted(space.index_of(b) for b in space.boundary)
    return space.distances[:, cols].min(axis=1)


def bellman_ford_oracle(space: MetricSpace) -> np.ndarray:
    """Cubic-time all-pairs relaxation oracle, independent of the Dijkstra path.

    Relaxes distances source-outward for n-1 rounds, so every candidate
    value is a left-to-right accumulated path sum, exactly like the
    production computation; used to cross-check it bitwise.
    """
    n = space.n
    edges = [
        (space.index_of(u), space.index_of(v), w) for u, v, w in space.edges
    ]
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)
    for s in range(n):
        row = D[s]
        for _ in range(n - 1):
            changed = False
            for iu, iv, w in edges:
                cand = row[iu] + w
                if cand < row[iv]:
                    row[iv] = cand
                    changed = True
                cand = row[iv] + w
                if cand < row[iu]:
                    row[iu] = cand
                    changed = True
            if not changed:
                break
    if np.isinf(D).any():
        i, j = map(int, np.argwhere(np.isinf(D))[0])
        raise DisconnectedError(space.vertex_ids[i], space.vertex_ids[j])
    return np.minimum(D, D.T)


# -- JSON space format ------------------------------------------------------


def space_to_dict(space: MetricSpace) -> dict:
    return {
        "vertices": list(space.vertex_ids),
        "edges": [[u, v, w] for u, v, w in space.edges],
        "boundary": sorted(space.boundary),
        "rays": [
            {"id": r.id, "base": r.base, "path": list(r.path)}
            for r in space.rays.values()
        ],
    }


def load_space(source) -> MetricSpace:
    """Build a space from a JSON file path, a JSON string, or a dict; validates all invariants."""
    if isinstance(source, Mapping):
        data = source
    else:
        text = None
        try:
            with open(source) as fh:
                text = fh.read()
        except (OSError, TypeError):
            text = source
        data = json.loads(text)
    try:
        rays = [
            RayMarker(str(r["id"]), str(r["base"]), tuple(str(v) for v in r["path"]))
            for r in data.get("rays", [])
        ]
        space = MetricSpace(
            [str(v) for v in data["vertices"]],
            [(e[0], e[1], e[2]) for e in data["edges"]],
            data.get("boundary", []),
            rays,
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise SpaceError(f"malformed space data: {exc}") from exc
    for ray in space.rays.values():
        ray.validate(space)
    return space


def save_space(space: MetricSpace, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(space_to_dict(space), fh, indent=1, sort_keys=True)
        fh.write("\n")
