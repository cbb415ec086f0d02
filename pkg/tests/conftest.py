"""Shared fixtures and independent oracles for the test suite."""

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gromovlab.metric_core import MetricSpace
from gromovlab.zoo import ZooSpec, generate

settings.register_profile(
    "ci", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")


# -- zoo fixtures (session-scoped: distance matrices are reused heavily) ------


@pytest.fixture(scope="session")
def tree24():
    return generate(ZooSpec("tree", branching=2, depth=4))


@pytest.fixture(scope="session")
def tree26():
    return generate(ZooSpec("tree", branching=2, depth=6))


@pytest.fixture(scope="session")
def hyp_grid():
    return generate(ZooSpec("halfplane_grid", width=5, depth=6, metric="hyperbolic"))


@pytest.fixture(scope="session")
def euclid_grid():
    return generate(ZooSpec("halfplane_grid", width=5, depth=6, metric="euclidean"))


@pytest.fixture(scope="session")
def slit_grid():
    return generate(ZooSpec("uniform_slit", width=8))


# -- oracles -------------------------------------------------------------------


def branch_depth(x: str, y: str) -> int:
    """Depth of the deepest common ancestor of two tree vertices ('v010'-style ids)."""
    common = 0
    for a, b in zip(x[1:], y[1:]):
        if a != b:
            break
        common += 1
    return common


def tree_distance(x: str, y: str) -> int:
    return (len(x) - 1) + (len(y) - 1) - 2 * branch_depth(x, y)


def enumerate_path_distances(space: MetricSpace) -> np.ndarray:
    """Min over all simple paths of the source-outward accumulated length.

    Exponential-time enumeration oracle; min-symmetrized exactly like the
    production matrix so the comparison can be bitwise.
    """
    n = space.n
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)

    def dfs(start: int, current: str, acc: float, seen: set):
        ic = space.index_of(current)
        if acc < D[start, ic]:
            D[start, ic] = acc
        for nbr, w in space.neighbors(current):
            if nbr not in seen:
                dfs(start, nbr, acc + w, seen | {nbr})

    for s, v in enumerate(space.vertex_ids):
        dfs(s, v, 0.0, {v})
    return np.minimum(D, D.T)


def ordered_defect_scan(space: MetricSpace) -> float:
    """Plain-python max of min((x|z)_w,(z|y)_w) - (x|y)_w over all ordered quadruples."""
    D = space.distances
    n = space.n

    def gp(i, j, w):
        return 0.5 * ((D[i, w] + D[j, w]) - D[i, j])

    best = 0.0
    for w, x, y, z in itertools.product(range(n), repeat=4):
        best = max(best, min(gp(x, z, w), gp(z, y, w)) - gp(x, y, w))
    return best


def omega_epsilon(width: int, depth: int):
    """The unbounded uniform-domain round trip: grid -> (grid, k) -> deformation.

    Returns (omega, interior_metric, qh, deformed, interior_boundary_dist):
    the Euclidean half-plane grid, its interior subgraph under the
    original metric, the quasihyperbolization, the deformation of the
    quasihyperbolized space by the up-ray Busemann density, and the
    grid boundary distances restricted to the interior vertex order.
    """
    from gromovlab.busemann import busemann, default_epsilon
    from gromovlab.hyperbolicity import delta_four_point
    from gromovlab.metric_core import boundary_distances
    from gromovlab.quasihyperbolize import quasihyperbolic
    from gromovlab.uniformize import deform

    omega = generate(ZooSpec("halfplane_grid", width=width, depth=depth, metric="euclidean"))
    qh = quasihyperbolic(omega, warn_mesh=False)
    interior = qh.space.vertex_ids
    interior_set = set(interior)
    dom = MetricSpace(
        interior,
        [(u, v, w) for u, v, w in omega.edges if u in interior_set and v in interior_set],
    )
    delta = delta_four_point(qh.space, budget=1 << 40).delta
    field = busemann(qh.space, qh.space.rays["ray-up"], delta=delta)
    ds = deform(qh.space, field, default_epsilon(delta + field.error), delta=delta)
    full = boundary_distances(omega)
    bdist = np.array([full[omega.index_of(v)] for v in interior])
    return omega, dom, qh, ds, bdist


def random_connected_space(rng: np.random.Generator, n: int, extra: int = 2) -> MetricSpace:
    """Random spanning tree plus a few chords, random positive weights."""
    ids = [f"n{i}" for i in range(n)]
    edges = []
    used = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        w = float(rng.uniform(0.1, 3.0))
        edges.append((ids[i], ids[j], w))
        used.add(frozenset((ids[i], ids[j])))
    tries = 0
    while extra > 0 and tries < 50:
        tries += 1
        i, j = rng.integers(0, n, size=2)
        key = frozenset((ids[int(i)], ids[int(j)]))
        if i == j or key in used:
            continue
        used.add(key)
        edges.append((ids[int(i)], ids[int(j)], float(rng.uniform(0.1, 3.0))))
        extra -= 1
    return MetricSpace(ids, edges)
