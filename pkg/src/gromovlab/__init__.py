"""Graph-based numerics for Gromov hyperbolic geometry.

Metric spaces are finite weighted graphs with the shortest-path metric.
On top of that model the package computes Gromov products and
hyperbolicity constants, Busemann fields along marked geodesic rays,
the conformal deformation e^{-eps*b} that turns a hyperbolic space into
an unbounded uniform one, quasihyperbolic metrics of spaces with
boundary, and distortion constants of maps between spaces.  Every
quantitative estimate is exposed as a check that reports the measured
value, the theoretical bound, and the discretization slack.
"""

from .metric_core import (
    MetricSpace,
    Path,
    RayMarker,
    all_pairs_distances,
    dist_to_boundary,
    geodesic,
    load_space,
    save_space,
)
from .hyperbolicity import cross_difference, delta_four_point, gromov_product, rips_thinness
from .boundary import (
    boundary_gromov_product,
    extended_gromov_product,
    uniformly_perfect_constant,
    visual_metric,
)
from .busemann import BusemannField, busemann, default_epsilon, gromov_product_b, hamenstadt_metric
from .uniformize import DeformedSpace, boundary_distance, deform
from .quasihyperbolize import (
    QHSpace,
    quasihyperbolic,
    roughly_starlike_boundary,
    roughly_starlike_point,
)
from .maps_harness import VertexMap, quasisymmetry_eta, rough_qi_constants, teichmuller_displacement
from .zoo import ZooSpec, generate

__version__ = "0.1.0"

__all__ = [
    "MetricSpace",
    "Path",
    "RayMarker",
    "all_pairs_distances",
    "geodesic",
    "dist_to_boundary",
    "load_space",
    "save_space",
    "gromov_product",
    "cross_difference",
    "delta_four_point",
    "rips_thinness",
    "extended_gromov_product",
    "boundary_gromov_product",
    "visual_metric",
    "uniformly_perfect_constant",
    "BusemannField",
    "busemann",
    "default_epsilon",
    "gromov_product_b",
    "hamenstadt_metric",
    "DeformedSpace",
    "deform",
    "boundary_distance",
    "QHSpace",
    "quasihyperbolic",
    "roughly_starlike_point",
    "roughly_starlike_boundary",
    "VertexMap",
    "rough_qi_constants",
    "quasisymmetry_eta",
    "teichmuller_displacement",
    "ZooSpec",
    "generate",
]
