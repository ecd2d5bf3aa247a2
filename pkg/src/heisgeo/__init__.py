"""Numerical geometry of the 3-dimensional Heisenberg group.

The group R^3 with product (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+xy'-yx')
carries the left-invariant Riemannian metric that makes the translated
coordinate frame X = (1,0,-y), Y = (0,1,x), T = (0,0,1) orthonormal.  This
package provides the group algebra, the metric with its connection and
curvature, exact and numerically integrated geodesics, Riemannian and
Cygan distance functions, and triangle-mesh emission for geodesic spheres
and related surfaces, together with a deterministic command-line tool.
"""

__version__ = "0.1.0"

from .core import (
    ORIGIN,
    ConnectionTable,
    CoordVector,
    FrameVector,
    HeisPoint,
    MetricTensor,
    commutator,
    connection_table,
    coord_to_frame,
    curvature_frame,
    frame_at,
    frame_bracket,
    frame_to_coord,
    group_inv,
    group_mul,
    inner_product,
    left_jacobian,
    metric_at,
    nabla,
    sectional_curvature,
)
from .distances import (
    ShootingConvergenceError,
    ShootingSolution,
    TargetUnreachableError,
    brute_force_distance,
    cygan_distance,
    cygan_scaling_check,
    dilate,
    riemannian_distance,
    shoot_candidates,
)
from .geodesics import (
    GeodesicSample,
    GeodesicSpec,
    exp_map,
    geodesic_from_origin,
    geodesic_from_point,
    integrate_geodesic,
    integrate_geodesic_batch,
    origin_coordinates,
    origin_velocity,
    velocity_frame_at,
)
from .meshing import (
    MeshError,
    NoSingularityError,
    ProximityEvent,
    SphereGrid,
    TriMesh,
    ball_cutaway_mesh,
    clip_mesh_to_halfspace,
    clip_sphere_to_metric,
    first_singular_radius,
    geodesic_polyline,
    plane_exp_surface,
    singular_point_closeup,
    sphere_exp_mesh,
    sphere_proximity_events,
)

__all__ = [
    "__version__",
    "ORIGIN",
    "HeisPoint",
    "FrameVector",
    "CoordVector",
    "MetricTensor",
    "ConnectionTable",
    "GeodesicSpec",
    "GeodesicSample",
    "ShootingSolution",
    "TriMesh",
    "SphereGrid",
    "ProximityEvent",
    "group_mul",
    "group_inv",
    "commutator",
    "left_jacobian",
    "frame_at",
    "metric_at",
    "inner_product",
    "frame_to_coord",
    "coord_to_frame",
    "nabla",
    "connection_table",
    "frame_bracket",
    "curvature_frame",
    "sectional_curvature",
    "velocity_frame_at",
    "geodesic_from_origin",
    "geodesic_from_point",
    "exp_map",
    "integrate_geodesic",
    "integrate_geodesic_batch",
    "origin_coordinates",
    "origin_velocity",
    "cygan_distance",
    "cygan_scaling_check",
    "dilate",
    "shoot_candidates",
    "riemannian_distance",
    "brute_force_distance",
    "ShootingConvergenceError",
    "TargetUnreachableError",
    "MeshError",
    "NoSingularityError",
    "sphere_exp_mesh",
    "plane_exp_surface",
    "ball_cutaway_mesh",
    "clip_mesh_to_halfspace",
    "clip_sphere_to_metric",
    "sphere_proximity_events",
    "singular_point_closeup",
    "geodesic_polyline",
    "first_singular_radius",
]
