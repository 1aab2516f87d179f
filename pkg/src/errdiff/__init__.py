"""Exact-rational toolkit for error-diffusion setpoint tracking.

The package computes minimal (convex) invariant sets for the accumulated
error of greedy setpoint implementation over collections of feasible sets,
and simulates the two-level controller that those sets bound.
"""

from .geometry import (
    EMPTY_POLYGON,
    ORIGIN,
    ConvexPolygon,
    HalfPlane,
    Point2,
    PointSet,
    as_fraction,
    classify_points,
    clip,
    clip_to_cell,
    convex_hull,
    diameter_sq,
    dist2,
    minkowski_sum,
    polygon_intersection,
    project_convex_polygon,
    project_point_set,
    segment,
    voronoi_cell,
)
from .intervals import IntervalUnion
from .operators import (
    Collection,
    IterationConfig,
    IterationResult,
    MonotoneFamilyReport,
    RoundingEvent,
    apply_G_collection,
    apply_G_single,
    apply_P_collection,
    apply_P_single,
    apply_g_interval,
    check_invariance,
    conditional_round,
    iterate_1d,
    iterate_to_invariance,
    verify_monotone_family,
)

__all__ = [name for name in dir() if not name.startswith("_")]
