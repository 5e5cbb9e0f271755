"""Space models: exact metrics, bicombings, lines, boundaries and sampling."""

from .base import DEFAULT_CAP, TOL, Annulus, Ball, Sample, Sphere, region_bounds
from .euclidean import EucLine, EucPoint, Euclidean, EucSample
from .graph import GraphLine, GraphPoint, GraphSample, MetricGraph, parse_edge_list
from .hyperbolic import (
    ORIGIN,
    HypLine,
    HypPoint,
    HyperbolicPlane,
    HypSample,
    IdealPoint,
    angle_gap,
    minkowski,
)
from .tree import ROOT, RegularTree, TreeEnd, TreeLine, TreePoint, TreeSample, lcp, point_on


def distance(space, x, y):
    """Distance between ``x`` and ``y`` in ``space``."""
    return space.distance(x, y)


def bicombing(space, x, y, t):
    """Point ``sigma(x, y, t)`` of the bicombing geodesic from ``x`` to ``y``."""
    return space.bicombing(x, y, t)


def extend_to_line(space, x, y):
    """Deterministic line with ``line(0) = x`` and ``line(d(x, y)) = y``."""
    return space.extend_to_line(x, y)


def line_from_boundary_pair(space, zminus, zplus):
    """Line from ``zminus`` to ``zplus`` with time 0 at the projection of the basepoint."""
    return space.line_from_boundary_pair(zminus, zplus)


def sample_region(space, region, mesh=0.5):
    """Deterministic mesh-dense sample of a ball, sphere or annulus."""
    return space.sample_region(region, mesh)


__all__ = [
    "Annulus", "Ball", "DEFAULT_CAP", "EucLine", "EucPoint", "EucSample", "Euclidean",
    "GraphLine", "GraphPoint", "GraphSample", "HypLine", "HypPoint", "HypSample",
    "HyperbolicPlane", "IdealPoint", "MetricGraph", "ORIGIN", "ROOT", "RegularTree",
    "Sample", "Sphere", "TOL", "TreeEnd", "TreeLine", "TreePoint", "TreeSample",
    "angle_gap", "bicombing", "distance", "extend_to_line", "lcp", "line_from_boundary_pair",
    "minkowski", "parse_edge_list", "point_on", "region_bounds", "sample_region",
]
