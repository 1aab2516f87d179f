from fractions import Fraction

import pytest

from errdiff.geometry import ConvexPolygon, Point2, PointSet, convex_hull


def pt(x, y) -> Point2:
    return Point2(Fraction(x), Fraction(y))


def poly(*coords) -> ConvexPolygon:
    return convex_hull(Point2(Fraction(x), Fraction(y)) for x, y in coords)


@pytest.fixture
def unit_square() -> ConvexPolygon:
    return poly((0, 0), (1, 0), (1, 1), (0, 1))


@pytest.fixture
def grid8() -> PointSet:
    return PointSet.from_coords([(x, y) for x in (-1, 1, 3, 5) for y in (-1, 1)])


@pytest.fixture
def ring_family():
    ring = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)]
    s1 = PointSet.from_coords(ring)
    s2 = PointSet.from_coords([c for c in ring if c != (0, -1)])
    s3 = PointSet.from_coords([c for c in ring if c not in ((0, -1), (-1, -1))])
    return s1, s2, s3
