#!/usr/bin/env python3
"""How big must the invariant error set be?  A cell-coverage experiment.

Take four corner sites at (+-10, +-10) plus one interior site p.  As p
approaches the boundary of the hull its (bounded) Voronoi cell stretches;
this script computes the minimal invariant set for each position of p and
checks exactly that it covers the cell shifted to the origin, which is the
conjectured lower bound for any invariant region.
"""

from fractions import Fraction

from errdiff import ConvexPolygon, ORIGIN, Point2, PointSet
from errdiff.operators import Collection, IterationConfig, iterate_to_invariance
from errdiff.verify import bounded_voronoi_polygon

SEED = ConvexPolygon((ORIGIN,))

for p_y in (0, 5, 9):
    center = Point2(Fraction(0), Fraction(p_y))
    sites = PointSet.from_coords([(-10, -10), (10, -10), (10, 10), (-10, 10), (0, p_y)])
    result = iterate_to_invariance(
        Collection((sites,), "perfect"), SEED, IterationConfig(max_iterations=2000)
    )
    cell = bounded_voronoi_polygon(sites, center).translate(-center)
    covered = result.invariant_set.contains_polygon(cell)
    cell_hi = max(v.y for v in cell.vertices)
    inv_hi = max(v.y for v in result.invariant_set.vertices)
    print(f"p = (0, {p_y}):")
    print(f"  cell top (shifted):        {cell_hi}")
    print(f"  invariant set top:         {inv_hi}")
    print(f"  cell covered exactly:      {covered} "
          f"({result.iterations} iterations, converged={result.converged})")
