"""Tests for lattice polytopes: hulls, facets, lattice points, volumes, indices."""

from __future__ import annotations

import random
from itertools import combinations
from math import gcd

import pytest

from toricres.errors import EmptyInput, InfiniteIndex, InvalidPolytope, UnsupportedDimension
from toricres.lattice import (
    convex_hull,
    face_data,
    face_support,
    facet_lattice,
    lattice_index,
    minkowski_sum,
    mixed_volume,
    normalized_volume,
    polytope_from_facets,
    scaled_lattice_points,
    smith_decomposition,
    volume,
)

SIMPLEX = [(0, 0), (1, 0), (0, 1)]
DOUBLE_SIMPLEX = [(0, 0), (2, 0), (0, 2)]
QUADRANGLE = [(0, 0), (3, 0), (1, 1), (0, 1)]
TRIANGLE_ONE = [(1, 0), (1, 1), (0, 2)]
TRIANGLE_TWO = [(0, 1), (1, 1), (2, 0)]
PENTAGON = {((-1, 0), 3), ((-1, -1), 4), ((0, -1), 3), ((2, 1), -3), ((1, 2), -3)}


def _facet_set(polytope) -> set:
    return {(f.normal, f.offset) for f in polytope.facets}


def _random_cloud(seed: int, dim: int, count: int, top: int = 4) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    return [tuple(rng.randint(0, top) for _ in range(dim)) for _ in range(count)]


def _facets_from_triples(points) -> set:
    """Every plane through three points with all points on one side."""
    pts = sorted(set(points))
    found = set()
    for a, b, c in combinations(pts, 3):
        u = tuple(x - y for x, y in zip(b, a))
        v = tuple(x - y for x, y in zip(c, a))
        normal = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        if not any(normal):
            continue
        g = gcd(*normal)
        normal = tuple(x // g for x in normal)
        values = [sum(p * q for p, q in zip(point, normal)) for point in pts]
        base = sum(p * q for p, q in zip(a, normal))
        if all(value >= base for value in values):
            found.add((normal, -base))
        elif all(value <= base for value in values):
            found.add((tuple(-x for x in normal), base))
    return found


# --- Test: convex hulls ---

class TestConvexHull:
    def test_interior_points_dropped(self) -> None:
        hull = convex_hull([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)])
        assert set(hull.vertices) == {(0, 0), (2, 0), (0, 2), (2, 2)}
        assert _facet_set(hull) == {((1, 0), 0), ((0, 1), 0), ((-1, 0), 2), ((0, -1), 2)}

    def test_facets_ordered_by_normal(self) -> None:
        hull = convex_hull(SIMPLEX)
        normals = [f.normal for f in hull.facets]
        assert normals == sorted(normals)

    def test_lower_dimensional_segment(self) -> None:
        """A diagonal segment has dimension 1 and no facets."""
        hull = convex_hull([(0, 0), (1, 1), (2, 2)])
        assert hull.dim == 1
        assert hull.vertices == ((0, 0), (2, 2))
        assert hull.facets == ()
        assert scaled_lattice_points(hull) == ((0, 0), (1, 1), (2, 2))

    def test_single_point(self) -> None:
        hull = convex_hull([(1, 2)])
        assert hull.dim == 0
        assert scaled_lattice_points(hull, 3) == ((3, 6),)

    def test_three_dimensional_simplex(self) -> None:
        hull = convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert len(hull.facets) == 4
        assert ((-1, -1, -1), 1) in _facet_set(hull)

    def test_cube_with_all_its_lattice_points(self) -> None:
        hull = convex_hull([(x, y, z) for x in range(4) for y in range(4) for z in range(4)])
        assert len(hull.vertices) == 8
        assert _facet_set(hull) == {
            ((1, 0, 0), 0), ((0, 1, 0), 0), ((0, 0, 1), 0),
            ((-1, 0, 0), 3), ((0, -1, 0), 3), ((0, 0, -1), 3),
        }

    def test_octahedron(self) -> None:
        units = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        points = [(0, 0, 0)] + units + [tuple(-x for x in u) for u in units]
        hull = convex_hull(points)
        assert set(hull.vertices) == set(points) - {(0, 0, 0)}
        signs = {(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)}
        assert _facet_set(hull) == {(normal, 1) for normal in signs}

    @pytest.mark.parametrize("seed", range(10))
    def test_random_clouds_match_all_triples(self, seed: int) -> None:
        points = _random_cloud(seed, 3, 14) + [(0, 0, 0), (5, 0, 0), (0, 5, 0), (0, 0, 5)]
        hull = convex_hull(points)
        assert _facet_set(hull) == _facets_from_triples(points)
        for vertex in hull.vertices:
            assert sum(1 for f in hull.facets if f.value(vertex) == 0) >= 3

    def test_empty_rejected(self) -> None:
        with pytest.raises(EmptyInput):
            convex_hull([])

    def test_dimension_four_unsupported(self) -> None:
        with pytest.raises(UnsupportedDimension):
            convex_hull([(0, 0, 0, 0), (1, 0, 0, 0)])


# --- Test: facet presentations ---

class TestFacetPresentation:
    def test_given_order_kept(self) -> None:
        """The printed pentagon order survives."""
        normals = [(-1, 0), (-1, -1), (0, -1), (2, 1), (1, 2)]
        polytope = polytope_from_facets(normals, [3, 4, 3, -3, -3])
        assert polytope.normals == tuple(normals)
        assert set(polytope.vertices) == {(1, 1), (3, 0), (3, 1), (1, 3), (0, 3)}

    def test_quadrangle_matches_hull(self) -> None:
        polytope = polytope_from_facets([(0, -1), (-1, -2), (0, 1), (1, 0)], [1, 3, 0, 0])
        assert set(polytope.vertices) == set(QUADRANGLE)

    def test_non_primitive_normal_rejected(self) -> None:
        with pytest.raises(InvalidPolytope):
            polytope_from_facets([(2, 0), (0, 1), (-1, -1)], [0, 0, 1])

    def test_redundant_facet_rejected(self) -> None:
        with pytest.raises(InvalidPolytope):
            polytope_from_facets([(1, 0), (0, 1), (-1, -1), (-1, 0)], [0, 0, 1, 5])


# --- Test: lattice points ---

class TestLatticePoints:
    @pytest.mark.parametrize("vertices, k, strict, count", [
        (SIMPLEX, 1, False, 3),
        (SIMPLEX, 2, False, 6),
        (SIMPLEX, 3, True, 1),
        (DOUBLE_SIMPLEX, 1, False, 6),
        (QUADRANGLE, 1, False, 6),
        (QUADRANGLE, 3, True, 10),
    ])
    def test_counts(self, vertices, k: int, strict: bool, count: int) -> None:
        assert len(scaled_lattice_points(convex_hull(vertices), k, strict)) == count

    def test_sorted_lexicographically(self) -> None:
        points = scaled_lattice_points(convex_hull(SIMPLEX), 2)
        assert points == tuple(sorted(points))

    def test_zero_dilation(self) -> None:
        assert scaled_lattice_points(convex_hull(SIMPLEX), 0) == ((0, 0),)
        assert scaled_lattice_points(convex_hull(SIMPLEX), 0, strict=True) == ()


# --- Test: Minkowski sums and volumes ---

class TestMinkowskiSum:
    def test_pentagon_of_two_triangles(self) -> None:
        total = minkowski_sum([convex_hull(TRIANGLE_ONE), convex_hull(TRIANGLE_TWO)])
        assert _facet_set(total.polytope) == PENTAGON

    def test_summand_offsets_add_up(self) -> None:
        """Facet offsets of the sum are the sums of the summand offsets."""
        total = minkowski_sum([convex_hull(TRIANGLE_ONE), convex_hull(TRIANGLE_TWO)])
        for i, facet in enumerate(total.polytope.facets):
            assert sum(a[i] for a in total.summand_offsets) == facet.offset

    def test_complement_offsets(self) -> None:
        total = minkowski_sum([convex_hull(TRIANGLE_ONE), convex_hull(TRIANGLE_TWO)])
        assert total.complement_offsets(0) == total.summand_offsets[1]


class TestVolumes:
    def test_quadrangle_area(self) -> None:
        polytope = convex_hull(QUADRANGLE)
        assert volume(polytope) == 2
        assert normalized_volume(polytope) == 4

    def test_lower_dimensional_volume_is_zero(self) -> None:
        assert volume(convex_hull([(0, 0), (2, 2)])) == 0

    def test_unit_cube(self) -> None:
        cube = convex_hull([(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)])
        assert volume(cube) == 1
        assert normalized_volume(cube) == 6

    def test_two_conics_meet_in_four_points(self) -> None:
        double = convex_hull(DOUBLE_SIMPLEX)
        assert mixed_volume([double, double]) == 4

    def test_mixed_triangles(self) -> None:
        """area(sum) - area(first) - area(second) = 4 - 1/2 - 1/2."""
        assert mixed_volume([convex_hull(TRIANGLE_ONE), convex_hull(TRIANGLE_TWO)]) == 3

    def test_mixed_volume_of_one_segment(self) -> None:
        assert mixed_volume([convex_hull([(1,), (4,)])]) == 3

    @pytest.mark.parametrize("seed", range(10))
    def test_mixed_volume_symmetric_and_additive(self, seed: int) -> None:
        first, second, third = (convex_hull(_random_cloud(seed * 3 + i, 2, 4, 3)) for i in range(3))
        assert mixed_volume([first, second]) == mixed_volume([second, first])
        joined = minkowski_sum([first, second]).polytope
        assert mixed_volume([joined, third]) == mixed_volume([first, third]) + mixed_volume([second, third])

    @pytest.mark.parametrize("seed", range(5))
    def test_mixed_volume_of_a_repeated_polygon(self, seed: int) -> None:
        polygon = convex_hull(_random_cloud(seed, 2, 5, 3) + [(0, 0), (1, 0), (0, 1)])
        assert mixed_volume([polygon, polygon]) == normalized_volume(polygon)


# --- Test: faces and lattice indices ---

class TestFacesAndIndices:
    def test_face_support(self) -> None:
        assert face_support(TRIANGLE_TWO, (-1, -1)) == ((1, 1), (2, 0))

    def test_smith_form_index(self) -> None:
        smith = smith_decomposition([[2, 0], [0, 3]])
        assert smith.diagonal == (1, 6)
        assert smith.index == 6

    def test_smith_form_rank_deficient(self) -> None:
        smith = smith_decomposition([[2, 4]])
        assert smith.rank == 1
        assert smith.index is None

    def test_hyperplane_lattice_basis(self) -> None:
        hyperplane = facet_lattice((2, 1))
        (basis,) = hyperplane.basis
        assert 2 * basis[0] + basis[1] == 0
        assert abs(hyperplane.project((1, -2))[0]) == 1

    @pytest.mark.parametrize("support, index", [
        (SIMPLEX, 1),
        (DOUBLE_SIMPLEX, 2 * 2),
        ([(0, 0), (2, 0), (0, 1)], 2),
    ])
    def test_lattice_index(self, support, index: int) -> None:
        assert lattice_index([support]) == index

    def test_pentagon_facets_have_index_one(self) -> None:
        supports = [TRIANGLE_ONE, TRIANGLE_TWO]
        total = minkowski_sum([convex_hull(TRIANGLE_ONE), convex_hull(TRIANGLE_TWO)])
        for facet in total.polytope.facets:
            assert face_data(supports, facet).ell == 1

    def test_face_that_does_not_span_has_no_index(self) -> None:
        """The diagonal meets the left edge of the square in one point."""
        square = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        left = next(f for f in square.facets if f.normal == (1, 0))
        assert face_data([[(0, 0), (1, 1)]], left).ell is None

    @pytest.mark.parametrize("support", [
        [(0, 0), (1, 1), (2, 2)],
        [(1, 2), (3, 2)],
        [(0, 0, 0), (1, 2, 3), (2, 4, 6)],
    ])
    def test_collinear_support_has_infinite_index(self, support) -> None:
        with pytest.raises(InfiniteIndex):
            lattice_index([support])
