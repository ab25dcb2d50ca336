"""Lattice polytopes: hulls, facet presentations, lattice points, volumes, indices.

Ambient dimensions up to three are supported. Every computation is over
the integers or QQ; no floating point is involved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from itertools import combinations, product
from math import factorial, gcd
from typing import Iterable, Optional, Sequence

from sympy import Matrix
from sympy.polys.domains import QQ, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from toricres.config import MAX_AMBIENT_DIM
from toricres.errors import (
    DimensionMismatch,
    EmptyInput,
    InfiniteIndex,
    InternalError,
    InvalidPolytope,
    UnsupportedDimension,
    ZeroNormal,
)
from toricres.linalg import rref
from toricres.models import (
    FaceData,
    Facet,
    LatticePolytope,
    MinkowskiSum,
    Point,
    SmithDecomposition,
)
from toricres.polynomials import SparsePolynomial

logger = logging.getLogger(__name__)


# --- Integer vector helpers ---


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def primitive(v: Sequence[int]) -> Point:
    g = reduce(gcd, (abs(x) for x in v), 0)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def _sub(a: Sequence[int], b: Sequence[int]) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def _cross(u: Sequence[int], v: Sequence[int]) -> Point:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 1
    return int(Matrix([list(r) for r in rows]).det())


def rank(vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    _, pivots = rref(vectors)
    return len(pivots)


def affine_rank(points: Sequence[Point]) -> int:
    if len(points) < 2:
        return 0
    return rank([_sub(p, points[0]) for p in points[1:]])


def _projection_coordinates(points: Sequence[Point], d: int) -> tuple[int, ...]:
    """Coordinate indices whose projection keeps the affine dimension ``d``."""
    n = len(points[0])
    for coords in combinations(range(n), d):
        projected = [tuple(p[c] for c in coords) for p in points]
        if affine_rank(projected) == d:
            return coords
    raise InternalError("no dimension-preserving coordinate projection")


# --- Convex hulls ---


def _ccw_hull(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Vertices of a planar point set in counter-clockwise order (gift wrapping)."""
    pts = sorted(set(points))
    start = pts[0]
    hull = [start]
    current = start
    while True:
        candidate = None
        for r in pts:
            if r == current:
                continue
            if candidate is None:
                candidate = r
                continue
            turn = (candidate[0] - current[0]) * (r[1] - current[1]) - (
                candidate[1] - current[1]
            ) * (r[0] - current[0])
            if turn < 0:
                candidate = r
            elif turn == 0:
                if dot(_sub(r, current), _sub(r, current)) > dot(
                    _sub(candidate, current), _sub(candidate, current)
                ):
                    candidate = r
        current = candidate
        if current == start:
            break
        hull.append(current)
    return hull


def _hull_1d(points: Sequence[Point]) -> LatticePolytope:
    low = min(p[0] for p in points)
    high = max(p[0] for p in points)
    facets = (Facet((-1,), high), Facet((1,), -low))
    return LatticePolytope(1, 1, ((low,), (high,)), tuple(sorted(facets, key=lambda f: f.normal)))


def _hull_2d(points: Sequence[Point]) -> LatticePolytope:
    vertices = _ccw_hull([tuple(p) for p in points])
    facets = []
    for i, p in enumerate(vertices):
        q = vertices[(i + 1) % len(vertices)]
        d = _sub(q, p)
        normal = primitive((-d[1], d[0]))
        facets.append(Facet(normal, -dot(p, normal)))
    facets.sort(key=lambda f: f.normal)
    return LatticePolytope(2, 2, tuple(vertices), tuple(facets))


def _pivot(pts: Sequence[Point], p: Point, e: Point, towards: Point) -> Point:
    """Inner normal of the supporting plane through the line ``p + t*e``.

    ``towards`` lies in the current supporting plane; the new plane is the
    one turned farthest away from it, so every point stays on its inner side.
    """
    normal: Optional[Point] = None
    for s in pts:
        d = _sub(s, p)
        if normal is not None and dot(normal, d) >= 0:
            continue
        m = _cross(e, d)
        side = dot(m, towards)
        if side:
            normal = m if side > 0 else tuple(-x for x in m)
    if normal is None:
        raise InternalError("no point off the supporting plane")
    return primitive(normal)


def _face_cycle(face: Sequence[Point], normal: Point) -> list[Point]:
    """Vertices of a planar face in cyclic order."""
    drop = next(i for i, x in enumerate(normal) if x)
    keep = [i for i in range(3) if i != drop]
    lifted = {(p[keep[0]], p[keep[1]]): p for p in face}
    return [lifted[q] for q in _ccw_hull(list(lifted))]


def _hull_3d(points: Sequence[Point]) -> LatticePolytope:
    """Facets by pivoting across the edges of known facets (gift wrapping)."""
    pts = sorted(set(tuple(p) for p in points))
    p = pts[0]
    normal: Point = (1, 0, 0)
    face = [s for s in pts if dot(normal, _sub(s, p)) == 0]
    while affine_rank(face) < 2:
        # grow the supporting face of the lowest point until it is a facet
        if len(face) == 1:
            e = next(c for c in (_cross(normal, axis) for axis in ((1, 0, 0), (0, 1, 0), (0, 0, 1))) if any(c))
        else:
            e = _sub(face[-1], face[0])
        normal = _pivot(pts, p, e, _cross(normal, e))
        face = [s for s in pts if dot(normal, _sub(s, p)) == 0]

    found: dict[Point, Facet] = {}
    vertices: set[Point] = set()
    pending = [normal]
    while pending:
        normal = pending.pop()
        if normal in found:
            continue
        low = min(dot(normal, s) for s in pts)
        found[normal] = Facet(normal, -low)
        cycle = _face_cycle([s for s in pts if dot(normal, s) == low], normal)
        vertices.update(cycle)
        for i, a in enumerate(cycle):
            b = cycle[(i + 1) % len(cycle)]
            w = cycle[(i + 2) % len(cycle)]
            neighbour = _pivot(pts, a, _sub(b, a), _sub(w, a))
            if neighbour not in found:
                pending.append(neighbour)
    facets = sorted(found.values(), key=lambda f: f.normal)
    return LatticePolytope(3, 3, tuple(sorted(vertices)), tuple(facets))


def convex_hull(points: Iterable[Sequence[int]]) -> LatticePolytope:
    """Vertices and irredundant inner facet presentation of a point set.

    Facets are ordered lexicographically by normal. Lower-dimensional sets
    return their vertices, their affine dimension and no facets.
    """
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if not pts:
        raise EmptyInput("convex hull of an empty point set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise DimensionMismatch("points of different dimensions")
    if n > MAX_AMBIENT_DIM:
        raise UnsupportedDimension(f"ambient dimension {n} exceeds {MAX_AMBIENT_DIM}")
    d = affine_rank(pts)
    if d == n:
        return {1: _hull_1d, 2: _hull_2d, 3: _hull_3d}[n](pts)
    if d == 0:
        return LatticePolytope(n, 0, (pts[0],))
    coords = _projection_coordinates(pts, d)
    projected = {tuple(p[c] for c in coords): p for p in pts}
    inner = convex_hull(projected.keys())
    vertices = tuple(projected[v] for v in inner.vertices)
    logger.debug("hull of %d points has dimension %d < %d", len(pts), d, n)
    return LatticePolytope(n, d, vertices)


def newton_polytope(p: SparsePolynomial) -> LatticePolytope:
    if p.is_zero:
        raise EmptyInput("the zero polynomial has no Newton polytope")
    return convex_hull(p.support)


def polytope_from_facets(normals: Sequence[Sequence[int]], offsets: Sequence[int]) -> LatticePolytope:
    """Polytope ``{m : <m, normal_i> + offset_i >= 0}`` keeping the given facet order."""
    if len(normals) != len(offsets):
        raise DimensionMismatch("normal and offset counts differ")
    if not normals:
        raise EmptyInput("no inequalities")
    n = len(normals[0])
    if n > MAX_AMBIENT_DIM:
        raise UnsupportedDimension(f"ambient dimension {n} exceeds {MAX_AMBIENT_DIM}")
    facets = []
    for normal, offset in zip(normals, offsets):
        normal = tuple(int(x) for x in normal)
        if len(normal) != n:
            raise DimensionMismatch("normals of different dimensions")
        if primitive(normal) != normal or not any(normal):
            raise InvalidPolytope(f"normal {normal} is not primitive")
        facets.append(Facet(normal, int(offset)))
    vertices: set[Point] = set()
    for subset in combinations(facets, n):
        rows = [list(f.normal) + [-f.offset] for f in subset]
        reduced, pivots = rref(rows)
        if pivots != list(range(n)):
            continue
        solution = [reduced[i][n] for i in range(n)]
        if not all(QQ.denom(x) == 1 for x in solution):
            if all(f.value(solution) >= 0 for f in facets):
                raise InvalidPolytope("vertex with non-integral coordinates")
            continue
        point = tuple(int(QQ.numer(x)) for x in solution)
        if all(f.value(point) >= 0 for f in facets):
            vertices.add(point)
    if not vertices:
        raise InvalidPolytope("inequalities define an empty or unbounded set")
    ordered = tuple(sorted(vertices))
    if affine_rank(ordered) != n:
        raise InvalidPolytope("inequalities define a lower-dimensional set")
    for f in facets:
        tight = [v for v in ordered if f.value(v) == 0]
        if not tight or affine_rank(tight) != n - 1:
            raise InvalidPolytope(f"facet {f.normal} is redundant")
    if n == 2:
        ordered = tuple(_ccw_hull(list(ordered)))
    return LatticePolytope(n, n, ordered, tuple(facets))


# --- Lattice points ---


def _box(vertices: Sequence[Point], k: int) -> list[range]:
    n = len(vertices[0])
    return [
        range(k * min(v[i] for v in vertices), k * max(v[i] for v in vertices) + 1)
        for i in range(n)
    ]


def scaled_lattice_points(polytope: LatticePolytope, k: int = 1, strict: bool = False) -> tuple[Point, ...]:
    """Lattice points of ``kP`` (or of its interior), sorted lexicographically."""
    if k < 0:
        raise DimensionMismatch(f"negative dilation factor {k}")
    if k == 0:
        return () if strict else ((0,) * polytope.ambient_dim,)
    if polytope.is_full_dimensional:
        return tuple(
            p for p in product(*_box(polytope.vertices, k)) if polytope.contains(p, k, strict)
        )
    if strict:
        return ()
    vertices = polytope.vertices
    if polytope.dim == 0:
        return (tuple(k * x for x in vertices[0]),)
    coords = _projection_coordinates(vertices, polytope.dim)
    shadow = convex_hull([tuple(v[c] for c in coords) for v in vertices])
    origin = tuple(k * x for x in vertices[0])
    directions = [_sub(v, vertices[0]) for v in vertices[1:]]
    points = []
    for p in product(*_box(vertices, k)):
        if not shadow.contains(tuple(p[c] for c in coords), k):
            continue
        if rank(directions + [_sub(p, origin)]) == polytope.dim:
            points.append(p)
    return tuple(points)


def lattice_points(polytope: LatticePolytope) -> tuple[Point, ...]:
    return scaled_lattice_points(polytope, 1)


# --- Minkowski sums and volumes ---


def minkowski_sum(polytopes: Sequence[LatticePolytope]) -> MinkowskiSum:
    """Hull of vertex sums, with ``a_i^j = -min_{Delta_j} <., eta_i>``."""
    if not polytopes:
        raise EmptyInput("Minkowski sum of no polytopes")
    n = polytopes[0].ambient_dim
    if any(p.ambient_dim != n for p in polytopes):
        raise DimensionMismatch("Minkowski summands of different dimensions")
    sums = [tuple(sum(c) for c in zip(*combo)) for combo in product(*(p.vertices for p in polytopes))]
    total = convex_hull(sums)
    offsets = tuple(
        tuple(-min(dot(v, f.normal) for v in p.vertices) for f in total.facets)
        for p in polytopes
    )
    return MinkowskiSum(total, offsets)


def _shoelace(vertices: Sequence[Point]) -> object:
    twice = 0
    for i, p in enumerate(vertices):
        q = vertices[(i + 1) % len(vertices)]
        twice += p[0] * q[1] - q[0] * p[1]
    return QQ(abs(twice), 2)


def volume(polytope: LatticePolytope) -> object:
    """Euclidean volume as a QQ element; zero for lower-dimensional input."""
    if not polytope.is_full_dimensional:
        return QQ.zero
    n = polytope.ambient_dim
    vertices = polytope.vertices
    if n == 1:
        return QQ(abs(vertices[1][0] - vertices[0][0]))
    if n == 2:
        return _shoelace(_ccw_hull(list(vertices)))
    apex = vertices[0]
    six_times = 0
    for f in polytope.facets:
        if f.value(apex) == 0:
            continue
        tight = [v for v in vertices if f.value(v) == 0]
        drop = next(i for i, x in enumerate(f.normal) if x)
        keep = [i for i in range(3) if i != drop]
        lifted = {(v[keep[0]], v[keep[1]]): v for v in tight}
        ring = [lifted[p] for p in _ccw_hull(list(lifted))]
        for b, c in zip(ring[1:], ring[2:]):
            six_times += abs(integer_det([_sub(ring[0], apex), _sub(b, apex), _sub(c, apex)]))
    return QQ(six_times, 6)


def normalized_volume(polytope: LatticePolytope) -> int:
    """``n! * vol(P)``, always an integer for lattice polytopes."""
    value = volume(polytope) * factorial(polytope.ambient_dim)
    if QQ.denom(value) != 1:
        raise InternalError(f"normalized volume {value} is not an integer")
    return int(QQ.numer(value))


def mixed_volume(polytopes: Sequence[LatticePolytope]) -> int:
    """Mixed volume normalized so that ``MV(P, ..., P) = n! vol(P)``."""
    n = len(polytopes)
    if n == 0 or any(p.ambient_dim != n for p in polytopes):
        raise DimensionMismatch("mixed volume needs n polytopes in dimension n")
    total = QQ.zero
    for size in range(1, n + 1):
        sign = -1 if (n - size) % 2 else 1
        for subset in combinations(polytopes, size):
            total += sign * volume(minkowski_sum(list(subset)).polytope)
    if QQ.denom(total) != 1 or total < 0:
        raise InternalError(f"mixed volume {total} is not a non-negative integer")
    return int(QQ.numer(total))


def face_support(support: Iterable[Sequence[int]], normal: Sequence[int]) -> tuple[Point, ...]:
    """Points of ``support`` minimizing ``<., normal>``."""
    if not any(normal):
        raise ZeroNormal("face of a zero direction")
    pts = [tuple(p) for p in support]
    if not pts:
        raise EmptyInput("face of an empty support")
    low = min(dot(p, normal) for p in pts)
    return tuple(sorted(p for p in pts if dot(p, normal) == low))


# --- Normal forms and lattice indices ---


def smith_decomposition(rows: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith form ``left * M * right`` with nonnegative diagonal."""
    matrix = Matrix([list(r) for r in rows])
    diagonal_matrix, left, right = smith_normal_decomp(matrix, domain=ZZ)
    size = min(matrix.rows, matrix.cols)
    left_rows = [list(left.row(i)) for i in range(left.rows)]
    diagonal = []
    for i in range(size):
        d = int(diagonal_matrix[i, i])
        if d < 0:
            left_rows[i] = [-x for x in left_rows[i]]
            d = -d
        diagonal.append(d)
    return SmithDecomposition(
        matrix=tuple(tuple(int(x) for x in r) for r in rows),
        left=tuple(tuple(int(x) for x in r) for r in left_rows),
        right=tuple(tuple(int(x) for x in right.row(i)) for i in range(right.rows)),
        diagonal=tuple(diagonal),
    )


@dataclass(frozen=True)
class HyperplaneLattice:
    """Basis of ``{v in ZZ^n : <v, normal> = 0}`` and coordinates in it."""

    normal: Point
    basis: tuple[Point, ...]
    inverse: tuple[tuple[int, ...], ...]  # inverse of the unimodular completion

    def project(self, point: Sequence[int]) -> Point:
        coords = [dot(row, point) for row in self.inverse]
        return tuple(coords[1:])


def facet_lattice(normal: Sequence[int]) -> HyperplaneLattice:
    """Lattice basis of the hyperplane orthogonal to a primitive normal."""
    normal = tuple(normal)
    if not any(normal):
        raise ZeroNormal("hyperplane lattice of a zero normal")
    smith = smith_decomposition([normal])
    right = Matrix([list(r) for r in smith.right])
    inverse = right.inv()
    basis = tuple(tuple(int(right[i, j]) for i in range(right.rows)) for j in range(1, right.cols))
    return HyperplaneLattice(
        normal=normal,
        basis=basis,
        inverse=tuple(tuple(int(inverse[i, j]) for j in range(inverse.cols)) for i in range(inverse.rows)),
    )


def _difference_generators(supports: Sequence[Sequence[Point]]) -> list[Point]:
    generators = []
    for support in supports:
        pts = list(support)
        generators.extend(_sub(p, pts[0]) for p in pts[1:])
    return generators


def lattice_index(supports: Sequence[Sequence[Sequence[int]]], normal: Sequence[int] | None = None) -> int:
    """Index of the affine lattice spanned by the supports in its ambient lattice.

    With ``normal`` the supports are projected into the hyperplane lattice
    of that normal first, and the index is taken there.
    """
    groups = [[tuple(p) for p in s] for s in supports]
    if not groups or not any(groups):
        raise EmptyInput("lattice index of no points")
    if normal is not None:
        hyperplane = facet_lattice(normal)
        groups = [[hyperplane.project(p) for p in g] for g in groups]
    dim = len(groups[0][0])
    if dim == 0:
        return 1
    generators = [g for g in _difference_generators(groups) if any(g)]
    if not generators:
        raise InfiniteIndex("affine lattice of a single point")
    index = smith_decomposition(generators).index
    if index is None:
        raise InfiniteIndex("difference lattice is not of full rank")
    return index


def face_data(supports: Sequence[Sequence[Point]], facet: Facet) -> FaceData:
    """Face supports on ``facet``, their hyperplane coordinates and the index."""
    faces = tuple(face_support(s, facet.normal) for s in supports)
    n = len(facet.normal)
    if n == 1:
        return FaceData(facet, faces, tuple(((),) for _ in faces), 1)
    hyperplane = facet_lattice(facet.normal)
    projected = tuple(tuple(hyperplane.project(p) for p in face) for face in faces)
    try:
        ell: Optional[int] = lattice_index(faces, facet.normal)
    except InfiniteIndex:
        logger.debug("face supports on %s do not span the facet lattice", facet.normal)
        ell = None
    return FaceData(facet, faces, projected, ell)
