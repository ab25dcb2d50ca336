"""Sparse resultants from the map Phi, facet resultants and Koszul bookkeeping.

Phi sends ``(Lambda_0, ..., Lambda_n, theta)`` to ``sum Lambda_i F_i + theta J(F)``
in the critical degree. Its rows are the interior lattice points of ``kappa P``,
column block ``i`` the interior points of ``(kappa - k_i) P``, and the last
column is the toric Jacobian.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from itertools import combinations, product
from math import gcd, prod
from typing import Any, Mapping, Optional, Sequence

from sympy.polys.domains import QQ
from sympy.polys.domains.domain import Domain

from toricres.config import (
    DEFAULT_MAX_MINORS,
    DEFAULT_SEED,
    GENERIC_COEFFICIENT_PREFIX,
    JACOBIAN_LABEL,
    Mode,
)
from toricres.cox import CoxRing, dehomogenize, homogenize, toric_jacobian
from toricres.errors import (
    AllMinorsZero,
    ArityMismatch,
    DegreeMismatch,
    DimensionMismatch,
    EmptyCriticalDegree,
    InvalidPolytope,
    NegativeExponent,
    NonIntegerDegree,
    NonSquare,
    SingularMatrix,
    SupportOutsidePolytope,
    UnsupportedFaceConfiguration,
    ZeroPolynomial,
)
from toricres.formatting import format_monomial
from toricres.lattice import (
    convex_hull,
    dot,
    face_data,
    lattice_index,
    minkowski_sum,
    mixed_volume,
    newton_polytope,
    normalized_volume,
    scaled_lattice_points,
)
from toricres.linalg import PolyMatrix, fraction_free_det, select_independent_columns
from toricres.models import (
    FacetResultant,
    FacetResultantSet,
    Factorization,
    FactorPower,
    LatticePolytope,
    PhiLayout,
    PhiMatrix,
    Point,
    ResultantOutput,
)
from toricres.polynomials import (
    SparsePolynomial,
    coefficient_domain,
    domain_symbols,
    element_degree,
    is_numeric,
    substitute_element,
)

logger = logging.getLogger(__name__)


# --- Generic systems ---


@dataclass(frozen=True)
class GenericSystem:
    """A system with one fresh indeterminate per support point.

    ``substitution`` maps each indeterminate to the matching coefficient of
    the original system, an element of ``target``.
    """

    polynomials: tuple[SparsePolynomial, ...]
    substitution: Mapping[str, Any]
    target: Domain

    @property
    def domain(self) -> Domain:
        return self.polynomials[0].domain

    def specialize(self, element: Any) -> Any:
        return substitute_element(self.domain, element, self.substitution, self.target)


def _is_generator(element: Any) -> bool:
    terms = element.terms()
    return len(terms) == 1 and terms[0][1] == 1 and sum(terms[0][0]) == 1


def is_generic_system(polys: Sequence[SparsePolynomial], supports: Sequence[Sequence[Point]]) -> bool:
    """True when every coefficient is a distinct bare parameter over the full supports."""
    domain = polys[0].domain
    if is_numeric(domain):
        return False
    seen: set[tuple[int, ...]] = set()
    for p, support in zip(polys, supports):
        if set(p.support) != set(support):
            return False
        for coeff in p.coefficients:
            if not _is_generator(coeff):
                return False
            monom = coeff.terms()[0][0]
            if monom in seen:
                return False
            seen.add(monom)
    return True


def generic_system(
    polys: Sequence[SparsePolynomial], supports: Sequence[Sequence[Point]]
) -> GenericSystem:
    """Fresh indeterminates ``u{j}_{i}`` for every support point of every polynomial."""
    target = polys[0].domain
    taken = set(domain_symbols(target))
    prefix = GENERIC_COEFFICIENT_PREFIX
    while any(name.startswith(prefix) for name in taken):
        prefix += GENERIC_COEFFICIENT_PREFIX
    names = [
        [f"{prefix}{j}_{i}" for i in range(len(support))]
        for j, support in enumerate(supports)
    ]
    domain = coefficient_domain([name for group in names for name in group])
    generators = dict(zip(domain_symbols(domain), domain.ring.gens))
    generic = []
    substitution: dict[str, Any] = {}
    for p, support, group in zip(polys, supports, names):
        generic.append(
            SparsePolynomial.from_terms(
                p.variables, domain, [(point, generators[name]) for point, name in zip(support, group)]
            )
        )
        for point, name in zip(support, group):
            substitution[name] = p.coefficient(point)
    outside = [e for p, support in zip(polys, supports) for e in p.support if e not in set(support)]
    if outside:
        raise SupportOutsidePolytope(f"exponents {outside} lie outside the declared supports")
    logger.debug("generic system with %d indeterminates", len(substitution))
    return GenericSystem(tuple(generic), substitution, target)


# --- The map Phi ---


def phi_layout(polytope: LatticePolytope, k: Sequence[int]) -> PhiLayout:
    n = polytope.ambient_dim
    if len(k) != n + 1:
        raise ArityMismatch(f"expected {n + 1} degree multipliers, got {len(k)}")
    if any(ki < 1 for ki in k):
        raise DegreeMismatch(f"degree multipliers must be positive, got {tuple(k)}")
    if not polytope.is_full_dimensional:
        raise InvalidPolytope("Phi needs a full-dimensional polytope")
    kappa = sum(k)
    rows = scaled_lattice_points(polytope, kappa, strict=True)
    if not rows:
        raise EmptyCriticalDegree(f"({kappa}P) has no interior lattice points")
    blocks = tuple(scaled_lattice_points(polytope, kappa - ki, strict=True) for ki in k)
    return PhiLayout(polytope, tuple(k), rows, blocks)


def _check_supports(polys: Sequence[SparsePolynomial], polytope: LatticePolytope, k: Sequence[int]) -> None:
    for i, (p, ki) in enumerate(zip(polys, k)):
        outside = [e for e in p.support if not polytope.contains(e, ki)]
        if outside:
            raise SupportOutsidePolytope(f"F{i} has exponents {outside} outside {ki}P")


def phi_jacobian(polys: Sequence[SparsePolynomial], polytope: LatticePolytope, k: Sequence[int]) -> SparsePolynomial:
    """Toric Jacobian of the homogenized system, back in torus coordinates."""
    ring = CoxRing.from_polytope(polytope, polys[0].variables)
    forms = [homogenize(p, ring, ki) for p, ki in zip(polys, k)]
    return dehomogenize(toric_jacobian(forms, ring, cross_check=False), ring)


def build_phi(
    polys: Sequence[SparsePolynomial], polytope: LatticePolytope, k: Sequence[int]
) -> PhiMatrix:
    """Matrix of Phi with Cox-monomial labels on both axes."""
    layout = phi_layout(polytope, k)
    if len(polys) != len(k):
        raise ArityMismatch(f"{len(polys)} polynomials for {len(k)} degree multipliers")
    _check_supports(polys, polytope, k)
    domain = polys[0].domain
    ring = CoxRing.from_polytope(polytope, polys[0].variables)
    jacobian = phi_jacobian(polys, polytope, k)

    columns: list[tuple[Any, ...]] = []
    col_labels: list[str] = []
    for i, (p, block) in enumerate(zip(polys, layout.blocks)):
        for point in block:
            columns.append(tuple(p.coefficient(tuple(m - q for m, q in zip(row, point))) for row in layout.rows))
            multiplier = format_monomial(ring.variables, ring.exponent_of(point, layout.kappa - k[i], interior=True))
            col_labels.append(f"F{i}*{multiplier}" if multiplier else f"F{i}")
    columns.append(tuple(jacobian.coefficient(row) for row in layout.rows))
    col_labels.append(JACOBIAN_LABEL)

    row_labels = [
        format_monomial(ring.variables, ring.exponent_of(row, layout.kappa, interior=True)) or "1"
        for row in layout.rows
    ]
    entries = [[column[r] for column in columns] for r in range(layout.nrows)]
    matrix = PolyMatrix.from_rows(domain, entries, row_labels, col_labels)
    mode = Mode.NUMERIC if is_numeric(domain) else Mode.SYMBOLIC
    logger.info("built Phi of shape %dx%d (%s)", matrix.nrows, matrix.ncols, mode.value)
    return PhiMatrix(layout, matrix, mode, jacobian)


# --- Degree bookkeeping ---


def polytope_ell(polytope: LatticePolytope, k: Sequence[int]) -> int:
    """Lattice index of ``k0 P`` with ``k0 = max k``."""
    return lattice_index([scaled_lattice_points(polytope, max(k))])


def resultant_degree(polytope: LatticePolytope, k: Sequence[int], i: int) -> int:
    """Degree of the resultant in the coefficients of the ``i``-th form."""
    numerator = prod(kj for j, kj in enumerate(k) if j != i) * normalized_volume(polytope)
    ell = polytope_ell(polytope, k)
    if numerator % ell:
        raise NonIntegerDegree(f"degree {numerator}/{ell} is not an integer")
    return numerator // ell


def predicted_degree(polytope: LatticePolytope, k: Sequence[int]) -> int:
    """Total degree of ``R^ell``, the determinant of the Koszul complex."""
    others = sum(prod(kj for j, kj in enumerate(k) if j != i) for i in range(len(k)))
    return others * normalized_volume(polytope)


def koszul_ranks(polytope: LatticePolytope, k: Sequence[int]) -> tuple[int, ...]:
    """Ranks ``W_0, ..., W_{n+1}``: interior point counts of ``k_J P`` over ``|J| = j``."""
    ranks = []
    for j in range(len(k) + 1):
        ranks.append(sum(
            len(scaled_lattice_points(polytope, sum(subset), strict=True)) if subset else 0
            for subset in combinations(k, j)
        ))
    return tuple(ranks)


def koszul_degree(polytope: LatticePolytope, k: Sequence[int]) -> int:
    """Alternating sum ``sum_j (-1)^(n+1-j) j W_j``."""
    ranks = koszul_ranks(polytope, k)
    top = len(k)
    return sum((-1) ** (top - j) * j * w for j, w in enumerate(ranks))


def gamma_coefficients(k: Sequence[int]) -> tuple[int, ...]:
    """``gamma_i = sum_j (-1)^(n+1-j) j sum_{|J|=j} k_J^i`` for ``i = 0..n``."""
    top = len(k)
    n = top - 1
    return tuple(
        sum(
            (-1) ** (top - j) * j * sum(sum(subset) ** i for subset in combinations(k, j))
            for j in range(1, top + 1)
        )
        for i in range(n + 1)
    )


def alternating_subset_expansion(u: Sequence[Sequence[Any]], zero: Any, one: Any) -> Any:
    """``sum_I (-1)^|I| prod_j (sum_{i in I} u[i][j])`` over subsets of the rows."""
    rows = len(u)
    cols = len(u[0]) if rows else 0
    total = zero
    for size in range(rows + 1):
        for subset in combinations(range(rows), size):
            term = one
            for j in range(cols):
                column_sum = zero
                for i in subset:
                    column_sum = column_sum + u[i][j]
                term = term * column_sum
            total = total + term if size % 2 == 0 else total - term
    return total


def surjection_expansion(u: Sequence[Sequence[Any]], zero: Any, one: Any) -> Any:
    """``(-1)^(n+1) sum over surjections phi of prod_j u[phi(j)][j]``."""
    rows = len(u)
    cols = len(u[0]) if rows else 0
    total = zero
    for phi in product(range(rows), repeat=cols):
        if len(set(phi)) != rows:
            continue
        term = one
        for j, i in enumerate(phi):
            term = term * u[i][j]
        total = total + term
    return total if rows % 2 == 0 else -total


def sylvester_type(polytope: LatticePolytope, k: Sequence[int]) -> Optional[str]:
    """Which determinantal case applies: ``"a"``, ``"b"``, ``"c"`` or None."""
    n = polytope.ambient_dim
    if n >= 2 and scaled_lattice_points(polytope, n - 1, strict=True):
        return None
    if all(ki == 1 for ki in k):
        return "a"
    if not scaled_lattice_points(polytope, n, strict=True) and sum(k) == n + 2:
        return "b"
    if n == 2 and len(polytope.vertices) == 3 and normalized_volume(polytope) == 1 and max(k) <= 2:
        return "c"
    return None


# --- Resultants ---


def _normalized(domain: Domain, element: Any) -> Any:
    if is_numeric(domain) or not element:
        return element
    _, primitive = element.primitive()
    return -primitive if primitive.LC < 0 else primitive


def resultant_via_det(phi: PhiMatrix) -> ResultantOutput:
    """``det(Phi) = R^ell`` up to sign for a square layout."""
    matrix = phi.matrix
    if not matrix.is_square:
        raise NonSquare(f"Phi is {matrix.nrows}x{matrix.ncols}; use the minor gcd")
    layout = phi.layout
    domain = matrix.domain
    # rows k_i F_i of the bordered Jacobian can leave an integer content when some k_i > 1
    det = _normalized(domain, fraction_free_det(matrix))
    predicted = predicted_degree(layout.polytope, layout.k)
    degree = element_degree(domain, det)
    certified = is_numeric(domain) or degree == predicted
    if not certified:
        logger.warning("determinant degree %d differs from predicted %d", degree, predicted)
    return ResultantOutput(
        polynomial=det,
        domain=domain,
        ell=polytope_ell(layout.polytope, layout.k),
        method="determinant",
        degree=degree,
        predicted_degree=None if is_numeric(domain) else predicted,
        certified=certified,
    )


def resultant_via_minor_gcd(
    phi: PhiMatrix,
    max_minors: int = DEFAULT_MAX_MINORS,
    rng: Optional[random.Random] = None,
) -> ResultantOutput:
    """Gcd of maximal minors through the Jacobian column, stopped by the degree certificate."""
    matrix = phi.matrix
    if matrix.nrows > matrix.ncols:
        raise DimensionMismatch(f"Phi has more rows than columns ({matrix.nrows}x{matrix.ncols})")
    if matrix.is_square:
        output = resultant_via_det(phi)
        return ResultantOutput(
            output.polynomial, output.domain, output.ell, "minor-gcd",
            output.degree, output.predicted_degree, output.certified, 1,
        )
    domain = matrix.domain
    if is_numeric(domain):
        raise DimensionMismatch("the minor gcd needs symbolic coefficients")
    rng = rng or random.Random(DEFAULT_SEED)
    layout = phi.layout
    predicted = predicted_degree(layout.polytope, layout.k)
    jacobian = layout.jacobian_column
    others = [c for c in range(matrix.ncols) if c != jacobian]
    tried: set[tuple[int, ...]] = set()
    current = None
    used = 0
    for _ in range(max_minors * 4):
        if used >= max_minors:
            break
        rng.shuffle(others)
        try:
            columns = tuple(select_independent_columns(matrix, [jacobian] + others, rng))
        except SingularMatrix:
            continue
        if columns in tried or jacobian not in columns:
            continue
        tried.add(columns)
        minor = fraction_free_det(matrix.submatrix(range(matrix.nrows), columns))
        if not minor:
            continue
        used += 1
        current = minor if current is None else current.gcd(minor)
        current = _normalized(domain, current)
        degree = element_degree(domain, current)
        logger.debug("minor %d: running gcd degree %d (target %d)", used, degree, predicted)
        if degree == predicted:
            break
    if current is None:
        raise AllMinorsZero("every sampled maximal minor vanishes")
    degree = element_degree(domain, current)
    certified = degree == predicted
    if not certified:
        logger.warning("minor gcd degree %d, predicted %d: result is uncertified", degree, predicted)
    return ResultantOutput(
        polynomial=current,
        domain=domain,
        ell=polytope_ell(layout.polytope, layout.k),
        method="minor-gcd",
        degree=degree,
        predicted_degree=predicted,
        certified=certified,
        minors_used=used,
    )


def default_polytope(polys: Sequence[SparsePolynomial]) -> LatticePolytope:
    return convex_hull([e for p in polys for e in p.support])


def _resultant_of(phi: PhiMatrix, max_minors: int, rng: Optional[random.Random]) -> ResultantOutput:
    if phi.matrix.is_square:
        return resultant_via_det(phi)
    return resultant_via_minor_gcd(phi, max_minors, rng)


def resultant(
    polys: Sequence[SparsePolynomial],
    polytope: Optional[LatticePolytope] = None,
    k: Optional[Sequence[int]] = None,
    max_minors: int = DEFAULT_MAX_MINORS,
    rng: Optional[random.Random] = None,
) -> ResultantOutput:
    """Sparse resultant of ``n+1`` polynomials with supports in ``k_i P``.

    Square layouts use the determinant, otherwise the minor gcd. Symbolic
    systems whose coefficients are not distinct parameters are solved on a
    generic system and the coefficients are substituted afterwards. A
    numeric determinant can differ from ``R^ell`` by an integer constant
    when some ``k_i > 1``.
    """
    if not polys:
        raise ArityMismatch("resultant of no polynomials")
    if any(p.is_zero for p in polys):
        raise ZeroPolynomial("resultant of a zero polynomial")
    polytope = polytope or default_polytope(polys)
    k = tuple(k) if k else (1,) * len(polys)
    layout = phi_layout(polytope, k)
    _check_supports(polys, polytope, k)
    if layout.nrows == layout.ncols and is_numeric(polys[0].domain):
        return resultant_via_det(build_phi(polys, polytope, k))
    supports = [scaled_lattice_points(polytope, ki) for ki in k]
    if is_generic_system(polys, supports):
        return _resultant_of(build_phi(polys, polytope, k), max_minors, rng)
    system = generic_system(polys, supports)
    generic = _resultant_of(build_phi(system.polynomials, polytope, k), max_minors, rng)
    value = system.specialize(generic.polynomial)
    target = system.target
    return ResultantOutput(
        polynomial=value,
        domain=target,
        ell=generic.ell,
        method=f"{generic.method}+substitution",
        degree=element_degree(target, value),
        predicted_degree=generic.predicted_degree,
        certified=generic.certified,
        minors_used=generic.minors_used,
    )


# --- Univariate Sylvester ---


def sylvester_det(f: Sequence[Any], g: Sequence[Any], domain: Domain) -> Any:
    """Sylvester determinant of coefficient lists (ascending) of formal degrees ``len-1``."""
    d = len(f) - 1
    e = len(g) - 1
    size = d + e
    if size == 0:
        return domain.one
    rows = []
    for shift in range(e):
        rows.append([domain.zero] * shift + list(f) + [domain.zero] * (size - shift - d - 1))
    for shift in range(d):
        rows.append([domain.zero] * shift + list(g) + [domain.zero] * (size - shift - e - 1))
    return fraction_free_det(PolyMatrix.from_rows(domain, rows))


def _coefficient_list(p: SparsePolynomial) -> list[Any]:
    low = p.min_exponents()[0]
    high = p.max_exponents()[0]
    return [p.coefficient((i,)) for i in range(low, high + 1)]


def univariate_sylvester(f: SparsePolynomial, g: SparsePolynomial) -> Any:
    """Classical resultant of two univariate Laurent polynomials after translation."""
    if f.nvars != 1 or g.nvars != 1:
        raise ArityMismatch("univariate Sylvester needs univariate polynomials")
    if f.is_zero or g.is_zero:
        raise ZeroPolynomial("Sylvester resultant of a zero polynomial")
    g = f._coerce(g)
    return sylvester_det(_coefficient_list(f), _coefficient_list(g), f.domain)


# --- Facet resultants ---


def _face_coefficients(p: SparsePolynomial, face: Sequence[Point]) -> list[Any]:
    return [p.coefficient(point) for point in face]


def _curve_facet(coeffs: Sequence[list[Any]], projected: Sequence[Sequence[Point]], domain: Domain) -> tuple[Any, int]:
    """Facet resultant base and index for ``n = 2`` (faces on a line)."""
    coords = [[q[0] for q in face] for face in projected]
    lows = [min(c) for c in coords]
    ell = 0
    for c, low in zip(coords, lows):
        for x in c:
            ell = gcd(ell, x - low)
    if ell == 0:
        return domain.one, 1
    lists = []
    for c, low, values in zip(coords, lows, coeffs):
        degree = (max(c) - low) // ell
        dense = [domain.zero] * (degree + 1)
        for x, value in zip(c, values):
            dense[(x - low) // ell] = value
        lists.append(dense)
    return sylvester_det(lists[0], lists[1], domain), ell


def _surface_facet(
    polys: Sequence[SparsePolynomial],
    faces: Sequence[Sequence[Point]],
    projected: Sequence[Sequence[Point]],
    domain: Domain,
    rng: Optional[random.Random],
) -> tuple[Any, int, str]:
    """Facet resultant base and index for ``n = 3`` (faces in a plane)."""
    points = [i for i, face in enumerate(projected) if len(face) == 1]
    if len(points) >= 2:
        return domain.one, 1, "point-faces"
    shadows = [convex_hull(face) for face in projected]
    if len(points) == 1:
        j = points[0]
        others = [s for i, s in enumerate(shadows) if i != j]
        if any(not s.is_full_dimensional for s in others):
            volume = 0
        else:
            volume = mixed_volume(others)
        coeff = polys[j].coefficient(faces[j][0])
        return coeff**volume if volume else domain.one, 1, "point-face"
    anchored = []
    for shadow in shadows:
        if not shadow.is_full_dimensional:
            raise UnsupportedFaceConfiguration("lower-dimensional face in a mixed facet system")
        base = min(shadow.vertices)
        translated = sorted(tuple(a - b for a, b in zip(v, base)) for v in shadow.vertices)
        scale = 0
        for v in translated:
            for x in v:
                scale = gcd(scale, x)
        anchored.append((base, scale, tuple(tuple(x // scale for x in v) for v in translated)))
    if len({shape for _, _, shape in anchored}) != 1:
        raise UnsupportedFaceConfiguration("facet system is genuinely mixed")
    common = convex_hull(anchored[0][2])
    k = tuple(scale for _, scale, _ in anchored)
    variables = ("s1", "s2")
    face_polys = []
    for face, image, (base, _, _), p in zip(faces, projected, anchored, polys):
        face_polys.append(SparsePolynomial.from_terms(
            variables, domain,
            [(tuple(a - b for a, b in zip(q, base)), p.coefficient(point)) for point, q in zip(face, image)],
        ))
    output = resultant(face_polys, common, k, rng=rng)
    if output.ell != 1:
        raise UnsupportedFaceConfiguration(f"facet system over a polytope with index {output.ell}")
    return output.polynomial, 1, "phi"


def facet_resultants(
    polys: Sequence[SparsePolynomial],
    supports: Optional[Sequence[Sequence[Point]]] = None,
    rng: Optional[random.Random] = None,
) -> FacetResultantSet:
    """Resultants of the leading forms of ``n`` polynomials on every facet of their Minkowski sum."""
    if not polys:
        raise ArityMismatch("facet resultants of no polynomials")
    n = polys[0].nvars
    if len(polys) != n:
        raise ArityMismatch(f"facet resultants need {n} polynomials in {n} variables")
    domain = polys[0].domain
    deltas = [newton_polytope(p) for p in polys]
    if supports is None:
        supports = [scaled_lattice_points(delta) for delta in deltas]
    total = minkowski_sum(deltas).polytope
    if not total.is_full_dimensional:
        raise InvalidPolytope("the Minkowski sum of the Newton polytopes is not full-dimensional")
    entries = []
    for facet in total.facets:
        data = face_data(supports, facet)
        coeffs = [_face_coefficients(p, face) for p, face in zip(polys, data.face_supports)]
        if n == 1:
            base, ell, method = coeffs[0][0], 1, "endpoint"
        elif n == 2:
            base, ell = _curve_facet(coeffs, data.projected_supports, domain)
            method = "sylvester"
        else:
            base, ell, method = _surface_facet(polys, data.face_supports, data.projected_supports, domain, rng)
        entries.append(FacetResultant(
            facet=facet,
            face_supports=data.face_supports,
            projected_supports=data.projected_supports,
            ell=ell,
            resultant=base**ell,
            base=base,
            method=method,
        ))
    logger.info("computed %d facet resultants", len(entries))
    return FacetResultantSet(domain, tuple(entries))


def monomial_specialized_resultant(
    m: Sequence[int], facet_set: FacetResultantSet, k0: int, polytope: LatticePolytope
) -> Factorization:
    """``prod_i (R^eta_i)^(<m, eta_i> + k0 b_i)``: the resultant with ``F_0 = t^m``."""
    factors = []
    for facet in polytope.facets:
        exponent = dot(m, facet.normal) + k0 * facet.offset
        if exponent < 0:
            raise NegativeExponent(f"{tuple(m)} lies outside {k0}P (facet {facet.normal})")
        if exponent:
            entry = facet_set.for_normal(facet.normal)
            factors.append(FactorPower(entry.label, entry.resultant, exponent))
    return Factorization(facet_set.domain, QQ.one, tuple(factors))


