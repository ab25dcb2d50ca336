"""Homogeneous coordinate ring of the toric variety of a lattice polytope.

One variable ``x_i`` per facet. A monomial ``x^a`` has degree ``[sum a_i D_i]``
in the class group; monomials of degree ``k*beta`` correspond to the lattice
points of ``kP`` and those of degree ``k*beta - beta0`` to the interior points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.domains import QQ

from toricres.config import COX_VARIABLE_PREFIX, TORUS_VARIABLE_PREFIX
from toricres.errors import (
    ArityMismatch,
    DegreeMismatch,
    InvalidPolytope,
    NoIndependentSubset,
    NonExactDivision,
    NotOfDegreeKBeta,
    SupportOutsidePolytope,
)
from toricres.lattice import dot, integer_det, scaled_lattice_points
from toricres.linalg import expansion_det, rref
from toricres.models import (
    CoxPolynomial,
    DegreeClass,
    EulerFormTable,
    EulerTerm,
    LatticePolytope,
    Point,
)
from toricres.polynomials import SparsePolynomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoxRing:
    """The ring ``QQ[x_1..x_s]`` graded by the class group of ``P``'s toric variety."""

    polytope: LatticePolytope
    torus_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.polytope.is_full_dimensional:
            raise InvalidPolytope("the Cox ring needs a full-dimensional polytope")
        if self.torus_names and len(self.torus_names) != self.polytope.ambient_dim:
            raise ArityMismatch("torus variable count differs from the ambient dimension")

    @classmethod
    def from_polytope(cls, polytope: LatticePolytope, torus_variables: Sequence[str] = ()) -> CoxRing:
        return cls(polytope, tuple(torus_variables))

    @property
    def s(self) -> int:
        return len(self.polytope.facets)

    @property
    def n(self) -> int:
        return self.polytope.ambient_dim

    @property
    def normals(self) -> tuple[Point, ...]:
        return self.polytope.normals

    @property
    def offsets(self) -> tuple[int, ...]:
        return self.polytope.offsets

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(f"{COX_VARIABLE_PREFIX}{i + 1}" for i in range(self.s))

    @property
    def torus_variables(self) -> tuple[str, ...]:
        if self.torus_names:
            return self.torus_names
        return tuple(f"{TORUS_VARIABLE_PREFIX}{i + 1}" for i in range(self.n))

    # --- Class group ---

    @cached_property
    def _relations(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        """Hermite basis of ``{<m, eta>}`` as (column, pivot row), pivots descending."""
        pairing = Matrix([list(eta) for eta in self.normals])
        hnf = hermite_normal_form(pairing)
        columns = []
        for j in range(hnf.cols):
            column = tuple(int(x) for x in hnf.col(j))
            pivot = max(i for i, x in enumerate(column) if x)
            columns.append((column, pivot))
        columns.sort(key=lambda item: item[1], reverse=True)
        return tuple(columns)

    def reduce(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of ``vector`` modulo the relations."""
        v = list(vector)
        for column, pivot in self._relations:
            q = v[pivot] // column[pivot]
            if q:
                v = [a - q * c for a, c in zip(v, column)]
        return tuple(v)

    def degree_of(self, exponent: Sequence[int]) -> DegreeClass:
        if len(exponent) != self.s:
            raise ArityMismatch(f"exponent {tuple(exponent)} has arity {len(exponent)}, ring has {self.s}")
        return DegreeClass(tuple(exponent), self.reduce(exponent))

    def degree_multiple(self, k: int, interior: bool = False) -> DegreeClass:
        """``k*beta``, or ``k*beta - beta0`` when ``interior``."""
        shift = 1 if interior else 0
        return self.degree_of(tuple(k * b - shift for b in self.offsets))

    @property
    def beta(self) -> DegreeClass:
        return self.degree_multiple(1)

    @property
    def beta0(self) -> DegreeClass:
        return self.degree_of((1,) * self.s)

    # --- Monomials and lattice points ---

    def exponent_of(self, point: Sequence[int], k: int, interior: bool = False) -> tuple[int, ...]:
        shift = 1 if interior else 0
        return tuple(dot(point, eta) + k * b - shift for eta, b in zip(self.normals, self.offsets))

    @cached_property
    def _independent_facets(self) -> tuple[int, ...]:
        for subset in combinations(range(self.s), self.n):
            if integer_det([self.normals[i] for i in subset]):
                return subset
        raise NoIndependentSubset("no n linearly independent facet normals")

    def monomial_point(self, exponent: Sequence[int], k: int, interior: bool = False) -> Point:
        """The unique ``m`` with ``x^exponent`` the image of ``t^m``."""
        subset = self._independent_facets
        shift = 1 if interior else 0
        rows = [
            list(self.normals[i]) + [exponent[i] - k * self.offsets[i] + shift]
            for i in subset
        ]
        reduced, _ = rref(rows)
        solution = [reduced[i][self.n] for i in range(self.n)]
        if any(QQ.denom(x) != 1 for x in solution):
            raise NotOfDegreeKBeta(f"{tuple(exponent)} is not of degree {k}*beta")
        point = tuple(int(QQ.numer(x)) for x in solution)
        if self.exponent_of(point, k, interior) != tuple(exponent):
            raise NotOfDegreeKBeta(f"{tuple(exponent)} is not of degree {k}*beta")
        return point

    def graded_monomials(self, k: int, interior: bool = False) -> tuple[tuple[int, ...], ...]:
        """Exponents of degree ``k*beta`` (or ``k*beta - beta0``), in lattice-point order."""
        points = scaled_lattice_points(self.polytope, k, strict=interior)
        return tuple(self.exponent_of(p, k, interior) for p in points)

    def monomial(self, exponent: Sequence[int], domain, coeff=1) -> SparsePolynomial:
        return SparsePolynomial.monomial(self.variables, domain, exponent, coeff)


# --- Homogenization ---


def homogenize(f: SparsePolynomial, ring: CoxRing, k: int, interior: bool = False) -> CoxPolynomial:
    """The ``kP``-homogenization ``t^m -> prod x_i^(<m, eta_i> + k b_i)``."""
    if f.nvars != ring.n:
        raise ArityMismatch(f"{f.nvars} variables for a ring of dimension {ring.n}")
    terms = []
    for point, coeff in f.terms:
        exponent = ring.exponent_of(point, k, interior)
        if any(e < 0 for e in exponent):
            raise SupportOutsidePolytope(f"exponent {point} lies outside {k}P")
        terms.append((exponent, coeff))
    polynomial = SparsePolynomial.from_terms(ring.variables, f.domain, terms)
    return CoxPolynomial(polynomial, k, interior)


def homogenize_summand(f: SparsePolynomial, ring: CoxRing, offsets: Sequence[int]) -> SparsePolynomial:
    """Homogenization with respect to a Minkowski summand of ``ring.polytope``.

    ``offsets[i]`` is ``-min <., eta_i>`` over the summand, as in ``MinkowskiSum.summand_offsets``.
    """
    if f.nvars != ring.n:
        raise ArityMismatch(f"{f.nvars} variables for a ring of dimension {ring.n}")
    if len(offsets) != ring.s:
        raise ArityMismatch(f"{len(offsets)} offsets for {ring.s} facets")
    terms = []
    for point, coeff in f.terms:
        exponent = tuple(dot(point, eta) + a for eta, a in zip(ring.normals, offsets))
        if any(e < 0 for e in exponent):
            raise SupportOutsidePolytope(f"exponent {point} lies outside the summand")
        terms.append((exponent, coeff))
    return SparsePolynomial.from_terms(ring.variables, f.domain, terms)


def dehomogenize(F: CoxPolynomial, ring: CoxRing, variables: Sequence[str] = ()) -> SparsePolynomial:
    """Inverse of ``homogenize`` through the monomial bijection."""
    names = tuple(variables) or ring.torus_variables
    terms = [
        (ring.monomial_point(exponent, F.k, F.interior), coeff)
        for exponent, coeff in F.polynomial.terms
    ]
    return SparsePolynomial.from_terms(names, F.polynomial.domain, terms)


def check_degree(F: CoxPolynomial, ring: CoxRing) -> None:
    """Raise DegreeMismatch unless every monomial of ``F`` has the declared degree."""
    expected = ring.degree_multiple(F.k, F.interior)
    for exponent in F.polynomial.support:
        if ring.degree_of(exponent) != expected:
            raise DegreeMismatch(f"monomial {exponent} is not of degree {expected.canonical}")


# --- Euler form ---


def euler_form(ring: CoxRing) -> EulerFormTable:
    terms = []
    for subset in combinations(range(ring.s), ring.n):
        det = integer_det([ring.normals[i] for i in subset])
        if not det:
            continue
        complement = tuple(0 if i in subset else 1 for i in range(ring.s))
        terms.append(EulerTerm(subset, det, complement))
    return EulerFormTable(ring.variables, tuple(terms))


# --- Jacobians ---


def _polynomial_det(rows: Sequence[Sequence[SparsePolynomial]]) -> SparsePolynomial:
    sample = rows[0][0]
    zero = SparsePolynomial.zero(sample.variables, sample.domain)
    one = SparsePolynomial.constant(sample.variables, sample.domain, 1)
    return expansion_det(rows, zero, one)


def _divide_by_euler_term(det: SparsePolynomial, term: EulerTerm) -> SparsePolynomial:
    for exponent in det.support:
        if any(e < c for e, c in zip(exponent, term.complement)):
            raise NonExactDivision(f"bordered determinant is not divisible by x^{term.complement}")
    shifted = det.shift([-c for c in term.complement])
    return shifted.scale(QQ(1, term.det))


def _bordered_jacobian(F: Sequence[CoxPolynomial], term: EulerTerm) -> SparsePolynomial:
    rows = [[G.polynomial.scale(G.k) for G in F]]
    for i in term.subset:
        rows.append([G.polynomial.derivative(i) for G in F])
    return _divide_by_euler_term(_polynomial_det(rows), term)


def toric_jacobian(F: Sequence[CoxPolynomial], ring: CoxRing, cross_check: bool = True) -> CoxPolynomial:
    """Toric Jacobian of ``n+1`` forms of degrees ``k_i * beta``.

    Computed as a bordered determinant over the first facet subset with
    nonzero determinant, divided by that determinant and the complementary
    monomial. With ``cross_check`` a second subset must give the same result.
    """
    if len(F) != ring.n + 1:
        raise ArityMismatch(f"toric Jacobian needs {ring.n + 1} forms, got {len(F)}")
    for G in F:
        if G.interior:
            raise DegreeMismatch("toric Jacobian inputs must have degree k*beta")
        check_degree(G, ring)
    table = euler_form(ring)
    if not table.terms:
        raise NoIndependentSubset("every facet subset has zero determinant")
    jacobian = _bordered_jacobian(F, table.terms[0])
    if cross_check and len(table.terms) > 1:
        alternative = _bordered_jacobian(F, table.terms[-1])
        if alternative != jacobian:
            raise NonExactDivision("toric Jacobian depends on the chosen facet subset")
    kappa = sum(G.k for G in F)
    logger.debug("toric Jacobian of degree %d*beta - beta0 has %d terms", kappa, len(jacobian.terms))
    return CoxPolynomial(jacobian, kappa, interior=True)


def affine_jacobian(f: Sequence[SparsePolynomial], weights: Sequence[int] = ()) -> SparsePolynomial:
    """``det`` of the matrix with first row ``k_i f_i`` and rows ``t_l df_i/dt_l``."""
    if not f:
        raise ArityMismatch("affine Jacobian of no polynomials")
    n = f[0].nvars
    if len(f) != n + 1:
        raise ArityMismatch(f"affine Jacobian needs {n + 1} polynomials in {n} variables")
    weights = tuple(weights) or (1,) * len(f)
    rows = [[p.scale(w) for p, w in zip(f, weights)]]
    for l in range(n):
        rows.append([p.log_derivative(l) for p in f])
    return _polynomial_det(rows)


def bracket_expansion(f: Sequence[SparsePolynomial]) -> SparsePolynomial:
    """Cauchy-Binet form of the affine Jacobian over the shared support."""
    if not f:
        raise ArityMismatch("bracket expansion of no polynomials")
    n = f[0].nvars
    if len(f) != n + 1:
        raise ArityMismatch(f"bracket expansion needs {n + 1} polynomials in {n} variables")
    domain = f[0].domain
    support = sorted({e for p in f for e in p.support})
    terms = []
    for chosen in combinations(support, n + 1):
        lifted = integer_det([(1,) + tuple(m) for m in chosen])
        if not lifted:
            continue
        bracket = expansion_det(
            [[p.coefficient(m) for m in chosen] for p in f], domain.zero, domain.one
        )
        if bracket:
            exponent = tuple(sum(c) for c in zip(*chosen))
            terms.append((exponent, bracket * lifted))
    return SparsePolynomial.from_terms(f[0].variables, domain, terms)


def bracket_presentation(f: Sequence[SparsePolynomial], support: Sequence[Point]) -> dict[Point, str]:
    """Coefficients of the affine Jacobian as signed sums of bracket tokens.

    ``[125]`` stands for the determinant of the coefficients of ``f`` at the
    first, second and fifth points of ``support``.
    """
    if not f:
        raise ArityMismatch("bracket presentation of no polynomials")
    n = f[0].nvars
    wide = len(support) > 9
    collected: dict[Point, list[tuple[int, str]]] = {}
    for chosen in combinations(range(len(support)), n + 1):
        points = [support[i] for i in chosen]
        lifted = integer_det([(1,) + tuple(m) for m in points])
        if not lifted:
            continue
        token = "[" + ("," if wide else "").join(str(i + 1) for i in chosen) + "]"
        exponent = tuple(sum(c) for c in zip(*points))
        collected.setdefault(exponent, []).append((lifted, token))
    return {exponent: _signed_tokens(terms) for exponent, terms in collected.items()}


def _signed_tokens(terms: Sequence[tuple[int, str]]) -> str:
    pieces = []
    for index, (coeff, token) in enumerate(terms):
        body = token if abs(coeff) == 1 else f"{abs(coeff)}*{token}"
        if index == 0:
            pieces.append(f"-{body}" if coeff < 0 else body)
        else:
            pieces.append(f" - {body}" if coeff < 0 else f" + {body}")
    return "".join(pieces)


def toric_affine_jacobian(f: Sequence[SparsePolynomial]) -> SparsePolynomial:
    """``det(t_k df_j/dt_k)`` for ``n`` polynomials in ``n`` variables."""
    if not f:
        raise ArityMismatch("toric affine Jacobian of no polynomials")
    n = f[0].nvars
    if len(f) != n:
        raise ArityMismatch(f"toric affine Jacobian needs {n} polynomials in {n} variables")
    rows = [[p.log_derivative(k) for p in f] for k in range(n)]
    return _polynomial_det(rows)


def degree_class_text(cls: DegreeClass) -> str:
    """``[a1 D1 + ...]`` in facet order, from the canonical representative."""
    parts = [f"{a}*D{i + 1}" for i, a in enumerate(cls.canonical) if a]
    return "[" + " + ".join(parts) + "]" if parts else "[0]"


