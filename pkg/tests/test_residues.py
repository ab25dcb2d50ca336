"""Tests for toric residues, global residues and their denominators."""

from __future__ import annotations

import random

import pytest
from sympy.polys.domains import QQ

from toricres.config import Strategy
from toricres.cox import CoxRing, toric_affine_jacobian
from toricres.errors import (
    ArityMismatch,
    DegenerateLeadingForm,
    DegreeMismatch,
    DenominatorNotCertified,
    FacetResultantVanishes,
    ResultantVanishes,
)
from toricres.formatting import format_point
from toricres.lattice import convex_hull, scaled_lattice_points
from toricres.parser import parse_polynomial
from toricres.polynomials import RationalFunction, SparsePolynomial, coefficient_domain
from toricres.residues import (
    ToricResidueProblem,
    certify_denominator,
    completion_vector,
    completion_vectors,
    denominator_bound,
    global_residue,
    global_residue_mixed,
    global_residue_unmixed,
    mu_split,
    residue_of_monomial,
    satisfies_monomial_face_condition,
    substitute_generic,
    toric_residue,
    univariate_residue_oracle,
)
from toricres.resultants import facet_resultants, generic_system, phi_jacobian

SIMPLEX = convex_hull([(0, 0), (1, 0), (0, 1)])
DOUBLE_SIMPLEX = convex_hull([(0, 0), (2, 0), (0, 2)])
QUADRANGLE = convex_hull([(0, 0), (3, 0), (1, 1), (0, 1)])

R_INFINITY = "a0^2*b2^2 - a0*a1*b1*b2 - 2*a0*a2*b0*b2 + a0*a2*b1^2 + a1^2*b0*b2 - a1*a2*b0*b1 + a2^2*b0^2"
R_X = "a0^2*b5^2 - a0*a3*b3*b5 - 2*a0*a5*b0*b5 + a0*a5*b3^2 + a3^2*b0*b5 - a3*a5*b0*b3 + a5^2*b0^2"
R_Y = "a2^2*b5^2 - a2*a4*b4*b5 - 2*a2*a5*b2*b5 + a2*a5*b4^2 + a4^2*b2*b5 - a4*a5*b2*b4 + a5^2*b2^2"

CONIC_NUMERATOR = (
    "a0^2*a1*b2^2*b4 - 2*a0^2*a2*b1*b2*b4 + a0^2*a2*b2^2*b3 - a0^2*a3*b2^3 + a0^2*a4*b1*b2^2"
    " - a0*a1^2*b2^2*b3 + 2*a0*a1*a2*b1*b2*b3 - 2*a0*a1*a4*b0*b2^2 + 2*a0*a2^2*b0*b1*b4"
    " - 2*a0*a2^2*b0*b2*b3 - a0*a2^2*b1^2*b3 + 2*a0*a2*a3*b0*b2^2 + a1^2*a3*b0*b2^2"
    " - a1*a2^2*b0^2*b4 - 2*a1*a2*a3*b0*b1*b2 + 2*a1*a2*a4*b0^2*b2 + a2^3*b0^2*b3"
    " - a2^2*a3*b0^2*b2 + a2^2*a3*b0*b1^2 - a2^2*a4*b0^2*b1"
)


def _numeric(variables: tuple[str, ...], *texts: str):
    return [parse_polynomial(t, variables, QQ) for t in texts]


def _univariate(params: list[str], text: str):
    return parse_polynomial(text, ("t",), coefficient_domain(params))


def _same_fraction(value: RationalFunction, numerator, denominator) -> bool:
    return value.numerator * denominator == numerator * value.denominator


def _simplex_problem(numerator_text: str | None = None) -> ToricResidueProblem:
    forms = _numeric(("t1", "t2"), "1 + t1^2 + 3*t2^2 + t1*t2", "2 + t1 - t2", "1 - t1 + 3*t2")
    k = (2, 1, 1)
    if numerator_text is None:
        numerator = phi_jacobian(forms, SIMPLEX, k)
    else:
        (numerator,) = _numeric(("t1", "t2"), numerator_text)
    return ToricResidueProblem(SIMPLEX, tuple(forms), k, numerator)


def _random_forms(rng: random.Random, polytope, k) -> tuple[SparsePolynomial, ...]:
    return tuple(
        SparsePolynomial.from_terms(
            ("t1", "t2"), QQ, [(p, rng.randint(-20, 20)) for p in scaled_lattice_points(polytope, ki)]
        )
        for ki in k
    )


# --- Test: toric residues ---

class TestToricResidue:
    def test_jacobian_gives_the_normalization(self) -> None:
        """Res(J) = k0*k1*k2 * Vol(P) = 2 on the plane with k = (2, 1, 1)."""
        problem = _simplex_problem()
        assert problem.normalization == 2
        result = toric_residue(problem)
        assert result.value.numerator == 2
        assert result.strategy == "numeric"

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("polytope", [SIMPLEX, DOUBLE_SIMPLEX, QUADRANGLE])
    @pytest.mark.parametrize("k", [(1, 1, 1), (2, 1, 1)])
    def test_jacobian_residue_of_random_systems(self, seed: int, polytope, k) -> None:
        forms = _random_forms(random.Random(seed), polytope, k)
        problem = ToricResidueProblem(polytope, forms, k, phi_jacobian(forms, polytope, k))
        result = toric_residue(problem)
        assert (result.value.numerator, result.value.denominator) == (problem.normalization, 1)

    def test_ideal_member_has_zero_residue(self) -> None:
        result = toric_residue(_simplex_problem("2*t1*t2 + t1^2*t2 - t1*t2^2"))
        assert result.value.is_zero

    def test_linearity(self) -> None:
        """Adding an ideal member does not change the residue."""
        jacobian = toric_residue(_simplex_problem()).value
        shifted_problem = _simplex_problem()
        numerator = shifted_problem.numerator + _numeric(("t1", "t2"), "2*t1*t2 + t1^2*t2 - t1*t2^2")[0]
        shifted = ToricResidueProblem(SIMPLEX, shifted_problem.forms, shifted_problem.k, numerator)
        assert toric_residue(shifted).value == jacobian

    def test_symbolic_linear_forms(self, linear_forms) -> None:
        """With a 1x1 Phi the residue of t1*t2 is 1/J."""
        numerator = linear_forms.poly("t1*t2")
        problem = ToricResidueProblem(SIMPLEX, linear_forms.polys, (1, 1, 1), numerator)
        result = toric_residue(problem)
        jacobian = phi_jacobian(linear_forms.polys, SIMPLEX, (1, 1, 1)).coefficient((1, 1))
        assert result.value == RationalFunction.build(1, jacobian, linear_forms.domain)
        assert result.strategy == "cramer"

    def test_common_root_detected(self) -> None:
        forms = _numeric(("t1", "t2"), "1 - t1", "1 - t2", "t1 - t2")
        (numerator,) = _numeric(("t1", "t2"), "t1*t2")
        with pytest.raises(ResultantVanishes):
            toric_residue(ToricResidueProblem(SIMPLEX, tuple(forms), (1, 1, 1), numerator))

    def test_numerator_outside_interior(self) -> None:
        with pytest.raises(DegreeMismatch):
            _simplex_problem("1")

    def test_wrong_number_of_forms(self) -> None:
        forms = _numeric(("t1", "t2"), "1 + t1", "1 + t2")
        with pytest.raises(ArityMismatch):
            ToricResidueProblem(SIMPLEX, tuple(forms), (1, 1), forms[0])


# --- Test: exponent bookkeeping ---

class TestExponents:
    def test_mu_split_quadrics(self) -> None:
        normals = [f.normal for f in DOUBLE_SIMPLEX.facets]
        offsets = [2 * f.offset for f in DOUBLE_SIMPLEX.facets]
        assert mu_split((3, 2), normals, offsets) == ((0, 1, 2), (2, 0, 0))

    def test_mu_split_inside(self) -> None:
        normals = [f.normal for f in DOUBLE_SIMPLEX.facets]
        offsets = [2 * f.offset for f in DOUBLE_SIMPLEX.facets]
        assert mu_split((1, 1), normals, offsets)[1] == (0, 0, 0)

    @pytest.mark.parametrize("a", [(2, 0, 0), (0, 3, 1), (1, 2, 2), (0, 0, 5)])
    def test_completion_has_a_multiple_of_beta(self, a) -> None:
        ring = CoxRing.from_polytope(DOUBLE_SIMPLEX, ("t1", "t2"))
        completion = completion_vector(ring, a)
        assert min(completion.c) >= 0
        total = tuple(x + c for x, c in zip(a, completion.c))
        assert ring.degree_of(total) == ring.degree_multiple(completion.k0)

    def test_completion_avoids_a_facet(self) -> None:
        ring = CoxRing.from_polytope(DOUBLE_SIMPLEX, ("t1", "t2"))
        completion = completion_vector(ring, (0, 1, 0), avoid=1)
        assert completion.c[1] == 0

    def test_distinct_completions(self) -> None:
        ring = CoxRing.from_polytope(DOUBLE_SIMPLEX, ("t1", "t2"))
        found = completion_vectors(ring, (0, 0, 0), 3)
        assert len({c.c for c in found}) == 3
        assert all(c.k0 == 1 for c in found)


# --- Test: denominators ---

class TestDenominators:
    def test_bound_is_a_facet_power(self, quadrics) -> None:
        facets = facet_resultants(quadrics.polys)
        bound = denominator_bound((2, 0, 0), facets)
        assert bound.exponents() == {"(-1,-1)": 2}
        assert bound.expand() == quadrics.element(R_INFINITY) ** 2

    def test_certified_split(self, quadrics) -> None:
        facets = facet_resultants(quadrics.polys)
        value = RationalFunction.build(1, quadrics.element(R_INFINITY) ** 2, quadrics.domain)
        assert certify_denominator(value, facets, (2, 0, 0)).exponents() == {"(-1,-1)": 2}

    def test_foreign_factor_rejected(self, quadrics) -> None:
        facets = facet_resultants(quadrics.polys)
        value = RationalFunction.build(1, quadrics.element("a0 + b0"), quadrics.domain)
        with pytest.raises(DenominatorNotCertified):
            certify_denominator(value, facets, (2, 0, 0))

    def test_polynomial_needs_no_factors(self, quadrics) -> None:
        facets = facet_resultants(quadrics.polys)
        value = RationalFunction.from_element(quadrics.element("a0"), quadrics.domain)
        assert certify_denominator(value, facets, (0, 0, 0)).factors == ()


# --- Test: global residues ---

class TestUnivariateResidues:
    @pytest.mark.parametrize("m, expected", [
        (-1, QQ(-3, 4)),
        (0, QQ(-1, 2)),
        (1, QQ(0)),
        (2, QQ(1)),
        (3, QQ(3)),
    ])
    def test_two_roots(self, m: int, expected) -> None:
        """Roots 1 and 2 give -1 + 2^(m-1)."""
        f = _univariate([], "t^2 - 3*t + 2")
        assert residue_of_monomial([f], (m,)).value.numerator == expected
        assert univariate_residue_oracle(f, m).numerator == expected

    def test_generic_quadratic(self) -> None:
        """Res(1) = -1/a0 for every quadratic."""
        f = _univariate(["a0", "a1", "a2"], "a0 + a1*t + a2*t^2")
        a0 = f.domain.ring.gens[0]
        result = residue_of_monomial([f], (0,))
        assert result.value == RationalFunction.build(-1, a0, f.domain)
        assert result.denominator.exponents() == {format_point((1,)): 1}

    @pytest.mark.parametrize("strategy", [Strategy.CRAMER, Strategy.INTERPOLATE])
    def test_strategies_agree(self, strategy: Strategy) -> None:
        """Res(t^3) = -a1/a2^2."""
        f = _univariate(["a0", "a1", "a2"], "a0 + a1*t + a2*t^2")
        _, a1, a2 = f.domain.ring.gens
        result = residue_of_monomial([f], (3,), strategy)
        assert result.value == RationalFunction.build(-a1, a2**2, f.domain)
        assert result.mu_minus == (2, 0)

    @pytest.mark.slow
    @pytest.mark.parametrize("degree, m", [(d, m) for d in (1, 2, 3) for m in range(-3, 7)])
    def test_generic_residue_matches_the_oracle(self, degree: int, m: int) -> None:
        params = [f"a{i}" for i in range(degree + 1)]
        f = _univariate(params, " + ".join(["a0", "a1*t"] + [f"a{i}*t^{i}" for i in range(2, degree + 1)]))
        expected = univariate_residue_oracle(f, m)
        result = global_residue_unmixed([f], (m,))
        assert _same_fraction(result.value, expected.numerator, expected.denominator)

    def test_specialized_coefficients(self) -> None:
        """Coefficients that are not bare parameters go through a generic system."""
        f = _univariate(["a"], "t^2 + a*t + 2")
        result = residue_of_monomial([f], (0,))
        assert result.value == RationalFunction.build(QQ(-1, 2), 1, f.domain)

    def test_oracle_errors(self, numeric_conics) -> None:
        with pytest.raises(ArityMismatch):
            univariate_residue_oracle(numeric_conics.polys[0], 0)
        with pytest.raises(DegenerateLeadingForm):
            univariate_residue_oracle(_univariate([], "t^2"), 0)

    def test_unmixed_route_directly(self) -> None:
        f = _univariate([], "t^2 - 3*t + 2")
        assert global_residue_unmixed([f], (2,)).value.numerator == QQ(1)
        assert global_residue_unmixed([f], (0,)).value.numerator == QQ(-1, 2)

    def test_generic_result_substituted(self) -> None:
        """Sum over product of the generic coefficients becomes (1 + a + 2) / (2a)."""
        f = _univariate(["a"], "t^2 + a*t + 2")
        system = generic_system([f], [tuple(f.support)])
        generators = system.domain.ring.gens
        numerator = sum(generators[1:], generators[0])
        denominator = generators[0] * generators[1] * generators[2]
        value = substitute_generic(RationalFunction.build(numerator, denominator, system.domain), system)
        (a,) = f.domain.ring.gens
        assert value == RationalFunction.build(a + 3, 2 * a, f.domain)


class TestPlaneResidues:
    @pytest.mark.parametrize("m, expected", [
        ((0, 0), QQ(0)),
        ((2, 0), QQ(1, 2)),
        ((0, 2), QQ(-1, 2)),
    ])
    def test_circle_and_hyperbola(self, numeric_conics, m, expected) -> None:
        result = residue_of_monomial(numeric_conics.polys, m)
        assert result.value.numerator == expected
        assert len(result.seeds) == 2

    def test_mixed_route_directly(self, numeric_conics) -> None:
        result = global_residue_mixed(numeric_conics.polys, (2, 0))
        assert result.value.numerator == QQ(1, 2)
        assert len(result.seeds) == 2

    def test_vanishing_facet_without_a_pole(self) -> None:
        """Both conics restrict to t^2 - 5 on the axes, which t1*t2 does not see."""
        polys = _numeric(("t1", "t2"), "t1^2 + t2^2 - 5", "t1^2 + t1*t2 + t2^2 - 5")
        result = residue_of_monomial(polys, (1, 1))
        assert result.value.is_zero
        assert sorted(result.completion.c) == [0, 0, 2]

    def test_vanishing_facet_with_a_pole(self) -> None:
        polys = _numeric(("t1", "t2"), "t1^2 + t2^2 - 5", "t1^2 + t1*t2 + t2^2 - 5")
        with pytest.raises(FacetResultantVanishes):
            residue_of_monomial(polys, (0, 1))

    @pytest.mark.slow
    @pytest.mark.parametrize("i", range(5))
    @pytest.mark.parametrize("j", range(5))
    def test_conic_residue_grid(self, quadrics, i: int, j: int) -> None:
        """The reduced denominator divides the facet bound; t1 = 0 carries R_Y and t2 = 0 carries R_X."""
        result = residue_of_monomial(quadrics.polys, (i, j))
        bound = (
            quadrics.element(R_INFINITY) ** max(0, i + j - 3)
            * quadrics.element(R_Y) ** max(0, 1 - i)
            * quadrics.element(R_X) ** max(0, 1 - j)
        )
        assert bound % result.value.denominator == 0
        if i >= 1 and j >= 1 and i + j <= 3:
            assert result.value.is_zero

    def test_jacobian_counts_roots(self, numeric_conics) -> None:
        """The residue of the toric Jacobian is the number of torus roots."""
        jacobian = toric_affine_jacobian(numeric_conics.polys)
        assert global_residue(jacobian, numeric_conics.polys).value.numerator == 4

    def test_parallel_segments_vanish(self) -> None:
        polys = _numeric(("t1", "t2"), "t1 - 1", "t1 - 2")
        result = residue_of_monomial(polys, (0, 0))
        assert result.value.is_zero
        assert result.strategy == "zero"

    def test_arity_checked(self, numeric_conics) -> None:
        with pytest.raises(ArityMismatch):
            residue_of_monomial(numeric_conics.polys, (1,))

    @pytest.mark.slow
    def test_quadrics_outside_the_polytope(self, quadrics) -> None:
        """t1^3*t2^2 lies outside 2P, so R at infinity squared appears below."""
        result = residue_of_monomial(quadrics.polys, (3, 2))
        assert result.mu_minus == (2, 0, 0)
        assert _same_fraction(
            result.value, quadrics.element(CONIC_NUMERATOR), quadrics.element(R_INFINITY) ** 2
        )
        assert result.denominator.exponents() == {"(-1,-1)": 2}

    @pytest.mark.slow
    def test_mixed_triangles(self, mixed_triangles) -> None:
        result = residue_of_monomial(mixed_triangles.polys, (3, 3))
        assert result.mu_minus == (3, 1, 1, 0, 0)
        numerator = mixed_triangles.element(
            "a0*a1*a2*b0*b1*b2 + a0*a2^2*b0*b2^2 - a1^3*b0^2*b2 - a0^2*a2*b1^3"
        )
        denominator = mixed_triangles.element("a2*b2*(a1*b1 - a2*b2)^3")
        assert _same_fraction(result.value, numerator, denominator)


class TestFaceCondition:
    def test_two_segments(self) -> None:
        deltas = [convex_hull([(0, 0), (1, 0)]), convex_hull([(0, 0), (0, 1)])]
        assert satisfies_monomial_face_condition(deltas)

    def test_triangles_share_edges(self) -> None:
        deltas = [convex_hull([(1, 0), (1, 1), (0, 2)]), convex_hull([(0, 1), (1, 1), (2, 0)])]
        assert not satisfies_monomial_face_condition(deltas)

    @pytest.mark.parametrize("m", [(i, j) for i in range(-1, 3) for j in range(-1, 3)])
    def test_denominators_are_monomials(self, m) -> None:
        """For two transversal binomials the residue is xi^(m-1) / (a1*b1) at the single root."""
        domain = coefficient_domain(["a0", "a1", "b0", "b1"])
        polys = [parse_polynomial(t, ("t1", "t2"), domain) for t in ("a0 + a1*t1", "b0 + b1*t2")]
        a0, a1, b0, b1 = domain.ring.gens
        numerator, denominator = domain.one, domain.one
        for base, e in ((-a0, m[0] - 1), (a1, -m[0]), (-b0, m[1] - 1), (b1, -m[1])):
            if e >= 0:
                numerator *= base**e
            else:
                denominator *= base**-e
        result = residue_of_monomial(polys, m)
        assert len(result.value.denominator.terms()) == 1
        assert _same_fraction(result.value, numerator, denominator)
