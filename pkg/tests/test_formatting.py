"""Tests for canonical text and JSON forms."""

from __future__ import annotations

import random

import pytest
from sympy.polys.domains import QQ

from toricres.formatting import (
    element_json,
    format_monomial,
    format_point,
    format_polynomial,
    format_rational,
    format_rational_function,
    polynomial_json,
)
from toricres.parser import parse_polynomial
from toricres.polynomials import RationalFunction, SparsePolynomial, coefficient_domain


class TestScalars:
    @pytest.mark.parametrize("value, text", [
        (QQ(3, 2), "3/2"),
        (QQ(-1), "-1"),
        (QQ(0), "0"),
        (QQ(-7, 4), "-7/4"),
    ])
    def test_rationals(self, value, text: str) -> None:
        assert format_rational(value) == text

    def test_monomial(self) -> None:
        assert format_monomial(("t1", "t2"), (2, 1)) == "t1^2*t2"
        assert format_monomial(("t1", "t2"), (0, -1)) == "t2^-1"
        assert format_monomial(("t1", "t2"), (0, 0)) == ""

    def test_point_has_no_spaces(self) -> None:
        assert format_point((-1, -1)) == "(-1,-1)"


class TestPolynomials:
    def test_graded_order(self) -> None:
        p = parse_polynomial("1/2 - 3*t1*t2 + t1^2", ("t1", "t2"), QQ)
        assert format_polynomial(p) == "t1^2 - 3*t1*t2 + 1/2"

    def test_torus_variables_before_parameters(self) -> None:
        domain = coefficient_domain(["a", "b"])
        p = parse_polynomial("a*t - b", ("t",), domain)
        assert format_polynomial(p) == "t*a - b"

    def test_zero(self) -> None:
        assert format_polynomial(parse_polynomial("t - t", ("t",), QQ)) == "0"

    @pytest.mark.parametrize("text", [
        "t1^2 + t2^2 - 5",
        "t^(3,-1) - 2/3*t1*t2^-2 + 7",
        "a0*t1 + a1*t1*t2 - 3*a2^2*t2^2",
    ])
    def test_text_parses_back(self, text: str) -> None:
        domain = coefficient_domain(["a0", "a1", "a2"])
        p = parse_polynomial(text, ("t1", "t2"), domain)
        assert parse_polynomial(format_polynomial(p), ("t1", "t2"), domain) == p

    @pytest.mark.parametrize("seed", range(20))
    def test_random_polynomials_parse_back(self, seed: int) -> None:
        rng = random.Random(seed)
        domain = coefficient_domain(["a0", "a1"])
        a0, a1 = domain.ring.gens
        terms = [
            (
                (rng.randint(-2, 3), rng.randint(-2, 3)),
                QQ(rng.randint(-9, 9), rng.randint(1, 4)) * a0 ** rng.randint(0, 2) + QQ(rng.randint(-3, 3)) * a1,
            )
            for _ in range(rng.randint(1, 6))
        ]
        p = SparsePolynomial.from_terms(("t1", "t2"), domain, terms)
        assert parse_polynomial(format_polynomial(p), ("t1", "t2"), domain) == p

    def test_json_terms(self) -> None:
        p = parse_polynomial("2*t1 - 1", ("t1", "t2"), QQ)
        data = polynomial_json(p)
        assert data["text"] == "2*t1 - 1"
        assert data["terms"] == [
            {"coefficient": "2", "exponents": {"t1": 1}},
            {"coefficient": "-1", "exponents": {}},
        ]


class TestCoefficients:
    def test_numeric_zero_has_no_terms(self) -> None:
        assert element_json(QQ, QQ(0)) == {"text": "0", "terms": []}

    def test_rational_function(self) -> None:
        domain = coefficient_domain(["a0", "a1"])
        a0, a1 = domain.ring.gens
        value = RationalFunction.build(-a1, a0**2, domain)
        assert format_rational_function(value) == "(-a1) / (a0^2)"

    def test_polynomial_value_prints_bare(self) -> None:
        domain = coefficient_domain(["a0"])
        value = RationalFunction.build(QQ(-1, 2), 1, domain)
        assert format_rational_function(value) == "-1/2"
