"""Canonical text and structured JSON for polynomials and coefficients.

Torus variables come first, then parameters in declaration order; terms
are printed graded-lexicographic descending over that combined order.
"""

from __future__ import annotations

from typing import Any, Sequence

from sympy.polys.domains import QQ
from sympy.polys.domains.domain import Domain

from toricres.polynomials import (
    RationalFunction,
    SparsePolynomial,
    domain_symbols,
    is_numeric,
    to_fraction,
)


def format_rational(value: Any) -> str:
    """``3/2``, ``-1``, ``0``."""
    fraction = to_fraction(value)
    if fraction.denominator == 1:
        return str(fraction.numerator)
    return f"{fraction.numerator}/{fraction.denominator}"


def format_monomial(names: Sequence[str], exponent: Sequence[int]) -> str:
    factors = []
    for name, exp in zip(names, exponent):
        if exp == 1:
            factors.append(name)
        elif exp:
            factors.append(f"{name}^{exp}")
    return "*".join(factors)


def flat_terms(p: SparsePolynomial) -> list[tuple[tuple[int, ...], Any]]:
    """Terms over (torus variables + parameters) with rational coefficients."""
    width = len(domain_symbols(p.domain))
    terms = []
    for exponent, coeff in p.terms:
        if is_numeric(p.domain):
            terms.append((tuple(exponent) + (0,) * width, coeff))
        else:
            for monom, value in coeff.terms():
                terms.append((tuple(exponent) + tuple(monom), value))
    terms.sort(key=lambda term: (sum(term[0]), term[0]), reverse=True)
    return terms


def _join_terms(names: Sequence[str], terms: Sequence[tuple[tuple[int, ...], Any]]) -> str:
    if not terms:
        return "0"
    pieces: list[str] = []
    for index, (exponent, coeff) in enumerate(terms):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        monomial = format_monomial(names, exponent)
        if not monomial:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{format_rational(magnitude)}*{monomial}"
        if index == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def format_polynomial(p: SparsePolynomial) -> str:
    """Canonical text of a Laurent polynomial; re-parses to the same value."""
    names = list(p.variables) + list(domain_symbols(p.domain))
    return _join_terms(names, flat_terms(p))


def format_element(domain: Domain, element: Any) -> str:
    """Canonical text of a coefficient (rational or polynomial in parameters)."""
    if is_numeric(domain):
        return format_rational(element)
    return _join_terms(domain_symbols(domain), element.terms())


def format_rational_function(value: RationalFunction) -> str:
    numerator = format_element(value.domain, value.numerator)
    if value.is_polynomial:
        return numerator
    denominator = format_element(value.domain, value.denominator)
    return f"({numerator}) / ({denominator})"


def format_point(point: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in point) + ")"


# --- Structured forms ---


def _terms_json(names: Sequence[str], terms: Sequence[tuple[tuple[int, ...], Any]]) -> list[dict]:
    return [
        {
            "coefficient": format_rational(coeff),
            "exponents": {name: exp for name, exp in zip(names, exponent) if exp},
        }
        for exponent, coeff in terms
    ]


def polynomial_json(p: SparsePolynomial) -> dict:
    names = list(p.variables) + list(domain_symbols(p.domain))
    return {"text": format_polynomial(p), "terms": _terms_json(names, flat_terms(p))}


def element_json(domain: Domain, element: Any) -> dict:
    if is_numeric(domain):
        return {"text": format_rational(element), "terms": _terms_json((), [((), element)] if element else [])}
    names = domain_symbols(domain)
    return {"text": format_element(domain, element), "terms": _terms_json(names, element.terms())}


def rational_function_json(value: RationalFunction) -> dict:
    return {
        "text": format_rational_function(value),
        "numerator": element_json(value.domain, value.numerator),
        "denominator": element_json(value.domain, value.denominator),
    }


def rational_json(value: Any) -> str:
    return format_rational(QQ.convert(value) if not QQ.of_type(value) else value)
