"""Exact sparse Laurent polynomials over a sympy coefficient domain.

Coefficients live in ``QQ`` (numeric mode) or in a polynomial ring
``QQ[params]`` with graded-lex order on the parameters in declaration
order (symbolic mode). Exponent vectors may be negative. Terms are kept
in graded-lexicographic descending order, so two equal polynomials have
identical term tuples and compare equal as dataclasses.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.domains.domain import Domain
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyRing

from toricres.errors import ArityMismatch, DivideByZero, NotDivisible

logger = logging.getLogger(__name__)

Exponent = tuple[int, ...]
Term = tuple[Exponent, Any]


# --- Coefficient domains ---


def coefficient_domain(params: Sequence[str]) -> Domain:
    """``QQ`` when there are no parameters, else ``QQ[params]`` (grlex)."""
    if not params:
        return QQ
    return QQ.poly_ring(*params, order=grlex)


def is_numeric(domain: Domain) -> bool:
    return domain == QQ


def domain_symbols(domain: Domain) -> tuple[str, ...]:
    if is_numeric(domain):
        return ()
    return tuple(str(s) for s in domain.symbols)


def as_coefficient(domain: Domain, value: Any) -> Any:
    """Coerce an int, Fraction, QQ element or ring element into ``domain``."""
    if domain.of_type(value):
        return value
    if isinstance(value, Fraction):
        value = QQ(value.numerator, value.denominator)
    elif isinstance(value, int):
        value = QQ(value)
    if QQ.of_type(value):
        if is_numeric(domain):
            return value
        return domain.convert_from(value, QQ)
    return domain.convert(value)


def to_fraction(value: Any) -> Fraction:
    """A QQ element as a ``fractions.Fraction``."""
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def exact_quotient(domain: Domain, a: Any, b: Any) -> Any:
    """``a / b`` inside ``domain``; raises unless the quotient exists there."""
    if not b:
        raise DivideByZero("division by zero coefficient")
    if is_numeric(domain):
        return a / b
    try:
        return a.exquo(b)
    except ExactQuotientFailed as exc:
        raise NotDivisible(f"{a} is not divisible by {b}") from exc


def evaluate_element(domain: Domain, element: Any, point: Mapping[str, Any]) -> Any:
    """Value in QQ of a coefficient after substituting rationals for every parameter."""
    if is_numeric(domain):
        return element
    names = domain_symbols(domain)
    values = [as_coefficient(QQ, point[name]) for name in names]
    total = QQ.zero
    for monom, coeff in element.terms():
        term = coeff
        for value, exp in zip(values, monom):
            if exp:
                term *= value**exp
        total += term
    return total


def substitute_element(
    domain: Domain, element: Any, mapping: Mapping[str, Any], target: Domain
) -> Any:
    """Substitute target-domain elements for the parameters of ``element``.

    Parameters absent from ``mapping`` must be generators of ``target``.
    """
    if is_numeric(domain):
        return as_coefficient(target, element)
    names = domain_symbols(domain)
    images = []
    for name in names:
        if name in mapping:
            images.append(as_coefficient(target, mapping[name]))
        else:
            images.append(target.ring.gens[domain_symbols(target).index(name)])
    total = target.zero
    for monom, coeff in element.terms():
        term = as_coefficient(target, coeff)
        for image, exp in zip(images, monom):
            if exp:
                term = term * image**exp
        total += term
    return total


def element_degree(domain: Domain, element: Any) -> int:
    """Total degree of a coefficient in the parameters (0 for rationals)."""
    if is_numeric(domain) or not element:
        return 0
    return max(sum(monom) for monom in element.itermonoms())


# --- Sparse Laurent polynomials ---


def _order_key(exponent: Exponent) -> tuple[int, Exponent]:
    return (sum(exponent), exponent)


@dataclass(frozen=True)
class SparsePolynomial:
    """A Laurent polynomial with coefficients in ``domain``."""

    variables: tuple[str, ...]
    domain: Domain
    terms: tuple[Term, ...] = ()

    @classmethod
    def from_terms(
        cls,
        variables: Sequence[str],
        domain: Domain,
        terms: Iterable[tuple[Sequence[int], Any]],
    ) -> SparsePolynomial:
        """Merge duplicate exponents, drop zeros, sort grlex descending."""
        variables = tuple(variables)
        merged: dict[Exponent, Any] = {}
        for exponent, coeff in terms:
            key = tuple(int(e) for e in exponent)
            if len(key) != len(variables):
                raise ArityMismatch(
                    f"exponent {key} does not match variables {variables}"
                )
            value = as_coefficient(domain, coeff)
            merged[key] = merged[key] + value if key in merged else value
        ordered = sorted(
            ((e, c) for e, c in merged.items() if c),
            key=lambda term: _order_key(term[0]),
            reverse=True,
        )
        return cls(variables, domain, tuple(ordered))

    @classmethod
    def from_dict(
        cls, variables: Sequence[str], domain: Domain, mapping: Mapping[Sequence[int], Any]
    ) -> SparsePolynomial:
        return cls.from_terms(variables, domain, mapping.items())

    @classmethod
    def zero(cls, variables: Sequence[str], domain: Domain) -> SparsePolynomial:
        return cls(tuple(variables), domain, ())

    @classmethod
    def constant(cls, variables: Sequence[str], domain: Domain, value: Any) -> SparsePolynomial:
        return cls.from_terms(variables, domain, [((0,) * len(variables), value)])

    @classmethod
    def monomial(
        cls,
        variables: Sequence[str],
        domain: Domain,
        exponent: Sequence[int],
        coeff: Any = 1,
    ) -> SparsePolynomial:
        return cls.from_terms(variables, domain, [(exponent, coeff)])

    @classmethod
    def variable(cls, variables: Sequence[str], domain: Domain, index: int) -> SparsePolynomial:
        exponent = [0] * len(variables)
        exponent[index] = 1
        return cls.monomial(variables, domain, exponent)

    # --- Views ---

    @cached_property
    def as_dict(self) -> dict[Exponent, Any]:
        return dict(self.terms)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def support(self) -> tuple[Exponent, ...]:
        return tuple(e for e, _ in self.terms)

    @property
    def coefficients(self) -> tuple[Any, ...]:
        return tuple(c for _, c in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return self.is_zero or (len(self.terms) == 1 and not any(self.terms[0][0]))

    @property
    def leading_coefficient(self) -> Any:
        return self.terms[0][1] if self.terms else self.domain.zero

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e, _ in self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, exponent: Sequence[int]) -> Any:
        return self.as_dict.get(tuple(exponent), self.domain.zero)

    def min_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e, _ in self.terms) for i in range(self.nvars))

    def max_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(e[i] for e, _ in self.terms) for i in range(self.nvars))

    # --- Arithmetic ---

    def _coerce(self, other: Any) -> SparsePolynomial:
        if isinstance(other, SparsePolynomial):
            if other.variables != self.variables:
                raise ArityMismatch(
                    f"variables differ: {self.variables} vs {other.variables}"
                )
            if other.domain != self.domain:
                return other.convert(self.domain)
            return other
        return SparsePolynomial.constant(self.variables, self.domain, other)

    def __add__(self, other: Any) -> SparsePolynomial:
        other = self._coerce(other)
        return SparsePolynomial.from_terms(
            self.variables, self.domain, list(self.terms) + list(other.terms)
        )

    __radd__ = __add__

    def __neg__(self) -> SparsePolynomial:
        return SparsePolynomial(self.variables, self.domain, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: Any) -> SparsePolynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> SparsePolynomial:
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> SparsePolynomial:
        if not isinstance(other, SparsePolynomial):
            return self.scale(other)
        other = self._coerce(other)
        products: list[Term] = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                products.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return SparsePolynomial.from_terms(self.variables, self.domain, products)

    def __rmul__(self, other: Any) -> SparsePolynomial:
        return self.scale(other)

    def __pow__(self, exponent: int) -> SparsePolynomial:
        if exponent < 0:
            if len(self.terms) != 1:
                raise NotDivisible("only monomials have negative powers")
            e, c = self.terms[0]
            inverse = exact_quotient(self.domain, self.domain.one, c)
            return SparsePolynomial.monomial(
                self.variables, self.domain, [-x for x in e], inverse
            ) ** (-exponent)
        result = SparsePolynomial.constant(self.variables, self.domain, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: Any) -> SparsePolynomial:
        factor = as_coefficient(self.domain, factor)
        if not factor:
            return SparsePolynomial.zero(self.variables, self.domain)
        return SparsePolynomial.from_terms(
            self.variables, self.domain, [(e, c * factor) for e, c in self.terms]
        )

    def shift(self, offset: Sequence[int]) -> SparsePolynomial:
        """Multiply by the monomial ``t^offset``."""
        return SparsePolynomial(
            self.variables,
            self.domain,
            tuple((tuple(a + b for a, b in zip(e, offset)), c) for e, c in self.terms),
        )

    def derivative(self, index: int) -> SparsePolynomial:
        terms = []
        for e, c in self.terms:
            if e[index]:
                lowered = list(e)
                lowered[index] -= 1
                terms.append((lowered, c * e[index]))
        return SparsePolynomial.from_terms(self.variables, self.domain, terms)

    def log_derivative(self, index: int) -> SparsePolynomial:
        """``t_i * d/dt_i``; keeps the support inside the Newton polytope."""
        return SparsePolynomial.from_terms(
            self.variables, self.domain, [(e, c * e[index]) for e, c in self.terms]
        )

    # --- Coefficient maps ---

    def map_coefficients(self, fn: Callable[[Any], Any], domain: Domain) -> SparsePolynomial:
        return SparsePolynomial.from_terms(
            self.variables, domain, [(e, fn(c)) for e, c in self.terms]
        )

    def convert(self, domain: Domain) -> SparsePolynomial:
        if domain == self.domain:
            return self
        return self.map_coefficients(lambda c: as_coefficient(domain, c), domain)

    def specialize(self, point: Mapping[str, Any]) -> SparsePolynomial:
        """Substitute rationals for every parameter; the result is over QQ."""
        return self.map_coefficients(
            lambda c: evaluate_element(self.domain, c, point), QQ
        )

    def substitute(self, mapping: Mapping[str, Any], target: Domain) -> SparsePolynomial:
        return self.map_coefficients(
            lambda c: substitute_element(self.domain, c, mapping, target), target
        )

    def with_variables(self, variables: Sequence[str]) -> SparsePolynomial:
        """Same terms under new variable names of equal arity."""
        if len(variables) != self.nvars:
            raise ArityMismatch(f"expected {self.nvars} variables, got {len(variables)}")
        return SparsePolynomial(tuple(variables), self.domain, self.terms)

    def evaluate(self, values: Sequence[Any]) -> Any:
        """Value at a point of the torus; the point must have nonzero coordinates."""
        point = [as_coefficient(QQ, v) for v in values]
        if any(not v for v in point) and any(min(e) < 0 for e, _ in self.terms):
            raise DivideByZero("Laurent polynomial evaluated off the torus")
        total = self.domain.zero
        for e, c in self.terms:
            term = c
            for value, exp in zip(point, e):
                if exp:
                    term = term * value**exp
            total = total + term
        return total

    def __str__(self) -> str:
        from toricres.formatting import format_polynomial

        return format_polynomial(self)


def normalize(p: SparsePolynomial) -> SparsePolynomial:
    """Canonical form of a polynomial; idempotent."""
    return SparsePolynomial.from_terms(p.variables, p.domain, p.terms)


# --- Flattened view: torus variables and parameters in one QQ ring ---


def _flat_ring(variables: Sequence[str], domain: Domain) -> PolyRing:
    return PolyRing(list(variables) + list(domain_symbols(domain)), QQ, grlex)


def _flatten(p: SparsePolynomial, ring: PolyRing, offset: Sequence[int]) -> Any:
    flat: dict[tuple[int, ...], Any] = {}
    numeric = is_numeric(p.domain)
    width = ring.ngens - p.nvars
    for exponent, coeff in p.terms:
        base = tuple(e - o for e, o in zip(exponent, offset))
        if numeric:
            items = [((0,) * width, coeff)]
        else:
            items = coeff.terms()
        for monom, value in items:
            key = base + tuple(monom)
            flat[key] = flat.get(key, QQ.zero) + value
    return ring.from_dict(flat)


def _unflatten(
    element: Any, variables: Sequence[str], domain: Domain, offset: Sequence[int]
) -> SparsePolynomial:
    n = len(variables)
    grouped: dict[Exponent, dict[tuple[int, ...], Any]] = {}
    for monom, coeff in element.terms():
        key = tuple(e + o for e, o in zip(monom[:n], offset))
        grouped.setdefault(key, {})[tuple(monom[n:])] = coeff
    terms = []
    for key, parts in grouped.items():
        if is_numeric(domain):
            terms.append((key, parts[()]))
        else:
            terms.append((key, domain.ring.from_dict(parts)))
    return SparsePolynomial.from_terms(variables, domain, terms)


def exact_divide(a: SparsePolynomial, b: SparsePolynomial) -> SparsePolynomial:
    """Quotient ``q`` with ``a = q * b`` exactly, in the Laurent ring."""
    b = a._coerce(b)
    if b.is_zero:
        raise DivideByZero("exact_divide by the zero polynomial")
    if a.is_zero:
        return a
    ring = _flat_ring(a.variables, a.domain)
    shift_a = a.min_exponents()
    shift_b = b.min_exponents()
    num = _flatten(a, ring, shift_a)
    den = _flatten(b, ring, shift_b)
    try:
        quotient = num.exquo(den)
    except ExactQuotientFailed as exc:
        raise NotDivisible(f"{a} is not divisible by {b}") from exc
    offset = tuple(x - y for x, y in zip(shift_a, shift_b))
    return _unflatten(quotient, a.variables, a.domain, offset)


def multipoly_gcd(a: SparsePolynomial, b: SparsePolynomial) -> SparsePolynomial:
    """Greatest common divisor with positive leading coefficient.

    The primitive part comes from sympy's multivariate gcd; the scalar part
    is the gcd of the two rational contents, so ``gcd(6x, 4x^2) = 2x``.
    """
    b = a._coerce(b)
    if a.is_zero and b.is_zero:
        return a
    ring = _flat_ring(a.variables, a.domain)
    offset = tuple(
        min(0, x, y) for x, y in zip(a.min_exponents(), b.min_exponents())
    )
    fa = _flatten(a, ring, offset)
    fb = _flatten(b, ring, offset)
    content = QQ.gcd(fa.content(), fb.content())
    g = fa.gcd(fb)
    _, g = g.primitive()
    if g.LC < 0:
        g = -g
    g = g.mul_ground(content)
    return _unflatten(g, a.variables, a.domain, offset)


# --- Rational functions in the parameters ---


@dataclass(frozen=True)
class RationalFunction:
    """A quotient of two coefficient-domain elements.

    When ``reduced`` the gcd has been cancelled and the denominator has
    content 1 and a positive leading coefficient. Over ``QQ`` the whole
    value sits in the numerator and the denominator is 1.
    """

    numerator: Any
    denominator: Any
    domain: Domain
    reduced: bool = True

    @classmethod
    def build(cls, numerator: Any, denominator: Any, domain: Domain) -> RationalFunction:
        numerator = as_coefficient(domain, numerator)
        denominator = as_coefficient(domain, denominator)
        if not denominator:
            raise DivideByZero("rational function with zero denominator")
        if is_numeric(domain):
            return cls(numerator / denominator, QQ.one, domain)
        if not numerator:
            return cls(domain.zero, domain.one, domain)
        g = numerator.gcd(denominator)
        numerator = numerator.exquo(g)
        denominator = denominator.exquo(g)
        content, denominator = denominator.primitive()
        numerator = numerator.quo_ground(content)
        if denominator.LC < 0:
            numerator, denominator = -numerator, -denominator
        return cls(numerator, denominator, domain)

    @classmethod
    def from_element(cls, element: Any, domain: Domain) -> RationalFunction:
        return cls(as_coefficient(domain, element), domain.one, domain)

    @classmethod
    def zero(cls, domain: Domain) -> RationalFunction:
        return cls(domain.zero, domain.one, domain)

    @property
    def is_zero(self) -> bool:
        return not self.numerator

    @property
    def is_polynomial(self) -> bool:
        return self.denominator == self.domain.one

    def __add__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction.build(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
            self.domain,
        )

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.numerator, self.denominator, self.domain, self.reduced)

    def __sub__(self, other: RationalFunction) -> RationalFunction:
        return self + (-other)

    def __mul__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction.build(
            self.numerator * other.numerator,
            self.denominator * other.denominator,
            self.domain,
        )

    def __truediv__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction.build(
            self.numerator * other.denominator,
            self.denominator * other.numerator,
            self.domain,
        )

    def scale(self, factor: Any) -> RationalFunction:
        return RationalFunction.build(
            self.numerator * as_coefficient(self.domain, factor), self.denominator, self.domain
        )

    def evaluate(self, point: Mapping[str, Any]) -> Any:
        den = evaluate_element(self.domain, self.denominator, point)
        if not den:
            raise DivideByZero("denominator vanishes at the evaluation point")
        return evaluate_element(self.domain, self.numerator, point) / den

    def substitute(self, mapping: Mapping[str, Any], target: Domain) -> RationalFunction:
        """Substitute coefficient expressions and re-reduce in ``target``."""
        return RationalFunction.build(
            substitute_element(self.domain, self.numerator, mapping, target),
            substitute_element(self.domain, self.denominator, mapping, target),
            target,
        )
