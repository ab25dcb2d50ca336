"""Shared fixtures for the toricres test suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import pytest
from sympy.polys.domains.domain import Domain

from toricres.parser import parse_polynomial
from toricres.polynomials import SparsePolynomial, coefficient_domain


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: symbolic computations that take more than a few seconds")


@dataclass(frozen=True)
class SampleSystem:
    """Polynomials over one coefficient domain, plus a reader for expected values."""

    domain: Domain
    polys: tuple[SparsePolynomial, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.polys[0].variables

    def element(self, text: str) -> Any:
        """A coefficient-domain element written in the input syntax."""
        constant = parse_polynomial(text, self.variables, self.domain)
        return constant.coefficient((0,) * len(self.variables))

    def poly(self, text: str) -> SparsePolynomial:
        return parse_polynomial(text, self.variables, self.domain)


def _make_system(params: list[str], variables: tuple[str, ...], *texts: str) -> SampleSystem:
    domain = coefficient_domain(params)
    return SampleSystem(domain, tuple(parse_polynomial(t, variables, domain) for t in texts))


def _names(prefix: str, count: int, start: int = 0) -> list[str]:
    return [f"{prefix}{i}" for i in range(start, start + count)]


@pytest.fixture()
def quadrics() -> SampleSystem:
    """Two generic plane conics with coefficients a0..a5 and b0..b5."""
    return _make_system(
        _names("a", 6) + _names("b", 6),
        ("t1", "t2"),
        "a0*t1^2 + a1*t1*t2 + a2*t2^2 + a3*t1 + a4*t2 + a5",
        "b0*t1^2 + b1*t1*t2 + b2*t2^2 + b3*t1 + b4*t2 + b5",
    )


@pytest.fixture()
def mixed_triangles() -> SampleSystem:
    """Two trinomials with different Newton triangles whose sum is a pentagon."""
    return _make_system(
        _names("a", 3) + _names("b", 3),
        ("t1", "t2"),
        "a0*t1 + a1*t1*t2 + a2*t2^2",
        "b0*t2 + b1*t1*t2 + b2*t1^2",
    )


@pytest.fixture()
def scroll_system() -> SampleSystem:
    """Three generic polynomials on the quadrangle with vertices (0,0), (3,0), (1,1), (0,1)."""
    monomials = ["", "*t1", "*t1^2", "*t1^3", "*t2", "*t1*t2"]
    texts = [
        " + ".join(f"{letter}{i + 1}{m}" for i, m in enumerate(monomials))
        for letter in "abc"
    ]
    return _make_system(_names("a", 6, 1) + _names("b", 6, 1) + _names("c", 6, 1), ("t1", "t2"), *texts)


@pytest.fixture()
def linear_forms() -> SampleSystem:
    """Three generic affine linear forms in two variables."""
    return _make_system(
        _names("a", 3) + _names("b", 3) + _names("c", 3),
        ("t1", "t2"),
        "a0 + a1*t1 + a2*t2",
        "b0 + b1*t1 + b2*t2",
        "c0 + c1*t1 + c2*t2",
    )


@pytest.fixture()
def numeric_conics() -> SampleSystem:
    """A circle and a hyperbola with rational coefficients and four torus solutions."""
    return _make_system(
        [],
        ("t1", "t2"),
        "t1^2 + t2^2 - 5",
        "t1*t2 - 2",
    )
