"""Arithmetic modulo word-sized primes for sparse interpolation.

Coefficients are reduced to residues, square systems are solved by forward
elimination over GF(p), and the monomial coefficients of a polynomial with
known support come out of one transposed Vandermonde solve per prime.
Rational coefficients are recovered from the combined residues.
"""

from __future__ import annotations

import logging
from math import gcd, isqrt
from typing import Any, Iterator, Optional, Sequence

from sympy.ntheory.generate import prevprime
from sympy.ntheory.modular import crt
from sympy.polys.domains import QQ
from sympy.polys.domains.domain import Domain

from toricres.config import PRIME_CEILING
from toricres.errors import DimensionMismatch
from toricres.polynomials import is_numeric

logger = logging.getLogger(__name__)

# ((variable index, exponent), ...), coefficient residue
ReducedTerms = list[tuple[tuple[tuple[int, int], ...], int]]


def modular_primes(count: int, ceiling: int = PRIME_CEILING) -> Iterator[int]:
    """The ``count`` largest primes below ``ceiling``, descending."""
    p = ceiling
    for _ in range(count):
        p = int(prevprime(p))
        yield p


def reduce_element(domain: Domain, element: Any, p: int) -> Optional[ReducedTerms]:
    """Terms of ``element`` with coefficients taken mod ``p``.

    None when ``p`` divides a coefficient denominator.
    """
    items = [((), element)] if is_numeric(domain) else element.terms()
    terms: ReducedTerms = []
    for monom, coefficient in items:
        numerator, denominator = int(QQ.numer(coefficient)), int(QQ.denom(coefficient))
        if denominator % p == 0:
            return None
        value = numerator * pow(denominator, -1, p) % p
        if value:
            terms.append((tuple((i, e) for i, e in enumerate(monom) if e), value))
    return terms


def monomial_mod(values: Sequence[int], exponents: Sequence[int], p: int) -> int:
    result = 1
    for value, e in zip(values, exponents):
        if e:
            result = result * pow(value, e, p) % p
    return result


def evaluate_reduced(terms: ReducedTerms, values: Sequence[int], p: int) -> int:
    total = 0
    for monom, coefficient in terms:
        for i, e in monom:
            coefficient = coefficient * (values[i] if e == 1 else pow(values[i], e, p)) % p
        total += coefficient
    return total % p


def solve_component_mod(rows: Sequence[Sequence[int]], rhs: Sequence[int], j: int, p: int) -> Optional[int]:
    """Unknown ``j`` of the square system ``rows * x = rhs`` over GF(p).

    Column ``j`` is moved last so forward elimination alone determines it.
    None when the system is singular mod ``p``.
    """
    n = len(rows)
    if n == 0 or len(rhs) != n or any(len(row) != n for row in rows):
        raise DimensionMismatch(f"expected a square system with {n} right-hand sides")
    order = [c for c in range(n) if c != j] + [j]
    m = [[row[c] % p for c in order] + [b % p] for row, b in zip(rows, rhs)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c]), None)
        if pivot is None:
            return None
        m[c], m[pivot] = m[pivot], m[c]
        top = m[c]
        inverse = pow(top[c], -1, p)
        for i in range(c + 1, n):
            factor = m[i][c]
            if factor:
                factor = factor * inverse % p
                row = m[i]
                m[i] = row[:c] + [(x - factor * y) % p for x, y in zip(row[c:], top[c:])]
    return m[n - 1][n] * pow(m[n - 1][n - 1], -1, p) % p


def transposed_vandermonde_solve(nodes: Sequence[int], values: Sequence[int], p: int) -> list[int]:
    """Solve ``sum_c y[c] * nodes[c]**k = values[k]`` for ``k = 0..T-1`` over GF(p).

    ``y[c]`` is the dot product of ``values`` with the coefficients of
    ``M(z) / (z - nodes[c])``, divided by that quotient at ``nodes[c]``,
    where ``M`` is the monic polynomial vanishing on every node.
    """
    t = len(nodes)
    if len(values) != t:
        raise DimensionMismatch(f"{len(values)} values for {t} nodes")
    if len(set(n % p for n in nodes)) != t:
        raise DimensionMismatch("nodes must be distinct mod p")
    master = [1]  # low degree first
    for node in nodes:
        shifted = [0] + master
        for i, c in enumerate(master):
            shifted[i] = (shifted[i] - node * c) % p
        master = shifted

    solution: list[int] = []
    for node in nodes:
        quotient = [0] * t
        carry = 0
        for k in range(t, 0, -1):
            carry = (master[k] + node * carry) % p
            quotient[k - 1] = carry
        numerator = sum(q * v for q, v in zip(quotient, values)) % p
        at_node = 0
        for q in reversed(quotient):
            at_node = (at_node * node + q) % p
        solution.append(numerator * pow(at_node, -1, p) % p)
    return solution


def rational_reconstruction(residue: int, modulus: int) -> Optional[Any]:
    """The fraction ``r/s`` with ``r = residue * s mod modulus`` and ``|r|, |s| <= sqrt(modulus/2)``.

    None when no such fraction exists.
    """
    bound = isqrt(modulus // 2)
    r0, r1 = modulus, residue % modulus
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return QQ(r1, s1)


def combine_residues(previous: Sequence[int], modulus: int, images: Sequence[int], p: int) -> list[int]:
    """Chinese remaindering of residues mod ``modulus`` with images mod ``p``."""
    if len(previous) != len(images):
        raise DimensionMismatch(f"{len(images)} images for {len(previous)} residues")
    return [int(crt([modulus, p], [r, image])[0]) for r, image in zip(previous, images)]
