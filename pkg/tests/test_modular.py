"""Tests for modular arithmetic: reduction, square solves, Vandermonde systems, reconstruction."""

from __future__ import annotations

import random

import pytest
from sympy.ntheory import isprime
from sympy.polys.domains import QQ

from toricres.config import PRIME_CEILING
from toricres.errors import DimensionMismatch
from toricres.modular import (
    combine_residues,
    evaluate_reduced,
    modular_primes,
    monomial_mod,
    rational_reconstruction,
    reduce_element,
    solve_component_mod,
    transposed_vandermonde_solve,
)
from toricres.polynomials import coefficient_domain

P = next(modular_primes(1))


def _residue(value, p: int) -> int:
    return int(QQ.numer(value)) * pow(int(QQ.denom(value)), -1, p) % p


# --- Test: primes and reduction ---

class TestReduction:
    def test_primes_descend_below_the_ceiling(self) -> None:
        primes = list(modular_primes(3))
        assert primes == sorted(primes, reverse=True)
        assert primes[0] < PRIME_CEILING
        assert all(isprime(p) for p in primes)

    def test_polynomial_evaluated_mod_p(self) -> None:
        domain = coefficient_domain(["a", "b"])
        a, b = domain.ring.gens
        element = a**2 * b * QQ(1, 2) + 3
        terms = reduce_element(domain, element, P)
        assert evaluate_reduced(terms, [5, 7], P) == _residue(QQ(181, 2), P)

    def test_rational_constant(self) -> None:
        terms = reduce_element(QQ, QQ(3, 4), P)
        assert evaluate_reduced(terms, [], P) == _residue(QQ(3, 4), P)

    def test_denominator_divisible_by_p(self) -> None:
        assert reduce_element(QQ, QQ(1, 5), 5) is None

    def test_monomial(self) -> None:
        assert monomial_mod([2, 3], (3, 2), 101) == 72


# --- Test: linear systems mod p ---

class TestModularSolve:
    @pytest.mark.parametrize("j, expected", [(0, 1), (1, 3)])
    def test_two_by_two(self, j: int, expected: int) -> None:
        assert solve_component_mod([[2, 1], [1, 3]], [5, 10], j, P) == expected

    def test_pivot_swap(self) -> None:
        assert solve_component_mod([[0, 1], [1, 0]], [7, 9], 0, P) == 9

    def test_singular(self) -> None:
        assert solve_component_mod([[1, 2], [2, 4]], [1, 2], 1, P) is None

    def test_non_square_rejected(self) -> None:
        with pytest.raises(DimensionMismatch):
            solve_component_mod([[1, 2, 3], [4, 5, 6]], [1, 2], 0, P)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_integer_solutions(self, seed: int) -> None:
        rng = random.Random(seed)
        n = 6
        solution = [rng.randint(-50, 50) for _ in range(n)]
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        rhs = [sum(r * x for r, x in zip(row, solution)) for row in rows]
        j = rng.randrange(n)
        value = solve_component_mod(rows, rhs, j, P)
        if value is not None:
            assert value == solution[j] % P


class TestTransposedVandermonde:
    def test_power_sums_recovered(self) -> None:
        nodes = [2, 3, 5]
        weights = [4, -1, 7]
        values = [sum(w * node**k for w, node in zip(weights, nodes)) % P for k in range(3)]
        assert transposed_vandermonde_solve(nodes, values, P) == [w % P for w in weights]

    def test_single_node(self) -> None:
        assert transposed_vandermonde_solve([9], [4], P) == [4]

    def test_repeated_nodes_rejected(self) -> None:
        with pytest.raises(DimensionMismatch):
            transposed_vandermonde_solve([2, 2], [1, 1], P)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_sparse_polynomial(self, seed: int) -> None:
        """Coefficients of a sparse polynomial from its values at the powers of one point."""
        rng = random.Random(seed)
        support = sorted({(rng.randint(0, 4), rng.randint(0, 4)) for _ in range(8)})
        coefficients = [rng.randint(-100, 100) for _ in support]
        omega = [rng.randrange(2, P), rng.randrange(2, P)]
        nodes = [monomial_mod(omega, e, P) for e in support]
        values = [
            sum(c * pow(node, k, P) for c, node in zip(coefficients, nodes)) % P
            for k in range(len(support))
        ]
        assert transposed_vandermonde_solve(nodes, values, P) == [c % P for c in coefficients]


# --- Test: rational reconstruction ---

class TestReconstruction:
    @pytest.mark.parametrize("value", [QQ(0), QQ(12345), QQ(3, 7), QQ(-5, 11), QQ(-1, 2**20)])
    def test_small_fractions(self, value) -> None:
        assert rational_reconstruction(_residue(value, P), P) == value

    @pytest.mark.parametrize("residue", [3, 4])
    def test_no_small_fraction(self, residue: int) -> None:
        """Mod 11 only 0, +-1, +-2 and +-1/2 fit under the bound."""
        assert rational_reconstruction(residue, 11) is None

    def test_large_fraction_needs_several_primes(self) -> None:
        value = QQ(2**70 + 1, 3)
        primes = list(modular_primes(3))
        residues = [_residue(value, primes[0])]
        modulus = primes[0]
        assert rational_reconstruction(residues[0], modulus) != value
        for p in primes[1:]:
            residues = combine_residues(residues, modulus, [_residue(value, p)], p)
            modulus *= p
        assert rational_reconstruction(residues[0], modulus) == value
