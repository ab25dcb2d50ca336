"""Exact linear algebra over QQ and QQ[params].

Determinants are fraction free: Bareiss elimination for rational
matrices, memoized minor expansion for small symbolic ones.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Any, Callable, Mapping, NamedTuple, Sequence

from sympy.polys.domains import QQ
from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix

from toricres.config import EVALUATION_RANGE, MAX_EVALUATION_RETRIES, MAX_EXPANSION_SIZE
from toricres.errors import DimensionMismatch, NonSquare, SingularMatrix
from toricres.polynomials import (
    RationalFunction,
    as_coefficient,
    domain_symbols,
    evaluate_element,
    exact_quotient,
    is_numeric,
)

logger = logging.getLogger(__name__)


# --- Matrices ---


@dataclass(frozen=True)
class PolyMatrix:
    """Dense matrix of coefficient-domain elements with labeled axes."""

    domain: Domain
    entries: tuple[tuple[Any, ...], ...]
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        widths = {len(row) for row in self.entries}
        if len(widths) > 1:
            raise DimensionMismatch(f"ragged matrix with row widths {sorted(widths)}")
        if self.row_labels and len(self.row_labels) != len(self.entries):
            raise DimensionMismatch("row label count differs from row count")
        if self.col_labels and len(self.col_labels) != self.ncols:
            raise DimensionMismatch("column label count differs from column count")
        for labels in (self.row_labels, self.col_labels):
            if len(set(labels)) != len(labels):
                raise DimensionMismatch("matrix labels must be unique within an axis")

    @classmethod
    def from_rows(
        cls,
        domain: Domain,
        rows: Sequence[Sequence[Any]],
        row_labels: Sequence[str] = (),
        col_labels: Sequence[str] = (),
    ) -> PolyMatrix:
        entries = tuple(tuple(as_coefficient(domain, x) for x in row) for row in rows)
        return cls(domain, entries, tuple(row_labels), tuple(col_labels))

    @classmethod
    def identity(cls, domain: Domain, size: int) -> PolyMatrix:
        return cls.from_rows(
            domain, [[1 if i == j else 0 for j in range(size)] for i in range(size)]
        )

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def column(self, j: int) -> tuple[Any, ...]:
        return tuple(row[j] for row in self.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> PolyMatrix:
        return PolyMatrix(
            self.domain,
            tuple(tuple(self.entries[i][j] for j in cols) for i in rows),
            tuple(self.row_labels[i] for i in rows) if self.row_labels else (),
            tuple(self.col_labels[j] for j in cols) if self.col_labels else (),
        )

    def with_column(self, j: int, values: Sequence[Any]) -> PolyMatrix:
        """Copy with column ``j`` replaced (labels kept)."""
        if len(values) != self.nrows:
            raise DimensionMismatch(f"column of length {len(values)} for {self.nrows} rows")
        rows = []
        for row, value in zip(self.entries, values):
            new_row = list(row)
            new_row[j] = as_coefficient(self.domain, value)
            rows.append(tuple(new_row))
        return PolyMatrix(self.domain, tuple(rows), self.row_labels, self.col_labels)

    def map_entries(self, fn: Callable[[Any], Any], domain: Domain) -> PolyMatrix:
        return PolyMatrix(
            domain,
            tuple(tuple(fn(x) for x in row) for row in self.entries),
            self.row_labels,
            self.col_labels,
        )

    def specialize(self, point: Mapping[str, Any]) -> PolyMatrix:
        """Evaluate every entry at a rational parameter point."""
        return self.map_entries(lambda x: evaluate_element(self.domain, x, point), QQ)

    def nonzero_count(self) -> int:
        return sum(1 for row in self.entries for x in row if x)


def random_point(domain: Domain, rng: random.Random, bounds: tuple[int, int] = EVALUATION_RANGE) -> dict[str, Any]:
    """Random nonzero signed integers for every parameter of ``domain``."""
    low, high = bounds
    return {
        name: QQ(rng.choice((-1, 1)) * rng.randint(low, high))
        for name in domain_symbols(domain)
    }


# --- Determinants ---


def expansion_det(rows: Sequence[Sequence[Any]], zero: Any, one: Any) -> Any:
    """Determinant by first-column expansion, memoized over used-row sets.

    Works for any commutative ring whose elements support ``+``, ``*``,
    unary ``-`` and truthiness; zero entries prune the expansion.
    """
    n = len(rows)
    if n == 0:
        return one
    memo: dict[int, Any] = {}

    def minor(used: int, col: int) -> Any:
        if col == n:
            return one
        if used in memo:
            return memo[used]
        total = zero
        position = 0
        for r in range(n):
            if used >> r & 1:
                continue
            entry = rows[r][col]
            if entry:
                sub = minor(used | (1 << r), col + 1)
                if sub:
                    term = entry * sub
                    total = total + (-term if position & 1 else term)
            position += 1
        memo[used] = total
        return total

    return minor(0, 0)


def _bareiss_det(domain: Domain, rows: Sequence[Sequence[Any]]) -> Any:
    m = [list(row) for row in rows]
    n = len(m)
    if n == 0:
        return domain.one
    sign = 1
    previous = domain.one
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return domain.zero
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                value = pivot * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = exact_quotient(domain, value, previous) if k else value
            m[i][k] = domain.zero
        previous = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def fraction_free_det(matrix: PolyMatrix) -> Any:
    """Exact determinant of a square matrix."""
    if not matrix.is_square:
        raise NonSquare(f"determinant of a {matrix.nrows}x{matrix.ncols} matrix")
    domain = matrix.domain
    if matrix.nrows == 0:
        return domain.one
    if not is_numeric(domain) and matrix.nrows <= MAX_EXPANSION_SIZE:
        return expansion_det(matrix.entries, domain.zero, domain.one)
    return _bareiss_det(domain, matrix.entries)


def is_singular(matrix: PolyMatrix, rng: random.Random | None = None) -> bool:
    """Zero test for the determinant: random evaluation first, then exact."""
    if not matrix.is_square:
        raise NonSquare(f"singularity test of a {matrix.nrows}x{matrix.ncols} matrix")
    if is_numeric(matrix.domain):
        return not fraction_free_det(matrix)
    rng = rng or random.Random(0)
    for _ in range(MAX_EVALUATION_RETRIES):
        if numeric_rank(matrix.specialize(random_point(matrix.domain, rng))) == matrix.nrows:
            return False
    logger.debug("random evaluations singular, falling back to exact determinant")
    return not fraction_free_det(matrix)


def cramer_component(
    matrix: PolyMatrix, rhs: Sequence[Any], j: int, det: Any | None = None
) -> RationalFunction:
    """Component ``j`` of the solution of ``matrix * x = rhs``."""
    if not matrix.is_square:
        raise NonSquare(f"Cramer's rule on a {matrix.nrows}x{matrix.ncols} matrix")
    if len(rhs) != matrix.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(rhs)} for {matrix.nrows} rows")
    if det is None:
        det = fraction_free_det(matrix)
    if not det:
        raise SingularMatrix("matrix is singular")
    numerator = fraction_free_det(matrix.with_column(j, rhs))
    return RationalFunction.build(numerator, det, matrix.domain)


def cramer_solve(
    matrix: PolyMatrix, rhs: Sequence[Any], rng: random.Random | None = None
) -> list[RationalFunction]:
    """Solve a square system by Cramer's rule; each component reduced."""
    if not matrix.is_square:
        raise NonSquare(f"Cramer's rule on a {matrix.nrows}x{matrix.ncols} matrix")
    if len(rhs) != matrix.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(rhs)} for {matrix.nrows} rows")
    if is_singular(matrix, rng):
        raise SingularMatrix("matrix is singular")
    det = fraction_free_det(matrix)
    return [cramer_component(matrix, rhs, j, det) for j in range(matrix.ncols)]


# --- Rational row reduction ---


def rref(rows: Sequence[Sequence[Any]]) -> tuple[list[list[Any]], list[int]]:
    """Reduced row echelon form over QQ and the pivot columns."""
    m = [[as_coefficient(QQ, x) for x in row] for row in rows]
    if not m or not m[0]:
        return m, []
    reduced, pivots = DomainMatrix(m, (len(m), len(m[0])), QQ).rref()
    return reduced.to_list(), list(pivots)


def numeric_rank(matrix: PolyMatrix) -> int:
    if not is_numeric(matrix.domain):
        raise DimensionMismatch("numeric_rank needs a matrix over QQ")
    _, pivots = rref(matrix.entries)
    return len(pivots)


class NumericSolution(NamedTuple):
    """Outcome of solving ``M x = b`` over QQ for one distinguished unknown."""

    value: Any  # None when inconsistent or not unique
    rank: int
    consistent: bool
    unique: bool


def solve_component_numeric(matrix: PolyMatrix, rhs: Sequence[Any], j: int) -> NumericSolution:
    """Solve for unknown ``j``; it is unique when every solution agrees on it.

    That holds exactly when column ``j`` is a pivot column whose row in the
    reduced form is zero on every free column.
    """
    if len(rhs) != matrix.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(rhs)} for {matrix.nrows} rows")
    augmented = [list(row) + [value] for row, value in zip(matrix.entries, rhs)]
    reduced, pivots = rref(augmented)
    ncols = matrix.ncols
    if ncols in pivots:
        return NumericSolution(None, len(pivots) - 1, False, False)
    rank = len(pivots)
    if j not in pivots:
        return NumericSolution(None, rank, True, False)
    row = reduced[pivots.index(j)]
    free = [c for c in range(ncols) if c not in pivots]
    if any(row[c] for c in free):
        return NumericSolution(None, rank, True, False)
    return NumericSolution(row[ncols], rank, True, True)


def select_independent_columns(
    matrix: PolyMatrix,
    order: Sequence[int],
    rng: random.Random,
) -> list[int]:
    """Greedy column basis in the given preference order, by random evaluation.

    Returns ascending column indices of a square nonsingular submatrix, or
    raises SingularMatrix when no evaluation reaches full row rank.
    """
    for attempt in range(MAX_EVALUATION_RETRIES):
        numeric = matrix if is_numeric(matrix.domain) else matrix.specialize(
            random_point(matrix.domain, rng)
        )
        basis: list[tuple[int, list[Any]]] = []  # (pivot row, reduced column)
        chosen: list[int] = []
        for c in order:
            vector = list(numeric.column(c))
            for pivot, reduced in basis:
                if vector[pivot]:
                    factor = vector[pivot] / reduced[pivot]
                    vector = [x - factor * y for x, y in zip(vector, reduced)]
            pivot = next((i for i, x in enumerate(vector) if x), None)
            if pivot is None:
                continue
            basis.append((pivot, vector))
            chosen.append(c)
            if len(chosen) == matrix.nrows:
                return sorted(chosen)
        logger.debug("column selection attempt %d reached rank %d of %d", attempt + 1, len(chosen), matrix.nrows)
        if is_numeric(matrix.domain):
            break
    raise SingularMatrix(f"no nonsingular {matrix.nrows}x{matrix.nrows} column selection found")
