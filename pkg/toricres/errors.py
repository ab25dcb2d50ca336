"""Exception hierarchy. Every error knows which exit code it maps to."""

from __future__ import annotations

from toricres.config import ExitCode


class ToricError(Exception):
    """Base class for every error raised by the engines and the CLI."""

    exit_code: ExitCode = ExitCode.INTERNAL


# --- Malformed input (exit 4) ---


class InputError(ToricError):
    exit_code = ExitCode.BAD_INPUT


class ParseError(InputError):
    """Syntax error in an input file, with 1-based line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UndeclaredSymbol(InputError):
    pass


class DuplicateDefinition(InputError):
    pass


# --- Degenerate input (exit 2) ---


class DegenerateInputError(ToricError):
    exit_code = ExitCode.DEGENERATE


class EmptyInput(DegenerateInputError):
    pass


class DivideByZero(DegenerateInputError):
    pass


class NotDivisible(DegenerateInputError):
    pass


class SingularMatrix(DegenerateInputError):
    pass


class InfiniteIndex(DegenerateInputError):
    pass


class ZeroPolynomial(DegenerateInputError):
    pass


class EmptyCriticalDegree(DegenerateInputError):
    pass


class AllMinorsZero(DegenerateInputError):
    pass


class ResultantVanishes(DegenerateInputError):
    pass


class FacetResultantVanishes(DegenerateInputError):
    """A facet resultant is zero at the given coefficients."""

    def __init__(self, normal: tuple[int, ...], detail: str = "") -> None:
        message = f"facet resultant vanishes on facet with normal {normal}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.normal = normal


class GenericityFailure(DegenerateInputError):
    pass


class DegenerateLeadingForm(DegenerateInputError):
    pass


class NegativeExponent(DegenerateInputError):
    pass


# --- Unsupported configuration (exit 3) ---


class UnsupportedConfiguration(ToricError):
    exit_code = ExitCode.UNSUPPORTED


class UnsupportedDimension(UnsupportedConfiguration):
    pass


class UnsupportedFaceConfiguration(UnsupportedConfiguration):
    pass


# --- Caller contract violations (exit 4) ---


class ContractViolation(ToricError):
    exit_code = ExitCode.BAD_INPUT


class NonSquare(ContractViolation):
    pass


class DimensionMismatch(ContractViolation):
    pass


class ArityMismatch(ContractViolation):
    pass


class DegreeMismatch(ContractViolation):
    pass


class NotOfDegreeKBeta(ContractViolation):
    pass


class SupportOutsidePolytope(ContractViolation):
    pass


class NoIndependentSubset(ContractViolation):
    pass


class InvalidPolytope(ContractViolation):
    """An inequality list that is not an irredundant lattice polytope."""


class ZeroNormal(ContractViolation):
    pass


# --- Internal consistency failures (exit 1) ---


class InternalError(ToricError):
    exit_code = ExitCode.INTERNAL


class NonExactDivision(InternalError):
    pass


class NonIntegerDegree(InternalError):
    pass


class DenominatorNotCertified(InternalError):
    pass


class MismatchBetweenDraws(InternalError):
    pass
