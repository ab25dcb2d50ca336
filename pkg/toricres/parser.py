"""Reader for the system description language.

A file is a sequence of ``;``-terminated statements:

    vars t1, t2;
    params a0..a2, b0..b2, c = 3/2;
    f1 = a0*t1^2 + a1*t1*t2 + a2*t2^2;
    polytope f1 = hull((0,0), (2,0), (0,2));
    query residue m=(3,3) of (f1, f2);

``*`` is required between factors, negative powers are allowed on torus
variables only and ``t^(i,j)`` is shorthand for ``t1^i*t2^j``. Errors carry
1-based line and column numbers.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from sympy.polys.domains.domain import Domain

from toricres.config import (
    QUERY_COMMANDS,
    RESERVED_WORDS,
    TORUS_VARIABLE_PREFIX,
    Mode,
)
from toricres.errors import (
    DuplicateDefinition,
    InputError,
    ParseError,
    SupportOutsidePolytope,
    UndeclaredSymbol,
)
from toricres.lattice import convex_hull, newton_polytope, scaled_lattice_points
from toricres.models import LatticePolytope, Point
from toricres.polynomials import SparsePolynomial, coefficient_domain

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<range>\.\.)
  | (?P<number>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<symbol>[;,=()+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "number", "name", "symbol", "range" or "end"
    text: str
    line: int
    column: int
    offset: int  # index into the source text
    end: int


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; comments and whitespace are dropped."""
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind not in ("space", "comment"):
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1, pos, match.end()))
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1, pos, pos))
    return tokens


# --- Parsed structures ---


@dataclass(frozen=True)
class Query:
    """One ``query`` statement with its operands already evaluated."""

    command: str
    operands: tuple[SparsePolynomial, ...]
    operand_names: tuple[str, ...]
    argument: Optional[SparsePolynomial] = None  # H or Q
    exponent: Optional[Point] = None  # m of ``residue m=(...)``
    polytope: Optional[LatticePolytope] = None
    k: Optional[tuple[int, ...]] = None
    echo: str = ""
    line: int = 0


@dataclass(frozen=True)
class SystemSpec:
    variables: tuple[str, ...]
    params: tuple[str, ...]  # free parameters, in declaration order
    values: dict[str, Fraction]
    domain: Domain
    definitions: dict[str, SparsePolynomial]
    polytopes: dict[str, LatticePolytope]
    queries: tuple[Query, ...]

    @property
    def mode(self) -> Mode:
        return Mode.SYMBOLIC if self.params else Mode.NUMERIC

    def supports_for(self, query: Query) -> Optional[list[tuple[Point, ...]]]:
        """Declared supports for the operands of ``query``, or None when none is declared."""
        if not any(name in self.polytopes for name in query.operand_names):
            return None
        supports = []
        for name, operand in zip(query.operand_names, query.operands):
            polytope = self.polytopes.get(name) or newton_polytope(operand)
            supports.append(scaled_lattice_points(polytope))
        return supports


@dataclass
class _Declarations:
    variables: list[str] = field(default_factory=list)
    params: list[str] = field(default_factory=list)
    values: dict[str, Fraction] = field(default_factory=dict)
    polytopes: dict[str, LatticePolytope] = field(default_factory=dict)


def _split_statements(tokens: list[Token]) -> Iterator[list[Token]]:
    current: list[Token] = []
    for token in tokens:
        if token.kind == "end":
            if current:
                last = current[-1]
                raise ParseError("missing ';' at end of statement", last.line, last.column + len(last.text))
            return
        if token.text == ";" and token.kind == "symbol":
            if current:
                yield current + [token]
            current = []
        else:
            current.append(token)


# --- Statement reader ---


class _Reader:
    """Cursor over the tokens of one statement."""

    def __init__(self, tokens: list[Token], source: str) -> None:
        self.tokens = tokens
        self.source = source
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.line, token.column)

    def at(self, text: str) -> bool:
        return self.current.kind in ("symbol", "range") and self.current.text == text

    def at_word(self, word: str) -> bool:
        return self.current.kind == "name" and self.current.text == word

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.current.text or 'end of input'!r}")
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            raise self.error(f"expected {word!r}, found {self.current.text or 'end of input'!r}")
        return self.advance()

    def name(self) -> Token:
        if self.current.kind != "name":
            raise self.error(f"expected a name, found {self.current.text or 'end of input'!r}")
        return self.advance()

    def integer(self) -> int:
        sign = -1 if self.at("-") else 1
        if self.at("-"):
            self.advance()
        if self.current.kind != "number":
            raise self.error(f"expected an integer, found {self.current.text or 'end of input'!r}")
        return sign * int(self.advance().text)

    def integer_tuple(self) -> tuple[int, ...]:
        self.expect("(")
        values = [self.integer()]
        while self.at(","):
            self.advance()
            values.append(self.integer())
        self.expect(")")
        return tuple(values)

    def rational(self) -> Fraction:
        sign = -1 if self.at("-") else 1
        if self.at("-"):
            self.advance()
        if self.current.kind != "number":
            raise self.error(f"expected a rational number, found {self.current.text or 'end of input'!r}")
        value = Fraction(int(self.advance().text))
        if self.at("/"):
            self.advance()
            if self.current.kind != "number":
                raise self.error("expected a denominator")
            denominator = int(self.current.text)
            if denominator == 0:
                raise self.error("zero denominator")
            self.advance()
            value /= denominator
        return sign * value

    def text_from(self, start: int) -> str:
        first = self.tokens[start]
        last = self.tokens[max(start, self.index - 1)]
        return " ".join(self.source[first.offset:last.end].split())

    def finish(self) -> None:
        if not self.at(";"):
            raise self.error(f"unexpected {self.current.text or 'end of input'!r}")


def _check_new_name(token: Token, taken: set[str]) -> None:
    if token.text in RESERVED_WORDS or token.text in QUERY_COMMANDS:
        raise ParseError(f"{token.text!r} is a reserved word", token.line, token.column)
    if token.text in taken:
        raise DuplicateDefinition(f"line {token.line}, column {token.column}: {token.text!r} is already declared")


def _name_list(reader: _Reader, taken: set[str], declared: _Declarations, allow_values: bool) -> list[str]:
    names: list[str] = []
    while True:
        first = reader.name()
        if reader.at(".."):
            reader.advance()
            last = reader.name()
            expanded = _expand_range(first, last)
        else:
            expanded = [first.text]
        for name in expanded:
            _check_new_name(Token("name", name, first.line, first.column, first.offset, first.end), taken)
            taken.add(name)
        if allow_values and reader.at("="):
            if len(expanded) != 1:
                raise reader.error("a value can only be given to a single parameter")
            reader.advance()
            declared.values[expanded[0]] = reader.rational()
        names.extend(expanded)
        if not reader.at(","):
            return names
        reader.advance()


def _expand_range(first: Token, last: Token) -> list[str]:
    """``a0..a5`` to ``a0, a1, ..., a5``."""
    head = re.fullmatch(r"([A-Za-z_][A-Za-z_]*?)(\d+)", first.text)
    tail = re.fullmatch(r"([A-Za-z_][A-Za-z_]*?)(\d+)", last.text)
    if not head or not tail or head.group(1) != tail.group(1):
        raise ParseError(f"bad range {first.text}..{last.text}", first.line, first.column)
    low, high = int(head.group(2)), int(tail.group(2))
    if high < low:
        raise ParseError(f"empty range {first.text}..{last.text}", first.line, first.column)
    return [f"{head.group(1)}{i}" for i in range(low, high + 1)]


def _hull(reader: _Reader, dimension: int) -> LatticePolytope:
    reader.expect_word("hull")
    reader.expect("(")
    points = [reader.integer_tuple()]
    while reader.at(","):
        reader.advance()
        points.append(reader.integer_tuple())
    reader.expect(")")
    if any(len(p) != dimension for p in points):
        raise reader.error(f"hull points must have {dimension} coordinates")
    return convex_hull(points)


# --- Expressions ---


def _starts_factor(token: Token) -> bool:
    if token.kind == "number":
        return True
    if token.kind == "name":
        return token.text not in RESERVED_WORDS
    return token.kind == "symbol" and token.text == "("


class _ExpressionReader:
    """Recursive descent over ``+ - * ^`` with rationals and named symbols."""

    def __init__(
        self,
        reader: _Reader,
        variables: tuple[str, ...],
        domain: Domain,
        values: dict[str, Fraction],
        definitions: dict[str, SparsePolynomial],
    ) -> None:
        self.reader = reader
        self.variables = variables
        self.domain = domain
        self.values = values
        self.definitions = definitions
        self.generators = {}
        if domain.is_PolynomialRing:
            self.generators = {str(s): g for s, g in zip(domain.symbols, domain.ring.gens)}

    def _constant(self, value) -> SparsePolynomial:
        return SparsePolynomial.constant(self.variables, self.domain, value)

    def expression(self) -> SparsePolynomial:
        reader = self.reader
        negate = False
        if reader.at("+") or reader.at("-"):
            negate = reader.advance().text == "-"
        total = self.term()
        if negate:
            total = -total
        while reader.at("+") or reader.at("-"):
            sign = reader.advance().text
            piece = self.term()
            total = total + piece if sign == "+" else total - piece
        return total

    def term(self) -> SparsePolynomial:
        product = self.factor()
        while True:
            reader = self.reader
            if reader.at("*"):
                reader.advance()
                product = product * self.factor()
            elif _starts_factor(reader.current):
                previous = reader.tokens[reader.index - 1]
                column = previous.column + len(previous.text)
                raise ParseError("expected '*' between factors", previous.line, column)
            else:
                return product

    def factor(self) -> SparsePolynomial:
        reader = self.reader
        token = reader.current
        if token.kind == "number":
            return self._constant(reader.rational())
        if reader.at("("):
            reader.advance()
            inner = self.expression()
            reader.expect(")")
            return self._power(inner, torus_monomial=False, token=token)
        if token.kind == "name":
            reader.advance()
            if token.text == TORUS_VARIABLE_PREFIX and token.text not in self.variables and reader.at("^"):
                return self._monomial_sugar(token)
            base, torus = self._symbol(token)
            return self._power(base, torus_monomial=torus, token=token)
        raise reader.error(f"unexpected {token.text or 'end of input'!r}")

    def _monomial_sugar(self, token: Token) -> SparsePolynomial:
        reader = self.reader
        reader.expect("^")
        exponent = reader.integer_tuple()
        if len(exponent) != len(self.variables):
            raise ParseError(
                f"monomial exponent needs {len(self.variables)} entries", token.line, token.column
            )
        return SparsePolynomial.monomial(self.variables, self.domain, exponent)

    def _symbol(self, token: Token) -> tuple[SparsePolynomial, bool]:
        name = token.text
        if name in self.variables:
            return SparsePolynomial.variable(self.variables, self.domain, self.variables.index(name)), True
        if name in self.values:
            return self._constant(self.values[name]), False
        if name in self.generators:
            return self._constant(self.generators[name]), False
        if name in self.definitions:
            return self.definitions[name], False
        raise UndeclaredSymbol(f"line {token.line}, column {token.column}: {name!r} is not declared")

    def _power(self, base: SparsePolynomial, torus_monomial: bool, token: Token) -> SparsePolynomial:
        reader = self.reader
        if not reader.at("^"):
            return base
        reader.advance()
        exponent = reader.integer()
        if exponent >= 0:
            return base**exponent
        if not torus_monomial:
            raise ParseError("negative powers are only allowed on torus variables", token.line, token.column)
        (point, _), = base.terms
        return SparsePolynomial.monomial(self.variables, self.domain, tuple(e * exponent for e in point))


# --- Entry point ---


def _declare(statements: list[list[Token]], source: str) -> tuple[_Declarations, set[str]]:
    """First pass: ``vars`` and ``params`` so every later statement sees them."""
    declared = _Declarations()
    taken: set[str] = set()
    for statement in statements:
        reader = _Reader(statement, source)
        if reader.at_word("vars"):
            reader.advance()
            declared.variables.extend(_name_list(reader, taken, declared, allow_values=False))
            reader.finish()
        elif reader.at_word("params"):
            reader.advance()
            names = _name_list(reader, taken, declared, allow_values=True)
            declared.params.extend(name for name in names if name not in declared.values)
            reader.finish()
    if not declared.variables:
        raise InputError("no 'vars' statement: at least one torus variable is required")
    return declared, taken


def _query(reader: _Reader, expressions: _ExpressionReader, declared: _Declarations, dimension: int) -> Query:
    start = reader.index
    first = reader.name()
    command = first.text
    # hyphenated command names arrive as name - name tokens without spaces
    while reader.at("-") and reader.current.offset == reader.tokens[reader.index - 1].end:
        dash = reader.advance()
        part = reader.name()
        if part.offset != dash.end:
            raise reader.error("unexpected space in command name", part)
        command = f"{command}-{part.text}"
    if command not in QUERY_COMMANDS:
        raise ParseError(f"unknown query {command!r}", first.line, first.column)

    argument = None
    exponent = None
    if command in ("toric-residue", "global-residue"):
        argument = expressions.expression()
    elif command == "residue":
        reader.expect_word("m")
        reader.expect("=")
        exponent = reader.integer_tuple()
        if len(exponent) != dimension:
            raise reader.error(f"m needs {dimension} entries")

    reader.expect_word("of")
    reader.expect("(")
    operands: list[SparsePolynomial] = []
    names: list[str] = []
    while True:
        operand_start = reader.index
        operands.append(expressions.expression())
        names.append(reader.text_from(operand_start))
        if not reader.at(","):
            break
        reader.advance()
    reader.expect(")")

    polytope = None
    k = None
    while not reader.at(";"):
        if reader.at_word("over"):
            reader.advance()
            if reader.at_word("hull"):
                polytope = _hull(reader, dimension)
            else:
                token = reader.name()
                if token.text not in declared.polytopes:
                    raise UndeclaredSymbol(f"line {token.line}, column {token.column}: no polytope {token.text!r}")
                polytope = declared.polytopes[token.text]
        elif reader.at_word("k"):
            reader.advance()
            reader.expect("=")
            k = reader.integer_tuple()
        else:
            reader.finish()
    echo = reader.text_from(start)
    return Query(command, tuple(operands), tuple(names), argument, exponent, polytope, k, echo, first.line)


def parse_input(text: str, mode: Optional[Mode] = None) -> SystemSpec:
    """Parse a system description; ``mode=NUMERIC`` requires a value for every parameter."""
    tokens = tokenize(text)
    statements = list(_split_statements(tokens))
    declared, taken = _declare(statements, text)
    variables = tuple(declared.variables)
    if mode is Mode.NUMERIC and declared.params:
        raise InputError(f"numeric mode needs values for parameters {', '.join(declared.params)}")
    domain = coefficient_domain(declared.params)
    definitions: dict[str, SparsePolynomial] = {}
    queries: list[Query] = []
    dimension = len(variables)

    for statement in statements:
        reader = _Reader(statement, text)
        expressions = _ExpressionReader(reader, variables, domain, declared.values, definitions)
        if reader.at_word("vars") or reader.at_word("params"):
            continue
        if reader.at_word("polytope"):
            reader.advance()
            token = reader.name()
            if token.text in declared.polytopes:
                raise DuplicateDefinition(f"line {token.line}, column {token.column}: polytope {token.text!r} declared twice")
            reader.expect("=")
            declared.polytopes[token.text] = _hull(reader, dimension)
            reader.finish()
        elif reader.at_word("query"):
            reader.advance()
            queries.append(_query(reader, expressions, declared, dimension))
        else:
            token = reader.name()
            _check_new_name(token, taken)
            reader.expect("=")
            definitions[token.text] = expressions.expression()
            taken.add(token.text)
            reader.finish()

    for name, polytope in declared.polytopes.items():
        p = definitions.get(name)
        if p is not None and any(not polytope.contains(e) for e in p.support):
            raise SupportOutsidePolytope(f"support of {name} leaves its declared polytope")
    if not queries:
        raise InputError("no 'query' statement")
    logger.info(
        "parsed %d variable(s), %d free parameter(s), %d definition(s), %d query(ies)",
        len(variables), len(declared.params), len(definitions), len(queries),
    )
    return SystemSpec(
        variables=variables,
        params=tuple(declared.params),
        values=dict(declared.values),
        domain=domain,
        definitions=definitions,
        polytopes=dict(declared.polytopes),
        queries=tuple(queries),
    )


def parse_polynomial(text: str, variables: tuple[str, ...], domain: Domain) -> SparsePolynomial:
    """Parse a single expression over ``variables`` with parameters from ``domain``."""
    tokens = tokenize(text)
    tokens.insert(-1, Token("symbol", ";", tokens[-1].line, tokens[-1].column, tokens[-1].offset, tokens[-1].offset))
    reader = _Reader(tokens, text)
    value = _ExpressionReader(reader, variables, domain, {}, {}).expression()
    reader.finish()
    return value
