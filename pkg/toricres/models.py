"""Frozen dataclasses shared by the engines. No I/O, pure data containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Any, Optional

from sympy.polys.domains.domain import Domain

from toricres.config import Mode, Severity
from toricres.formatting import (
    element_json,
    format_point,
    format_rational,
    polynomial_json,
    rational_function_json,
)
from toricres.linalg import PolyMatrix
from toricres.polynomials import RationalFunction, SparsePolynomial, as_coefficient

Point = tuple[int, ...]


def _points_json(points: tuple[Point, ...]) -> list[list[int]]:
    return [list(p) for p in points]


# --- Geometry ---


@dataclass(frozen=True)
class Facet:
    """Inequality ``<m, normal> + offset >= 0`` with a primitive inner normal."""

    normal: Point
    offset: int

    def value(self, point: Point, k: int = 1) -> int:
        return sum(a * b for a, b in zip(point, self.normal)) + k * self.offset

    def to_json_dict(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class LatticePolytope:
    """Lattice polytope with vertices and, when full-dimensional, its facets."""

    ambient_dim: int
    dim: int
    vertices: tuple[Point, ...]
    facets: tuple[Facet, ...] = ()

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def normals(self) -> tuple[Point, ...]:
        return tuple(f.normal for f in self.facets)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(f.offset for f in self.facets)

    def contains(self, point: Point, k: int = 1, strict: bool = False) -> bool:
        bound = 1 if strict else 0
        return all(f.value(point, k) >= bound for f in self.facets)

    def to_json_dict(self) -> dict:
        return {
            "ambientDim": self.ambient_dim,
            "dim": self.dim,
            "vertices": _points_json(self.vertices),
            "facets": [f.to_json_dict() for f in self.facets],
        }


@dataclass(frozen=True)
class MinkowskiSum:
    """A Minkowski sum with per-summand offsets ``a_i^j`` on each facet."""

    polytope: LatticePolytope
    summand_offsets: tuple[tuple[int, ...], ...]

    def complement_offsets(self, j: int) -> tuple[int, ...]:
        """Offsets of the sum of every summand except ``j``."""
        return tuple(a - aj for a, aj in zip(self.polytope.offsets, self.summand_offsets[j]))

    def to_json_dict(self) -> dict:
        return {
            "polytope": self.polytope.to_json_dict(),
            "summandOffsets": [list(a) for a in self.summand_offsets],
        }


@dataclass(frozen=True)
class SmithDecomposition:
    """``left * matrix * right`` is diagonal with nonnegative invariant factors."""

    matrix: tuple[tuple[int, ...], ...]
    left: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]
    diagonal: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    @property
    def ncols(self) -> int:
        return len(self.right)

    @property
    def index(self) -> Optional[int]:
        """Index of the row lattice in ZZ^ncols, or None when it is infinite."""
        if self.rank < self.ncols:
            return None
        return prod(d for d in self.diagonal if d)

    def to_json_dict(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix],
            "left": [list(r) for r in self.left],
            "right": [list(r) for r in self.right],
            "diagonal": list(self.diagonal),
        }


@dataclass(frozen=True)
class FaceData:
    """Face supports of a system on one facet and their projected images.

    ``ell`` is None when the face supports do not span the facet lattice.
    """

    facet: Facet
    face_supports: tuple[tuple[Point, ...], ...]
    projected_supports: tuple[tuple[Point, ...], ...]
    ell: Optional[int]

    def to_json_dict(self) -> dict:
        return {
            "facet": self.facet.to_json_dict(),
            "faceSupports": [_points_json(s) for s in self.face_supports],
            "projectedSupports": [_points_json(s) for s in self.projected_supports],
            "ell": self.ell,
        }


# --- Cox ring ---


@dataclass(frozen=True)
class DegreeClass:
    """A class in the divisor class group, compared by its reduced form."""

    representative: tuple[int, ...] = field(compare=False)
    canonical: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"representative": list(self.representative), "canonical": list(self.canonical)}


@dataclass(frozen=True)
class CoxPolynomial:
    """Homogeneous element of degree ``k*beta`` (or ``k*beta - beta0`` if interior)."""

    polynomial: SparsePolynomial
    k: int
    interior: bool = False

    def to_json_dict(self) -> dict:
        return {"k": self.k, "interior": self.interior, "polynomial": polynomial_json(self.polynomial)}


@dataclass(frozen=True)
class EulerTerm:
    subset: tuple[int, ...]  # 0-based facet indices, increasing
    det: int
    complement: tuple[int, ...]  # exponent vector of the complement monomial

    def to_json_dict(self) -> dict:
        return {
            "subset": [i + 1 for i in self.subset],
            "det": self.det,
            "complement": list(self.complement),
        }


@dataclass(frozen=True)
class EulerFormTable:
    variables: tuple[str, ...]
    terms: tuple[EulerTerm, ...]

    def to_json_dict(self) -> dict:
        return {"variables": list(self.variables), "terms": [t.to_json_dict() for t in self.terms]}


# --- Resultants ---


@dataclass(frozen=True)
class PhiLayout:
    """Rows and column blocks of the map Phi for ``(P, k)``."""

    polytope: LatticePolytope
    k: tuple[int, ...]
    rows: tuple[Point, ...]
    blocks: tuple[tuple[Point, ...], ...]

    @property
    def kappa(self) -> int:
        return sum(self.k)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def ncols(self) -> int:
        return sum(self.block_sizes) + 1

    @property
    def jacobian_column(self) -> int:
        return self.ncols - 1

    def to_json_dict(self) -> dict:
        return {
            "k": list(self.k),
            "kappa": self.kappa,
            "rows": _points_json(self.rows),
            "blocks": [_points_json(b) for b in self.blocks],
            "shape": [self.nrows, self.ncols],
        }


@dataclass(frozen=True)
class PhiMatrix:
    layout: PhiLayout
    matrix: PolyMatrix
    mode: Mode
    jacobian: SparsePolynomial  # dehomogenized toric Jacobian, labels the last column

    def to_json_dict(self) -> dict:
        m = self.matrix
        return {
            "layout": self.layout.to_json_dict(),
            "mode": self.mode.value,
            "rowLabels": list(m.row_labels),
            "colLabels": list(m.col_labels),
            "entries": [[element_json(m.domain, x)["text"] for x in row] for row in m.entries],
        }


@dataclass(frozen=True)
class ResultantOutput:
    """``polynomial`` equals ``R^ell`` up to sign."""

    polynomial: Any
    domain: Domain
    ell: int
    method: str
    degree: int
    predicted_degree: Optional[int]
    certified: bool
    minors_used: int = 1

    def to_json_dict(self) -> dict:
        return {
            "polynomial": element_json(self.domain, self.polynomial),
            "ell": self.ell,
            "method": self.method,
            "degree": self.degree,
            "predictedDegree": self.predicted_degree,
            "certified": self.certified,
            "minorsUsed": self.minors_used,
            "signConvention": "defined up to sign",
        }


@dataclass(frozen=True)
class FacetResultant:
    """``resultant == base**ell`` for one facet of the Minkowski sum."""

    facet: Facet
    face_supports: tuple[tuple[Point, ...], ...]
    projected_supports: tuple[tuple[Point, ...], ...]
    ell: int
    resultant: Any
    base: Any
    method: str

    @property
    def label(self) -> str:
        return format_point(self.facet.normal)

    def to_json_dict(self, domain: Domain) -> dict:
        return {
            "facet": self.facet.to_json_dict(),
            "label": self.label,
            "faceSupports": [_points_json(s) for s in self.face_supports],
            "projectedSupports": [_points_json(s) for s in self.projected_supports],
            "ell": self.ell,
            "method": self.method,
            "resultant": element_json(domain, self.resultant),
        }


@dataclass(frozen=True)
class FacetResultantSet:
    domain: Domain
    entries: tuple[FacetResultant, ...]

    def for_normal(self, normal: Point) -> FacetResultant:
        for entry in self.entries:
            if entry.facet.normal == tuple(normal):
                return entry
        raise KeyError(normal)

    def to_json_dict(self) -> dict:
        return {"facets": [e.to_json_dict(self.domain) for e in self.entries]}


@dataclass(frozen=True)
class FactorPower:
    label: str
    base: Any
    exponent: int


@dataclass(frozen=True)
class Factorization:
    """``unit * prod(base**exponent)`` over the coefficient domain."""

    domain: Domain
    unit: Any
    factors: tuple[FactorPower, ...] = ()

    def expand(self) -> Any:
        value = as_coefficient(self.domain, self.unit)
        for factor in self.factors:
            value = value * factor.base**factor.exponent
        return value

    def exponents(self) -> dict[str, int]:
        return {f.label: f.exponent for f in self.factors}

    def to_json_dict(self) -> dict:
        return {
            "unit": format_rational(self.unit),
            "factors": [
                {
                    "label": f.label,
                    "base": element_json(self.domain, f.base),
                    "exponent": f.exponent,
                }
                for f in self.factors
            ],
        }


# --- Residues ---


@dataclass(frozen=True)
class CompletionVector:
    """``x^(a+c)`` has degree ``k0*beta``; ``c[avoid] == 0`` when requested."""

    c: tuple[int, ...]
    k0: int
    avoid: Optional[int] = None
    method: str = "search"

    def to_json_dict(self) -> dict:
        return {"c": list(self.c), "k0": self.k0, "avoid": self.avoid, "method": self.method}


@dataclass(frozen=True)
class MixedReduction:
    """Random multipliers that bring a mixed system to one common degree."""

    polytope: LatticePolytope
    summand_offsets: tuple[tuple[int, ...], ...]
    multipliers: tuple[SparsePolynomial, ...]
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "polytope": self.polytope.to_json_dict(),
            "summandOffsets": [list(a) for a in self.summand_offsets],
            "multipliers": [polynomial_json(q) for q in self.multipliers],
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ResidueValue:
    value: RationalFunction
    denominator: Factorization
    normalization: Any
    strategy: str = ""
    mu_minus: tuple[int, ...] = ()
    completion: Optional[CompletionVector] = None
    seeds: tuple[int, ...] = ()

    @property
    def domain(self) -> Domain:
        return self.value.domain

    def to_json_dict(self) -> dict:
        return {
            "value": rational_function_json(self.value),
            "denominatorFactorization": self.denominator.to_json_dict(),
            "normalization": format_rational(self.normalization),
            "strategy": self.strategy,
            "muMinus": list(self.mu_minus),
            "completion": self.completion.to_json_dict() if self.completion else None,
            "seeds": list(self.seeds),
        }


# --- Reports ---


@dataclass(frozen=True)
class VerificationFlag:
    """One disagreement found by a cross-check."""

    severity: Severity
    check_name: str
    message: str

    def to_json_dict(self) -> dict:
        return {"severity": self.severity.value, "checkName": self.check_name, "message": self.message}


@dataclass
class VerificationReport:
    """Aggregated cross-check results."""

    flags: list[VerificationFlag] = field(default_factory=list)
    checks_run: int = 0

    @property
    def critical_count(self) -> int:
        return sum(1 for f in self.flags if f.severity is Severity.CRITICAL)

    @property
    def warning_count(self) -> int:
        return sum(1 for f in self.flags if f.severity is Severity.WARNING)

    def merge(self, other: VerificationReport) -> None:
        self.flags.extend(other.flags)
        self.checks_run += other.checks_run

    def to_json_dict(self) -> dict:
        return {
            "checksRun": self.checks_run,
            "criticalCount": self.critical_count,
            "warningCount": self.warning_count,
            "flags": [f.to_json_dict() for f in self.flags],
        }


@dataclass(frozen=True)
class QueryResult:
    """Text lines and JSON payload of one answered query."""

    command: str
    echo: str
    lines: tuple[str, ...]
    payload: dict = field(compare=False)
    seconds: Optional[float] = None

    def to_json_dict(self) -> dict:
        data = {"command": self.command, "query": self.echo, "result": self.payload}
        if self.seconds is not None:
            data["seconds"] = round(self.seconds, 6)
        return data


@dataclass
class Report:
    mode: Mode
    seed: int
    results: list[QueryResult] = field(default_factory=list)
    verification: Optional[VerificationReport] = None

    def to_json_dict(self) -> dict:
        return {
            "schemaVersion": 1,
            "mode": self.mode.value,
            "seed": self.seed,
            "results": [r.to_json_dict() for r in self.results],
            "verification": self.verification.to_json_dict() if self.verification else None,
        }
