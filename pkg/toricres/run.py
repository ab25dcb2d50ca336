"""CLI entry point for the toric residue toolkit.

Usage:
    python -m toricres.run [--json] [--seed N] [--mode numeric|symbolic]
                           [--max-minors K] [--strategy auto|cramer|interpolate]
                           [--verify] [--timing] [--output PATH] [--verbose] INPUT

INPUT is a system description file, or ``-`` for standard input. The
report goes to standard output (or ``--output``); diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from toricres.config import (
    DEFAULT_MAX_MINORS,
    DEFAULT_SEED,
    LOG_FORMAT,
    ExitCode,
    Mode,
    Strategy,
)
from toricres.cox import (
    CoxRing,
    affine_jacobian,
    bracket_presentation,
    degree_class_text,
    euler_form,
    homogenize,
    homogenize_summand,
    toric_affine_jacobian,
    toric_jacobian,
)
from toricres.errors import ArityMismatch, ToricError
from toricres.formatting import (
    format_element,
    format_point,
    format_polynomial,
    format_rational,
    format_rational_function,
    polynomial_json,
)
from toricres.lattice import (
    minkowski_sum,
    mixed_volume,
    newton_polytope,
    normalized_volume,
    scaled_lattice_points,
)
from toricres.models import (
    Factorization,
    LatticePolytope,
    QueryResult,
    Report,
    ResidueValue,
    VerificationReport,
)
from toricres.output import render_json, render_text, write_report
from toricres.parser import Query, SystemSpec, parse_input
from toricres.polynomials import SparsePolynomial
from toricres.residues import (
    ToricResidueProblem,
    global_residue,
    residue_of_monomial,
    satisfies_monomial_face_condition,
    toric_residue,
)
from toricres.resultants import (
    build_phi,
    default_polytope,
    facet_resultants,
    koszul_degree,
    koszul_ranks,
    phi_jacobian,
    phi_layout,
    polytope_ell,
    predicted_degree,
    resultant,
    sylvester_type,
)
from toricres.verifier import (
    verify_global_residue,
    verify_jacobian,
    verify_phi,
    verify_resultant,
    verify_toric_residue,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunOptions:
    seed: int = DEFAULT_SEED
    max_minors: int = DEFAULT_MAX_MINORS
    strategy: Strategy = Strategy.AUTO
    verify: bool = False
    timing: bool = False


Answer = tuple[list[str], dict, Optional[VerificationReport]]


def _layout(query: Query) -> tuple[LatticePolytope, tuple[int, ...]]:
    """Declared polytope and multipliers, or the hull of every support with ``k = 1``."""
    polys = query.operands
    polytope = query.polytope or default_polytope(polys)
    k = query.k or (1,) * len(polys)
    return polytope, tuple(k)


def _factorization_lines(factorization: Factorization) -> list[str]:
    lines = [f"denominator unit: {format_rational(factorization.unit)}"]
    for factor in factorization.factors:
        base = format_element(factorization.domain, factor.base)
        lines.append(f"denominator factor {factor.label}: ({base})^{factor.exponent}")
    return lines


def _residue_lines(value: ResidueValue) -> list[str]:
    lines = [f"Res = {format_rational_function(value.value)}"]
    lines.extend(_factorization_lines(value.denominator))
    lines.append(f"strategy: {value.strategy}")
    if value.mu_minus:
        lines.append(f"mu-: {format_point(value.mu_minus)}")
    if value.seeds:
        lines.append(f"seeds: {', '.join(str(s) for s in value.seeds)}")
    return lines


# --- Command handlers ---


def _answer_resultant(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    polys = list(query.operands)
    polytope, k = _layout(query)
    output = resultant(polys, polytope, k, options.max_minors, random.Random(options.seed))
    power = "R" if output.ell == 1 else f"R^{output.ell}"
    lines = [f"{power} = {format_element(output.domain, output.polynomial)}"]
    if output.predicted_degree is None:
        lines.append(f"degree: {output.degree}")
    else:
        status = "certified" if output.certified else "uncertified"
        lines.append(f"degree: {output.degree} (predicted {output.predicted_degree}, {status})")
    lines.append(f"method: {output.method}, minors used: {output.minors_used}")
    lines.append("sign: defined up to sign")
    payload = {"polytope": polytope.to_json_dict(), "k": list(k), **output.to_json_dict()}
    check = verify_resultant(polys, polytope, k, output, options.seed) if options.verify else None
    return lines, payload, check


def _answer_facet_resultants(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    facet_set = facet_resultants(list(query.operands), spec.supports_for(query), random.Random(options.seed))
    lines = []
    for entry in facet_set.entries:
        suffix = f" (index {entry.ell})" if entry.ell != 1 else ""
        lines.append(f"R{entry.label} = {format_element(facet_set.domain, entry.resultant)}{suffix}")
    return lines, facet_set.to_json_dict(), None


def _answer_toric_residue(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    polys = list(query.operands)
    polytope, k = _layout(query)
    problem = ToricResidueProblem(polytope, tuple(polys), k, query.argument)
    value = toric_residue(problem, options.strategy, rng=random.Random(options.seed))
    lines = [
        f"Res = {format_rational_function(value.value)}",
        f"normalization: {value.normalization}",
        f"strategy: {value.strategy}",
    ]
    payload = {"polytope": polytope.to_json_dict(), "k": list(k), **value.to_json_dict()}
    check = verify_toric_residue(polys, polytope, k, options.seed) if options.verify else None
    return lines, payload, check


def _answer_global_residue(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    polys = list(query.operands)
    if query.exponent is not None:
        q = SparsePolynomial.monomial(spec.variables, spec.domain, query.exponent)
        value = residue_of_monomial(polys, query.exponent, options.strategy, options.seed)
    else:
        q = query.argument
        value = global_residue(q, polys, options.strategy, options.seed)
    payload = {"numerator": polynomial_json(q), **value.to_json_dict()}
    check = verify_global_residue(q, polys, value, options.seed) if options.verify else None
    return _residue_lines(value), payload, check


def _answer_polytope_info(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    polys = list(query.operands)
    n = len(spec.variables)
    deltas = [spec.polytopes.get(name) or newton_polytope(p) for name, p in zip(query.operand_names, polys)]
    lines = []
    summaries = []
    for name, delta in zip(query.operand_names, deltas):
        volume = normalized_volume(delta) if delta.is_full_dimensional else 0
        count = len(scaled_lattice_points(delta))
        vertices = " ".join(format_point(v) for v in delta.vertices)
        lines.append(f"{name}: dim {delta.dim}, vertices {vertices}, normalized volume {volume}, {count} lattice points")
        summaries.append({"operand": name, "polytope": delta.to_json_dict(), "normalizedVolume": volume, "latticePoints": count})
    total = minkowski_sum(deltas)
    lines.append("Minkowski sum facets:")
    for facet, *offsets in zip(total.polytope.facets, *total.summand_offsets):
        lines.append(f"  <m,{format_point(facet.normal)}> + {facet.offset} >= 0, summand offsets {format_point(offsets)}")
    payload: dict = {"newtonPolytopes": summaries, "minkowskiSum": total.to_json_dict()}
    if total.polytope.is_full_dimensional:
        ring = CoxRing.from_polytope(total.polytope)
        payload["coxRing"] = {
            "variables": list(ring.variables),
            "beta": degree_class_text(ring.beta),
            "beta0": degree_class_text(ring.beta0),
        }
        lines.append(f"Cox ring: {', '.join(ring.variables)}; beta = {degree_class_text(ring.beta)}, beta0 = {degree_class_text(ring.beta0)}")
        forms = [homogenize_summand(p, ring, a) for p, a in zip(polys, total.summand_offsets)]
        payload["homogenized"] = [polynomial_json(F) for F in forms]
        lines.extend(f"{name} homogenized = {format_polynomial(F)}" for name, F in zip(query.operand_names, forms))
    if len(polys) == n:
        volume = mixed_volume(deltas)
        condition = total.polytope.is_full_dimensional and satisfies_monomial_face_condition(deltas)
        payload["mixedVolume"] = volume
        payload["monomialFaceCondition"] = condition
        lines.append(f"mixed volume: {volume}")
        lines.append(f"every facet meets a summand in a vertex: {'yes' if condition else 'no'}")
    elif len(polys) == n + 1:
        polytope, k = _layout(query)
        if polytope.is_full_dimensional:
            layout = phi_layout(polytope, k)
            case = sylvester_type(polytope, k)
            payload["phi"] = {
                "shape": [layout.nrows, layout.ncols],
                "sylvesterType": case,
                "predictedDegree": predicted_degree(polytope, k),
                "ell": polytope_ell(polytope, k),
                "koszulRanks": list(koszul_ranks(polytope, k)),
                "koszulDegree": koszul_degree(polytope, k),
            }
            lines.append(f"Phi: {layout.nrows}x{layout.ncols}, determinantal case {case or 'none'}")
            lines.append(f"predicted resultant degree: {predicted_degree(polytope, k)}")
    return lines, payload, None


def _answer_jacobian(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    polys = list(query.operands)
    n = len(spec.variables)
    if len(polys) == n:
        jacobian = toric_affine_jacobian(polys)
        return [f"J^T = {format_polynomial(jacobian)}"], {"toricAffineJacobian": polynomial_json(jacobian)}, None
    if len(polys) != n + 1:
        raise ArityMismatch(f"jacobian needs {n} or {n + 1} polynomials, got {len(polys)}")
    polytope, k = _layout(query)
    ring = CoxRing.from_polytope(polytope, spec.variables)
    forms = [homogenize(p, ring, ki) for p, ki in zip(polys, k)]
    cox_form = toric_jacobian(forms, ring)
    torus_form = phi_jacobian(polys, polytope, k)
    affine = affine_jacobian(polys, k)
    degree = degree_class_text(ring.degree_multiple(sum(k), interior=True))
    lines = [
        f"J(F) = {format_polynomial(cox_form.polynomial)}",
        f"degree: {degree}",
        f"J in torus coordinates = {format_polynomial(torus_form)}",
        f"affine Jacobian = {format_polynomial(affine)}",
    ]
    payload = {
        "toricJacobian": polynomial_json(cox_form.polynomial),
        "degree": degree,
        "torusForm": polynomial_json(torus_form),
        "affineJacobian": polynomial_json(affine),
        "eulerForm": euler_form(ring).to_json_dict(),
    }
    check = verify_jacobian(polys, polytope, k) if options.verify else None
    return lines, payload, check


def _answer_phi_matrix(query: Query, spec: SystemSpec, options: RunOptions) -> Answer:
    polys = list(query.operands)
    polytope, k = _layout(query)
    phi = build_phi(polys, polytope, k)
    matrix = phi.matrix
    lines = [
        f"Phi: {matrix.nrows}x{matrix.ncols} ({phi.mode.value})",
        f"columns: {', '.join(matrix.col_labels)}",
    ]
    for label, row in zip(matrix.row_labels, matrix.entries):
        lines.append(f"{label}: " + " | ".join(format_element(matrix.domain, x) for x in row))
    payload = {**phi.to_json_dict(), "sylvesterType": sylvester_type(polytope, k)}
    if all(ki == 1 for ki in k):
        points = scaled_lattice_points(polytope)
        brackets = bracket_presentation(polys, points)
        payload["bracketPoints"] = [list(p) for p in points]
        payload["jacobianBrackets"] = {
            label: brackets.get(row, "0") for label, row in zip(matrix.row_labels, phi.layout.rows)
        }
        lines.append("Jacobian column in brackets over " + " ".join(format_point(p) for p in points) + ":")
        lines.extend(f"  {label}: {payload['jacobianBrackets'][label]}" for label in matrix.row_labels)
    check = verify_phi(phi) if options.verify else None
    return lines, payload, check


_HANDLERS: dict[str, Callable[[Query, SystemSpec, RunOptions], Answer]] = {
    "resultant": _answer_resultant,
    "facet-resultants": _answer_facet_resultants,
    "toric-residue": _answer_toric_residue,
    "global-residue": _answer_global_residue,
    "residue": _answer_global_residue,
    "polytope-info": _answer_polytope_info,
    "jacobian": _answer_jacobian,
    "phi-matrix": _answer_phi_matrix,
}


def run(spec: SystemSpec, options: RunOptions) -> Report:
    """Answer every query of ``spec`` in order."""
    report = Report(spec.mode, options.seed, verification=VerificationReport() if options.verify else None)
    for query in spec.queries:
        logger.info("query %s (line %d)", query.command, query.line)
        started = time.perf_counter()
        lines, payload, check = _HANDLERS[query.command](query, spec, options)
        elapsed = time.perf_counter() - started
        report.results.append(QueryResult(
            query.command, query.echo, tuple(lines), payload, elapsed if options.timing else None,
        ))
        if check is not None and report.verification is not None:
            report.verification.merge(check)
        logger.debug("query %s answered in %.3fs", query.command, elapsed)
    return report


# --- CLI plumbing ---


def _read_input(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    return Path(source).read_text(encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    """Parse the input, answer its queries and emit the report. Returns an ExitCode value."""
    args = _parse_args(argv)
    _configure_logging(verbose=args.verbose)

    options = RunOptions(
        seed=args.seed,
        max_minors=args.max_minors,
        strategy=Strategy(args.strategy),
        verify=args.verify,
        timing=args.timing,
    )
    try:
        text = _read_input(args.input)
    except (OSError, UnicodeDecodeError) as e:
        logger.error("Failed to read %s: %s", args.input, e)
        return ExitCode.BAD_INPUT.value

    try:
        spec = parse_input(text, Mode(args.mode) if args.mode else None)
        if args.mode == Mode.SYMBOLIC.value and not spec.params:
            logger.warning("symbolic mode without free parameters: computing over QQ")
        report = run(spec, options)
    except ToricError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code.value
    except Exception:
        logger.exception("Internal error")
        return ExitCode.INTERNAL.value

    serialized = render_json(report) if args.json else render_text(report)
    if args.output:
        try:
            write_report(serialized, Path(args.output))
        except OSError as e:
            logger.error("Failed to write %s: %s", args.output, e)
            return ExitCode.INTERNAL.value
    else:
        sys.stdout.write(serialized)

    if report.verification is not None and report.verification.critical_count:
        logger.error("%d critical verification flag(s)", report.verification.critical_count)
        return ExitCode.INTERNAL.value
    return ExitCode.OK.value


def _parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Sparse resultants, toric residues and global residues in exact arithmetic",
    )
    parser.add_argument("input", help="System description file, or - for standard input")
    parser.add_argument("--json", action="store_true", help="Emit the report as JSON")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for every random draw")
    parser.add_argument(
        "--mode",
        choices=[m.value for m in Mode],
        default=None,
        help="numeric requires a value for every parameter (default: inferred)",
    )
    parser.add_argument(
        "--max-minors",
        type=int,
        default=DEFAULT_MAX_MINORS,
        help="Maximal minors sampled by the minor-gcd resultant",
    )
    parser.add_argument(
        "--strategy",
        choices=[s.value for s in Strategy],
        default=Strategy.AUTO.value,
        help="How symbolic residues are solved",
    )
    parser.add_argument("--verify", action="store_true", help="Run cross-oracle checks")
    parser.add_argument("--timing", action="store_true", help="Include per-query timings in the report")
    parser.add_argument("--output", default=None, help="Write the report to this path instead of stdout")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser.parse_args(argv)


def _configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
