"""Cross-oracle checks for computed answers.

Each check recomputes part of an answer by an independent route and
returns a flag on disagreement. CRITICAL flags mean a wrong answer,
WARNING flags an answer that could not be certified or a check that
had to be skipped.
"""

from __future__ import annotations

import logging
import random
from typing import Any, Callable, Optional, Sequence

from sympy.polys.domains import QQ

from toricres.config import Severity
from toricres.cox import CoxRing, affine_jacobian, bracket_expansion
from toricres.errors import DegenerateInputError, DivideByZero
from toricres.lattice import newton_polytope
from toricres.linalg import numeric_rank, random_point
from toricres.models import (
    LatticePolytope,
    PhiMatrix,
    ResidueValue,
    ResultantOutput,
    VerificationFlag,
    VerificationReport,
)
from toricres.polynomials import (
    RationalFunction,
    SparsePolynomial,
    evaluate_element,
    is_numeric,
)
from toricres.residues import (
    ToricResidueProblem,
    completion_vectors,
    global_residue_mixed,
    global_residue_unmixed,
    is_unmixed,
    mu_split,
    toric_residue,
    univariate_residue_oracle,
)
from toricres.resultants import build_phi, phi_jacobian, sylvester_type

logger = logging.getLogger(__name__)

Check = Callable[[], Optional[VerificationFlag]]

COMPLETIONS_COMPARED = 3


def _specialized(
    polys: Sequence[SparsePolynomial], rng: random.Random
) -> tuple[list[SparsePolynomial], dict[str, Any]]:
    """Numeric copies of ``polys`` at a random point of the parameter space."""
    domain = polys[0].domain
    if is_numeric(domain):
        return list(polys), {}
    point = random_point(domain, rng)
    return [p.specialize(point) for p in polys], point


def _numeric(value: RationalFunction) -> Any:
    return value.numerator


# --- Resultant checks ---


def _check_resultant_degree(output: ResultantOutput) -> Optional[VerificationFlag]:
    """Flag resultants whose degree was not certified against the Koszul prediction."""
    if output.predicted_degree is None or output.certified:
        return None
    return VerificationFlag(
        Severity.WARNING,
        "resultant_degree",
        f"degree {output.degree} differs from the predicted {output.predicted_degree}; result is uncertified",
    )


def _check_resultant_rank(
    polys: Sequence[SparsePolynomial],
    polytope: LatticePolytope,
    k: Sequence[int],
    output: ResultantOutput,
    rng: random.Random,
) -> Optional[VerificationFlag]:
    """Phi has full row rank at a point exactly when the resultant is nonzero there."""
    domain = output.domain
    matrix = build_phi(polys, polytope, k).matrix
    point: dict[str, Any] = {}
    if not is_numeric(domain):
        point = random_point(domain, rng)
        matrix = matrix.specialize(point)
    full = numeric_rank(matrix) == matrix.nrows
    nonzero = bool(evaluate_element(domain, output.polynomial, point))
    if full == nonzero:
        return None
    return VerificationFlag(
        Severity.CRITICAL,
        "resultant_rank",
        f"Phi {'has' if full else 'lacks'} full rank but the resultant is {'nonzero' if nonzero else 'zero'}",
    )


# --- Residue checks ---


def _check_normalization(
    polys: Sequence[SparsePolynomial],
    polytope: LatticePolytope,
    k: Sequence[int],
    rng: random.Random,
) -> Optional[VerificationFlag]:
    """The toric residue of the toric Jacobian is ``prod(k) * n! * vol(P)``."""
    forms, _ = _specialized(polys, rng)
    problem = ToricResidueProblem(polytope, tuple(forms), tuple(k), phi_jacobian(forms, polytope, k))
    try:
        value = toric_residue(problem, rng=rng)
    except DegenerateInputError as exc:
        return VerificationFlag(Severity.WARNING, "normalization", f"skipped: {exc}")
    expected = problem.normalization
    if _numeric(value.value) == QQ(expected):
        return None
    return VerificationFlag(
        Severity.CRITICAL,
        "normalization",
        f"residue of the Jacobian is {_numeric(value.value)}, expected {expected}",
    )


def _check_univariate_oracle(
    q: SparsePolynomial, polys: Sequence[SparsePolynomial], value: ResidueValue
) -> Optional[VerificationFlag]:
    """Compare a one-variable residue with the remainder-sequence oracle."""
    f = polys[0]
    expected = RationalFunction.zero(f.domain)
    for (m,), coeff in q.convert(f.domain).terms:
        expected = expected + univariate_residue_oracle(f, m).scale(coeff)
    if (value.value - expected).is_zero:
        return None
    return VerificationFlag(Severity.CRITICAL, "univariate_oracle", "residue differs from the univariate oracle")


def _residue_at(q: SparsePolynomial, point: dict[str, Any], compute: Callable[[Sequence[int]], ResidueValue]) -> Any:
    total = QQ.zero
    for exponent, coeff in q.terms:
        total += evaluate_element(q.domain, coeff, point) * _numeric(compute(exponent).value)
    return total


def _check_paths_agree(
    q: SparsePolynomial,
    polys: Sequence[SparsePolynomial],
    value: ResidueValue,
    seed: int,
    rng: random.Random,
) -> Optional[VerificationFlag]:
    """For a shared Newton polytope the mixed reduction must give the same residue."""
    forms, point = _specialized(polys, rng)
    q = q.convert(polys[0].domain)
    try:
        expected = value.value.evaluate(point)
        unmixed = _residue_at(q, point, lambda m: global_residue_unmixed(forms, m, seed=seed))
        mixed = _residue_at(q, point, lambda m: global_residue_mixed(forms, m, seed=seed))
    except (DegenerateInputError, DivideByZero) as exc:
        return VerificationFlag(Severity.WARNING, "paths_agree", f"skipped: {exc}")
    if expected == unmixed == mixed:
        return None
    return VerificationFlag(
        Severity.CRITICAL,
        "paths_agree",
        f"at a random point: reported {expected}, unmixed {unmixed}, mixed {mixed}",
    )


def _check_completion_independence(
    q: SparsePolynomial, polys: Sequence[SparsePolynomial], seed: int, rng: random.Random
) -> Optional[VerificationFlag]:
    """Different completion vectors must give the same unmixed residue."""
    forms, _ = _specialized(polys, rng)
    n = len(forms)
    ring = CoxRing.from_polytope(newton_polytope(forms[0]), forms[0].variables)
    offsets = tuple(n * b for b in ring.offsets)
    for exponent, _ in q.terms:
        _, mu_minus = mu_split(exponent, ring.normals, offsets)
        values = []
        try:
            for completion in completion_vectors(ring, mu_minus, COMPLETIONS_COMPARED):
                values.append(_numeric(global_residue_unmixed(forms, exponent, seed=seed, completion=completion).value))
        except DegenerateInputError as exc:
            return VerificationFlag(Severity.WARNING, "completion_independence", f"skipped: {exc}")
        if len(set(values)) > 1:
            return VerificationFlag(
                Severity.CRITICAL,
                "completion_independence",
                f"residue of t^{exponent} depends on the completion vector: {sorted(values)}",
            )
    return None


# --- Jacobian and Phi checks ---


def _check_bracket_expansion(polys: Sequence[SparsePolynomial]) -> Optional[VerificationFlag]:
    if affine_jacobian(polys) == bracket_expansion(polys):
        return None
    return VerificationFlag(Severity.CRITICAL, "bracket_expansion", "affine Jacobian differs from its bracket expansion")


def _check_jacobian_support(polys: Sequence[SparsePolynomial], polytope: LatticePolytope) -> Optional[VerificationFlag]:
    """The affine Jacobian is supported in the interior of ``(n+1)P``."""
    scale = len(polys)
    outside = [e for e in affine_jacobian(polys).support if not polytope.contains(e, scale, strict=True)]
    if not outside:
        return None
    return VerificationFlag(
        Severity.CRITICAL,
        "jacobian_support",
        f"exponents {outside} of the affine Jacobian lie outside the interior of {scale}P",
    )


def _check_phi_shape(phi: PhiMatrix) -> Optional[VerificationFlag]:
    """Determinantal layouts must give a square Phi."""
    layout = phi.layout
    case = sylvester_type(layout.polytope, layout.k)
    if case is None or phi.matrix.is_square:
        return None
    return VerificationFlag(
        Severity.WARNING,
        "phi_shape",
        f"case ({case}) predicts a square Phi, got {phi.matrix.nrows}x{phi.matrix.ncols}",
    )


# --- Public API ---


def _run(checks: Sequence[Check]) -> VerificationReport:
    report = VerificationReport()
    for check in checks:
        flag = check()
        report.checks_run += 1
        if flag is not None:
            report.flags.append(flag)
            logger.warning("%s %s: %s", flag.severity.value, flag.check_name, flag.message)
    return report


def verify_resultant(
    polys: Sequence[SparsePolynomial],
    polytope: LatticePolytope,
    k: Sequence[int],
    output: ResultantOutput,
    seed: int,
) -> VerificationReport:
    rng = random.Random(seed)
    return _run([
        lambda: _check_resultant_degree(output),
        lambda: _check_resultant_rank(polys, polytope, k, output, rng),
    ])


def verify_toric_residue(
    polys: Sequence[SparsePolynomial], polytope: LatticePolytope, k: Sequence[int], seed: int
) -> VerificationReport:
    rng = random.Random(seed)
    return _run([lambda: _check_normalization(polys, polytope, k, rng)])


def verify_global_residue(
    q: SparsePolynomial, polys: Sequence[SparsePolynomial], value: ResidueValue, seed: int
) -> VerificationReport:
    """Oracle comparison for one variable, path and completion agreement for shared polytopes."""
    rng = random.Random(seed)
    checks: list[Check] = []
    if polys[0].nvars == 1:
        checks.append(lambda: _check_univariate_oracle(q, polys, value))
    elif is_unmixed(polys):
        checks.append(lambda: _check_paths_agree(q, polys, value, seed, rng))
        checks.append(lambda: _check_completion_independence(q, polys, seed, rng))
    return _run(checks)


def verify_jacobian(polys: Sequence[SparsePolynomial], polytope: LatticePolytope, k: Sequence[int]) -> VerificationReport:
    checks: list[Check] = []
    if len(polys) == polys[0].nvars + 1:
        checks.append(lambda: _check_bracket_expansion(polys))
        if all(ki == 1 for ki in k):
            checks.append(lambda: _check_jacobian_support(polys, polytope))
    return _run(checks)


def verify_phi(phi: PhiMatrix) -> VerificationReport:
    return _run([lambda: _check_phi_shape(phi)])
