"""Tests for the cross-oracle checks."""

from __future__ import annotations

from dataclasses import replace

from sympy.polys.domains import QQ

from toricres.config import DEFAULT_SEED, Severity
from toricres.lattice import convex_hull
from toricres.parser import parse_polynomial
from toricres.polynomials import RationalFunction
from toricres.residues import residue_of_monomial
from toricres.resultants import build_phi, resultant
from toricres.verifier import (
    verify_global_residue,
    verify_jacobian,
    verify_phi,
    verify_resultant,
    verify_toric_residue,
)

SIMPLEX = convex_hull([(0, 0), (1, 0), (0, 1)])


def _numeric(variables: tuple[str, ...], *texts: str):
    return [parse_polynomial(t, variables, QQ) for t in texts]


# --- Test: resultant checks ---

class TestVerifyResultant:
    def test_clean_output(self, linear_forms) -> None:
        output = resultant(linear_forms.polys)
        report = verify_resultant(linear_forms.polys, SIMPLEX, (1, 1, 1), output, DEFAULT_SEED)
        assert report.checks_run == 2
        assert report.flags == []

    def test_uncertified_degree_warns(self, linear_forms) -> None:
        output = replace(resultant(linear_forms.polys), certified=False, degree=2)
        report = verify_resultant(linear_forms.polys, SIMPLEX, (1, 1, 1), output, DEFAULT_SEED)
        assert [f.check_name for f in report.flags] == ["resultant_degree"]
        assert report.warning_count == 1

    def test_wrong_zero_is_critical(self, linear_forms) -> None:
        """A zero resultant next to a full-rank Phi is a wrong answer."""
        output = replace(resultant(linear_forms.polys), polynomial=linear_forms.domain.zero)
        report = verify_resultant(linear_forms.polys, SIMPLEX, (1, 1, 1), output, DEFAULT_SEED)
        assert report.critical_count == 1
        assert report.flags[0].severity is Severity.CRITICAL

    def test_numeric_vanishing_agrees(self) -> None:
        polys = _numeric(("t1", "t2"), "1 - t1", "2 - 2*t2", "t1 - t2")
        output = resultant(polys)
        assert verify_resultant(polys, SIMPLEX, (1, 1, 1), output, DEFAULT_SEED).flags == []


# --- Test: residue checks ---

class TestVerifyResidues:
    def test_normalization(self) -> None:
        forms = _numeric(("t1", "t2"), "1 + t1^2 + 3*t2^2 + t1*t2", "2 + t1 - t2", "1 - t1 + 3*t2")
        report = verify_toric_residue(forms, SIMPLEX, (2, 1, 1), DEFAULT_SEED)
        assert report.checks_run == 1
        assert report.flags == []

    def test_symbolic_normalization(self, linear_forms) -> None:
        report = verify_toric_residue(linear_forms.polys, SIMPLEX, (1, 1, 1), DEFAULT_SEED)
        assert report.flags == []

    def test_univariate_oracle(self) -> None:
        (f,) = _numeric(("t",), "t^2 - 3*t + 2")
        (q,) = _numeric(("t",), "t^2 + 1")
        value = residue_of_monomial([f], (2,))
        value = replace(value, value=value.value + residue_of_monomial([f], (0,)).value)
        report = verify_global_residue(q, [f], value, DEFAULT_SEED)
        assert report.checks_run == 1
        assert report.flags == []

    def test_univariate_oracle_catches_a_wrong_value(self) -> None:
        (f,) = _numeric(("t",), "t^2 - 3*t + 2")
        (q,) = _numeric(("t",), "t^2")
        value = residue_of_monomial([f], (2,))
        wrong = replace(value, value=RationalFunction.from_element(QQ(5), QQ))
        report = verify_global_residue(q, [f], wrong, DEFAULT_SEED)
        assert [f.check_name for f in report.flags] == ["univariate_oracle"]
        assert report.critical_count == 1

    def test_shared_polytope_paths(self) -> None:
        """Unmixed and mixed routes agree, and so do different completions."""
        polys = _numeric(("t1", "t2"), "t1^2 + t2^2 - 5", "t1^2 - t2^2 + 3*t1*t2 - 1")
        (q,) = _numeric(("t1", "t2"), "t1")
        value = residue_of_monomial(polys, (1, 0))
        report = verify_global_residue(q, polys, value, DEFAULT_SEED)
        assert report.checks_run == 2
        assert report.critical_count == 0

    def test_mixed_systems_skip_the_unmixed_checks(self, numeric_conics) -> None:
        (q,) = _numeric(("t1", "t2"), "t1^2")
        value = residue_of_monomial(numeric_conics.polys, (2, 0))
        assert verify_global_residue(q, numeric_conics.polys, value, DEFAULT_SEED).checks_run == 0


# --- Test: Jacobian and Phi checks ---

class TestVerifyStructure:
    def test_jacobian(self, linear_forms) -> None:
        report = verify_jacobian(linear_forms.polys, SIMPLEX, (1, 1, 1))
        assert report.checks_run == 2
        assert report.flags == []

    def test_jacobian_with_unequal_degrees(self) -> None:
        forms = _numeric(("t1", "t2"), "1 + t1^2 + 3*t2^2 + t1*t2", "2 + t1 - t2", "1 - t1 + 3*t2")
        assert verify_jacobian(forms, SIMPLEX, (2, 1, 1)).checks_run == 1

    def test_square_phi(self, scroll_system) -> None:
        quadrangle = convex_hull([(0, 0), (3, 0), (1, 1), (0, 1)])
        report = verify_phi(build_phi(scroll_system.polys, quadrangle, (1, 1, 1)))
        assert report.checks_run == 1
        assert report.flags == []
